"""Permuted product-state seals, and the two attacks that break them.

Message 1 is a uniformly random qubit permutation of |0>^2q |+>^q, message 2
of |1>^2q |+>^q (3q registers total).  The permutation is supposed to hide
which registers carry the |+> padding, so that a reader who measures
everything in the standard basis wrecks the padding and gets caught.

Neither hope survives:

* Bob measures every register in the standard basis anyway and repairs --
  for message 1 he replaces every register that read 1 with a fresh |+>.
  Each padding register that read 0 is indistinguishable from a data
  register, costing fidelity 1/2; k such "false zeros" leave fidelity
  (1/2)^k, for a mean of (3/4)^q.  Alice's detection probability is stuck
  at 1 - (3/4)^q per trial no matter what the permutation was.
* Better: the two-outcome projector measurement {strings with more zeros
  than 3q/2, rest} reads the message with certainty and does not disturb
  either message state at all (``verify_nondisturbing``).

Dense amplitudes use register 0 as the most significant bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import MAX_DENSE_DIM, CapacityError
from .states import Povm, PureState

ZERO, ONE, PLUS = "zero", "one", "plus"

_SQRT_HALF = 1.0 / math.sqrt(2.0)
_AMPLITUDES = {
    ZERO: np.array([1.0, 0.0], dtype=np.complex128),
    ONE: np.array([0.0, 1.0], dtype=np.complex128),
    PLUS: np.array([_SQRT_HALF, _SQRT_HALF], dtype=np.complex128),
}


@dataclass(frozen=True)
class ProductState:
    """One message state: base register labels plus the hiding permutation.

    ``labels`` is the layout before permuting (2q data registers, then q
    padding registers in canonical builds); ``permutation[i]`` is the
    physical position that base register i gets moved to.
    """

    q: int
    labels: tuple
    permutation: tuple

    def __post_init__(self):
        q = int(self.q)
        if q < 1:
            raise ValueError(f"q must be positive, got {self.q}")
        labels = tuple(self.labels)
        if len(labels) != 3 * q:
            raise ValueError(f"expected {3 * q} labels, got {len(labels)}")
        bad = [lab for lab in labels if lab not in _AMPLITUDES]
        if bad:
            raise ValueError(f"unknown register labels {bad!r}")
        counts = {lab: labels.count(lab) for lab in (ZERO, ONE, PLUS)}
        if counts[PLUS] != q or counts[ZERO] * counts[ONE] != 0 \
                or counts[ZERO] + counts[ONE] != 2 * q:
            raise ValueError(
                "labels must be 2q zeros (message 1) or 2q ones (message 2) "
                f"plus q plus-registers; got counts {counts}")
        perm = tuple(int(x) for x in self.permutation)
        if sorted(perm) != list(range(3 * q)):
            raise ValueError(f"permutation must be a bijection on 0..{3 * q - 1}")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "permutation", perm)

    @property
    def message(self) -> int:
        return 1 if ZERO in self.labels else 2

    @property
    def physical_labels(self) -> tuple:
        out = [None] * len(self.labels)
        for base, target in enumerate(self.permutation):
            out[target] = self.labels[base]
        return tuple(out)

    @property
    def plus_positions(self) -> tuple:
        """Base indices of the padding registers."""
        return tuple(i for i, lab in enumerate(self.labels) if lab == PLUS)


def _require_dense_capacity(q: int) -> int:
    dim = 2 ** (3 * q)
    if dim > MAX_DENSE_DIM:
        raise CapacityError(
            f"dense register space is {dim}-dimensional, above the cap {MAX_DENSE_DIM}")
    return dim


def _dense_from_physical(physical_labels) -> PureState:
    vec = np.ones(1, dtype=np.complex128)
    for lab in physical_labels:
        vec = np.kron(vec, _AMPLITUDES[lab])
    return PureState(vec)


def dense_state(state: ProductState) -> PureState:
    """Explicit 2^(3q)-dimensional ket of the permuted product state."""
    _require_dense_capacity(state.q)
    return _dense_from_physical(state.physical_labels)


def build_message_states(q: int, sigma_seed, tau_seed) -> tuple:
    """Both message states with independent uniformly random permutations."""
    base_zero = (ZERO,) * (2 * q) + (PLUS,) * q
    base_one = (ONE,) * (2 * q) + (PLUS,) * q
    sigma = tuple(int(x) for x in np.random.default_rng(sigma_seed).permutation(3 * q))
    tau = tuple(int(x) for x in np.random.default_rng(tau_seed).permutation(3 * q))
    return (ProductState(q, base_zero, sigma), ProductState(q, base_one, tau))


def majority_projector_povm(q: int) -> Povm:
    """Two diagonal 0/1 projectors: strings with more zeros than 3q/2, and the rest."""
    dim = _require_dense_capacity(q)
    zeros = 3 * q - np.bitwise_count(np.arange(dim, dtype=np.uint64)).astype(np.int64)
    mask = (2 * zeros > 3 * q).astype(np.complex128)
    return Povm(((1, np.diag(mask)), (2, np.diag(1.0 - mask))))


def states_nondisturbing(state_one: ProductState, state_two: ProductState,
                         atol: float = 1e-10) -> bool:
    """True iff each message state is fixed by its majority projector."""
    if state_one.q != state_two.q:
        raise ValueError("message states must share q")
    if (state_one.message, state_two.message) != (1, 2):
        raise ValueError("expected a (message 1, message 2) pair")
    povm = majority_projector_povm(state_one.q)
    for state, label in ((state_one, 1), (state_two, 2)):
        vec = dense_state(state).amplitudes
        if np.max(np.abs(povm.element(label) @ vec - vec)) > atol:
            return False
    return True


def verify_nondisturbing(q: int, sigma_seed, tau_seed) -> bool:
    """Draw both message states from the seeds and test non-disturbance."""
    state_one, state_two = build_message_states(q, sigma_seed, tau_seed)
    return states_nondisturbing(state_one, state_two)


def repaired_state(state: ProductState, plus_outcomes) -> PureState:
    """Dense state Bob returns after measuring and repairing.

    ``plus_outcomes`` gives the standard-basis bit each padding register
    collapsed to, in base order.  Data registers always read their own bit;
    the repair replaces wrong-bit registers (1s for message 1, 0s for
    message 2) with fresh |+>.
    """
    bits = tuple(int(b) for b in plus_outcomes)
    if len(bits) != state.q or any(b not in (0, 1) for b in bits):
        raise ValueError(f"expected {state.q} outcome bits, got {plus_outcomes!r}")
    _require_dense_capacity(state.q)
    repaired = list(state.labels)
    for rank, base in enumerate(state.plus_positions):
        if state.message == 1:
            repaired[base] = ZERO if bits[rank] == 0 else PLUS
        else:
            repaired[base] = PLUS if bits[rank] == 0 else ONE
    physical = [None] * len(repaired)
    for base, target in enumerate(state.permutation):
        physical[target] = repaired[base]
    return _dense_from_physical(physical)


@dataclass(frozen=True)
class AttackResult:
    """Monte Carlo outcome of the measure-and-repair attack."""

    message: int
    trials: int
    mean_fidelity: float
    detection_probability: float
    zero_count_histogram: dict


def mean_fidelity_exact(q: int) -> float:
    """E[(1/2)^k] with k ~ Binomial(q, 1/2): exactly (3/4)^q."""
    if q < 1:
        raise ValueError(f"q must be positive, got {q}")
    return 0.75 ** q


def simulate_qubitwise_attack(state: ProductState, trials: int,
                              rng: np.random.Generator) -> AttackResult:
    """Sample the standard-basis attack register by register.

    Only the q padding registers are random (data registers always read
    their own bit), so each trial draws q fair bits; the repaired state's
    fidelity with the original is (1/2)^k where k counts padding registers
    that collapsed onto the data bit.
    """
    if trials < 1:
        raise ValueError(f"trials must be positive, got {trials}")
    bits = rng.integers(0, 2, size=(trials, state.q), dtype=np.uint8)
    if state.message == 1:
        false_data = np.sum(bits == 0, axis=1)  # padding read as 0
        zero_counts = 2 * state.q + false_data
    else:
        false_data = np.sum(bits == 1, axis=1)  # padding read as 1
        zero_counts = state.q - false_data
    fidelities = 0.5 ** false_data.astype(np.float64)
    histogram = {int(value): int(count)
                 for value, count in zip(*np.unique(zero_counts, return_counts=True))}
    mean = float(fidelities.mean())
    return AttackResult(
        message=state.message,
        trials=int(trials),
        mean_fidelity=mean,
        detection_probability=1.0 - mean,
        zero_count_histogram=histogram,
    )
