"""Bipartite seal schemes and the cheat-detection metrics.

A scheme commits to M messages.  Message m is encoded in a bipartite pure
state |psi_m> on H_A (x) H_B; Bob holds the B share plus a classical
description of a pair-labelled POVM {E_(i,j)}, and reading the message means
measuring and taking the first label index.  The scheme promises that the
correct message is read with probability at least ``promised_p``.

Bob's least-disturbing way to read early is to merge each message's elements
into F_i = sum_j E_(i,j), measure {F_i}, and hand back the unknown-outcome
state sum_i (I (x) sqrt(F_i)) |psi_m><psi_m| (I (x) sqrt(F_i)).  Alice gets
two handles on that:

* ``p_dist_numeric`` -- her best probability of distinguishing the returned
  state from the original (equal-prior Helstrom test on the joint state),
  capped by the gentle-measurement bound ``p_dist_upper_bound``.
* ``p_nfp_numeric`` -- the probability that the returned state fails the
  rank-one test {|psi_m><psi_m|, I - |psi_m><psi_m|}, capped by
  ``p_nfp_upper_bound``.

Aggregate numbers in ``DetectionReport`` average the per-message values
under a uniform prior over m (no other prior is specified anywhere in this
package; pick your own weighting from ``per_message`` if you need one).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import linalg, states
from .states import DensityMatrix, Povm, PureState, densify

PROMISE_TOL = 1e-9
_MONOTONE_TOL = 1e-12


def clamp_probability(x: float) -> float:
    return min(max(float(x), 0.0), 1.0)


@dataclass(frozen=True)
class SealScheme:
    """M joint states plus Bob's pair-labelled POVM and the promise level."""

    n_messages: int
    dim_a: int
    dim_b: int
    promised_p: float
    joint_states: tuple
    bob_povm: Povm

    def __post_init__(self):
        m_count = int(self.n_messages)
        if m_count < 2:
            raise ValueError(f"need at least 2 messages, got {m_count}")
        dim_a, dim_b = int(self.dim_a), int(self.dim_b)
        if dim_a < 1 or dim_b < 1:
            raise ValueError(f"dimensions must be positive, got {dim_a}, {dim_b}")
        p = float(self.promised_p)
        if not (1.0 / m_count < p <= 1.0):
            raise ValueError(
                f"promised_p must lie in (1/{m_count}, 1], got {p!r}")
        if len(self.joint_states) != m_count:
            raise ValueError(
                f"expected {m_count} joint states, got {len(self.joint_states)}")
        # anchor every state to this scheme's bipartite split
        anchored = tuple(PureState(s.amplitudes, (dim_a, dim_b))
                         for s in self.joint_states)
        if self.bob_povm.dim != dim_b:
            raise ValueError(
                f"POVM dimension {self.bob_povm.dim} != dim_b {dim_b}")
        for label in self.bob_povm.labels:
            if not isinstance(label, tuple):
                raise ValueError(
                    f"scheme POVM labels must be (message, outcome) pairs, got {label!r}")
            if not 1 <= label[0] <= m_count:
                raise ValueError(
                    f"POVM label {label!r} names a message outside 1..{m_count}")
        object.__setattr__(self, "n_messages", m_count)
        object.__setattr__(self, "dim_a", dim_a)
        object.__setattr__(self, "dim_b", dim_b)
        object.__setattr__(self, "promised_p", p)
        object.__setattr__(self, "joint_states", anchored)
        for m in range(1, m_count + 1):
            realized = promise_probability(self, m)
            if realized < p - PROMISE_TOL:
                raise ValueError(
                    f"promise violated for message {m}: read probability "
                    f"{realized!r} < promised_p {p!r}")

    def state(self, m: int) -> PureState:
        if not 1 <= m <= self.n_messages:
            raise ValueError(f"message index {m} outside 1..{self.n_messages}")
        return self.joint_states[m - 1]


def marginal(scheme: SealScheme, m: int) -> DensityMatrix:
    """Bob's share of |psi_m>: trace out A."""
    amp = scheme.state(m).amplitudes
    joint = np.outer(amp, amp.conj())
    return DensityMatrix(
        linalg.partial_trace(joint, (scheme.dim_a, scheme.dim_b), "A"))


def promise_probability(scheme: SealScheme, m: int) -> float:
    """Probability that Bob's honest measurement reads message m from |psi_m>."""
    amp = scheme.state(m).amplitudes
    joint = np.outer(amp, amp.conj())
    rho_b = linalg.partial_trace(joint, (scheme.dim_a, scheme.dim_b), "A")
    total = 0.0
    for label, element in scheme.bob_povm.elements:
        if label[0] == m:
            total += float(np.einsum("ab,ba->", element, rho_b).real)
    return clamp_probability(total)


def _lifted_roots(scheme: SealScheme) -> list:
    """(i, I_A (x) sqrt(F_i)) for the message-merged POVM."""
    coarse = states.coarse_grain(scheme.bob_povm)
    eye_a = np.eye(scheme.dim_a)
    return [(label, linalg.tensor_product(eye_a, linalg.matrix_sqrt_psd(element)))
            for label, element in coarse.elements]


def coarse_cheat_state(scheme: SealScheme, m: int) -> DensityMatrix:
    """Joint state after Bob's merged measurement with the outcome discarded."""
    amp = scheme.state(m).amplitudes
    joint = np.outer(amp, amp.conj())
    total = np.zeros_like(joint)
    for _, lifted_root in _lifted_roots(scheme):
        total += lifted_root @ joint @ lifted_root
    return DensityMatrix(total)


def p_dist_numeric(scheme: SealScheme, m: int) -> float:
    """Helstrom probability of telling the cheat state from |psi_m>."""
    return states.helstrom_probability(densify(scheme.state(m)),
                                       coarse_cheat_state(scheme, m))


def p_dist_upper_bound(p: float) -> float:
    """Distinguishability cap 1/2 + (2 sqrt(1-p) + (1-p)) / 4 at promise p.

    Raw value; it exceeds 1 for small p, so reports clamp it with
    ``clamp_probability``.
    """
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"promise probability must lie in [0, 1], got {p!r}")
    eps = 1.0 - p
    return 0.5 + (2.0 * math.sqrt(eps) + eps) / 4.0


def p_nfp_numeric(scheme: SealScheme, m: int) -> float:
    """Probability the cheat state fails Alice's rank-one test for |psi_m>:
    1 - sum_i |<psi_m| I (x) sqrt(F_i) |psi_m>|^2."""
    amp = scheme.state(m).amplitudes
    total = 0.0
    for _, lifted_root in _lifted_roots(scheme):
        total += abs(np.vdot(amp, lifted_root @ amp)) ** 2
    return clamp_probability(1.0 - total)


def p_nfp_upper_bound(p: float, n_messages: int) -> float:
    """False-negative cap 1 - p^2 - (1-p)^2 / (M-1) for promise p >= 1/M."""
    m_count = int(n_messages)
    if m_count < 2:
        raise ValueError(f"need at least 2 messages, got {n_messages}")
    p = float(p)
    if not 1.0 / m_count <= p <= 1.0:
        raise ValueError(
            f"promise probability must lie in [1/{m_count}, 1], got {p!r}")
    return 1.0 - p * p - (1.0 - p) ** 2 / (m_count - 1)


def monotonicity_check(values, n_messages: int) -> bool:
    """True iff the false-negative cap is non-increasing along ``values``.

    ``values`` must stay within [1/M, 1]; the cap strictly decreases there,
    so an ascending grid must map to a non-increasing sequence.
    """
    m_count = int(n_messages)
    grid = [float(v) for v in values]
    bounds = [p_nfp_upper_bound(v, m_count) for v in grid]
    return all(later <= earlier + _MONOTONE_TOL
               for earlier, later in zip(bounds, bounds[1:]))


@dataclass(frozen=True)
class MessageDetection:
    """Detection metrics for one message."""

    message: int
    promise_probability: float
    p_dist_numeric: float
    p_dist_upper: float
    p_dist_upper_raw: float
    p_nfp_numeric: float
    p_nfp_upper: float


@dataclass(frozen=True)
class DetectionReport:
    """Per-message metrics plus uniform-prior averages."""

    per_message: tuple
    p_dist_numeric: float
    p_dist_upper: float
    p_nfp_numeric: float
    p_nfp_upper: float
    prior: str = "uniform"


def evaluate_scheme(scheme: SealScheme) -> DetectionReport:
    """Evaluate every detection metric of ``scheme`` against the cheat attack.

    Upper bounds are evaluated at each message's realized read probability
    (never below the scheme-wide promise), which is the tightest level the
    bounds are valid at.
    """
    rows = []
    for m in range(1, scheme.n_messages + 1):
        q = promise_probability(scheme, m)
        raw = p_dist_upper_bound(q)
        nfp_level = min(max(q, 1.0 / scheme.n_messages), 1.0)
        rows.append(MessageDetection(
            message=m,
            promise_probability=q,
            p_dist_numeric=p_dist_numeric(scheme, m),
            p_dist_upper=clamp_probability(raw),
            p_dist_upper_raw=raw,
            p_nfp_numeric=p_nfp_numeric(scheme, m),
            p_nfp_upper=p_nfp_upper_bound(nfp_level, scheme.n_messages),
        ))
    return DetectionReport(
        per_message=tuple(rows),
        p_dist_numeric=float(np.mean([r.p_dist_numeric for r in rows])),
        p_dist_upper=float(np.mean([r.p_dist_upper for r in rows])),
        p_nfp_numeric=float(np.mean([r.p_nfp_numeric for r in rows])),
        p_nfp_upper=float(np.mean([r.p_nfp_upper for r in rows])),
    )


# --- scheme file round trip -------------------------------------------------
#
# Plain JSON: complex numbers as [re, im] pairs, matrices row-major, floats
# written by repr (17 significant digits).

def _pairs_from_vector(vector: np.ndarray) -> list:
    return [[float(z.real), float(z.imag)] for z in vector]


def _vector_from_pairs(pairs, expected_len: int, what: str) -> np.ndarray:
    if not isinstance(pairs, list) or len(pairs) != expected_len:
        raise ValueError(f"scheme file: {what} must list {expected_len} [re, im] pairs")
    out = np.empty(expected_len, dtype=np.complex128)
    for k, pair in enumerate(pairs):
        if (not isinstance(pair, list) or len(pair) != 2
                or not all(isinstance(x, (int, float)) for x in pair)):
            raise ValueError(f"scheme file: {what}[{k}] is not a [re, im] pair")
        out[k] = complex(pair[0], pair[1])
    return out


def save_scheme(scheme: SealScheme, path) -> None:
    doc = {
        "M": scheme.n_messages,
        "dimA": scheme.dim_a,
        "dimB": scheme.dim_b,
        "promised_p": scheme.promised_p,
        "states": [_pairs_from_vector(s.amplitudes) for s in scheme.joint_states],
        "povm": [
            {"label": [label[0], label[1]],
             "matrix": _pairs_from_vector(element.reshape(-1))}
            for label, element in scheme.bob_povm.elements
        ],
    }
    Path(path).write_text(json.dumps(doc, indent=1) + "\n", encoding="utf-8")


def load_scheme(path) -> SealScheme:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValueError(f"scheme file: not valid JSON ({exc})") from None
    if not isinstance(doc, dict):
        raise ValueError("scheme file: top level must be an object")
    for key in ("M", "dimA", "dimB", "promised_p", "states", "povm"):
        if key not in doc:
            raise ValueError(f"scheme file: missing key {key!r}")
    m_count, dim_a, dim_b = doc["M"], doc["dimA"], doc["dimB"]
    if not all(isinstance(x, int) and not isinstance(x, bool)
               for x in (m_count, dim_a, dim_b)):
        raise ValueError("scheme file: M, dimA, dimB must be integers")
    if (isinstance(doc["promised_p"], bool)
            or not isinstance(doc["promised_p"], (int, float))):
        raise ValueError("scheme file: promised_p must be a number")
    if not isinstance(doc["states"], list) or len(doc["states"]) != m_count:
        raise ValueError(f"scheme file: states must list {m_count} vectors")
    joint = dim_a * dim_b
    vectors = [
        PureState(_vector_from_pairs(entry, joint, f"states[{k}]"), (dim_a, dim_b))
        for k, entry in enumerate(doc["states"])
    ]
    if not isinstance(doc["povm"], list) or not doc["povm"]:
        raise ValueError("scheme file: povm must be a non-empty list")
    elements = []
    for k, entry in enumerate(doc["povm"]):
        if not isinstance(entry, dict) or "label" not in entry or "matrix" not in entry:
            raise ValueError(f"scheme file: povm[{k}] needs 'label' and 'matrix'")
        label = entry["label"]
        if (not isinstance(label, list) or len(label) != 2
                or not all(isinstance(x, int) and not isinstance(x, bool)
                           for x in label)):
            raise ValueError(f"scheme file: povm[{k}].label must be an [i, j] pair")
        flat = _vector_from_pairs(entry["matrix"], dim_b * dim_b, f"povm[{k}].matrix")
        elements.append(((label[0], label[1]), flat.reshape(dim_b, dim_b)))
    return SealScheme(
        n_messages=m_count,
        dim_a=dim_a,
        dim_b=dim_b,
        promised_p=float(doc["promised_p"]),
        joint_states=tuple(vectors),
        bob_povm=Povm(tuple(elements)),
    )
