"""Pure states, density matrices, POVMs, and measurement rules.

Conventions
-----------
* Kets are 1-D complex arrays in the computational basis; bipartite kets use
  the ``linalg.tensor_product`` index convention (index a*dim_b + b).
* A POVM is a finite set of labelled PSD elements summing to the identity
  within ``POVM_SUM_TOL`` (rejected otherwise -- never renormalized).
  Labels are either plain ints or (i, j) int pairs, and elements are kept in
  canonical lexicographic label order so every iteration is deterministic.
* Measuring and keeping outcome i collapses rho to sqrt(E_i) rho sqrt(E_i) /
  tr(E_i rho); discarding the outcome leaves sum_i sqrt(E_i) rho sqrt(E_i).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .linalg import PSD_TOL, as_complex_matrix, is_diagonal, require_hermitian

UNIT_NORM_TOL = 1e-10
TRACE_TOL = 1e-10
POVM_SUM_TOL = 1e-9
# tr(E rho) may stray this far outside [0, 1] before we call it a bug.
PROB_WINDOW_TOL = 1e-12
# Outcomes at or below this probability get no post-measurement state.
ZERO_PROBABILITY = 1e-12

Label = int | tuple[int, int]


def _freeze(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=np.complex128, copy=True)
    out.setflags(write=False)
    return out


def _check_psd(m: np.ndarray, name: str) -> None:
    """Reject matrices with an eigenvalue below -PSD_TOL.

    Diagonal matrices are checked entrywise; this keeps large 0/1 projectors
    (dimension up to 4096) out of the dense eigensolver.
    """
    if is_diagonal(m):
        linalg.clamp_psd_spectrum(m.diagonal().real, name)
    else:
        linalg.clamp_psd_spectrum(np.linalg.eigvalsh(m), name)


@dataclass(frozen=True)
class PureState:
    """Unit-norm ket, optionally carrying a bipartite (dim_a, dim_b) split."""

    amplitudes: np.ndarray
    dims: tuple[int, int] | None = None

    def __post_init__(self):
        amp = np.asarray(self.amplitudes, dtype=np.complex128)
        if amp.ndim != 1:
            raise ValueError(f"amplitudes must be 1-D, got shape {amp.shape}")
        if amp.size == 0:
            raise ValueError("amplitudes must be non-empty")
        if not np.all(np.isfinite(amp)):
            raise ValueError("amplitudes contain non-finite entries")
        norm = float(np.linalg.norm(amp))
        if abs(norm - 1.0) > UNIT_NORM_TOL:
            raise ValueError(
                f"state norm {norm!r} deviates from 1 by more than {UNIT_NORM_TOL:.1e}")
        if self.dims is not None:
            dim_a, dim_b = self.dims
            if dim_a < 1 or dim_b < 1 or dim_a * dim_b != amp.size:
                raise ValueError(
                    f"dims {self.dims} incompatible with vector length {amp.size}")
            object.__setattr__(self, "dims", (int(dim_a), int(dim_b)))
        amp = amp.copy()
        amp.setflags(write=False)
        object.__setattr__(self, "amplitudes", amp)

    @property
    def dim(self) -> int:
        return self.amplitudes.size


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, PSD, unit-trace operator."""

    matrix: np.ndarray

    def __post_init__(self):
        m = require_hermitian(as_complex_matrix(self.matrix, "density matrix"),
                              "density matrix")
        tr = float(np.trace(m).real)
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValueError(
                f"density matrix trace {tr!r} deviates from 1 by more than {TRACE_TOL:.1e}")
        _check_psd(m, "density matrix")
        object.__setattr__(self, "matrix", _freeze(m))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def _label_key(label) -> tuple[int, ...]:
    """Canonical sort key: plain index i -> (i,), pair (i, j) -> (i, j)."""
    if isinstance(label, (int, np.integer)) and not isinstance(label, bool):
        return (int(label),)
    if (isinstance(label, tuple) and len(label) == 2
            and all(isinstance(x, (int, np.integer)) and not isinstance(x, bool)
                    for x in label)):
        return (int(label[0]), int(label[1]))
    raise ValueError(f"POVM label must be an int or an (i, j) int pair, got {label!r}")


def _canonical_label(label):
    key = _label_key(label)
    return key[0] if len(key) == 1 else key


@dataclass(frozen=True)
class Povm:
    """Labelled POVM; elements are stored in canonical label order."""

    elements: tuple

    def __post_init__(self):
        raw = list(self.elements)
        if not raw:
            raise ValueError("POVM needs at least one element")
        seen = set()
        cooked = []
        dim = None
        for label, matrix in raw:
            label = _canonical_label(label)
            if label in seen:
                raise ValueError(f"duplicate POVM label {label!r}")
            seen.add(label)
            m = require_hermitian(as_complex_matrix(matrix, f"element {label!r}"),
                                  f"element {label!r}")
            if dim is None:
                dim = m.shape[0]
            elif m.shape[0] != dim:
                raise ValueError(
                    f"element {label!r} has dimension {m.shape[0]}, expected {dim}")
            _check_psd(m, f"element {label!r}")
            cooked.append((label, _freeze(m)))
        cooked.sort(key=lambda pair: _label_key(pair[0]))
        total = sum(m for _, m in cooked)
        defect = float(np.max(np.abs(total - np.eye(dim))))
        if defect > POVM_SUM_TOL:
            raise ValueError(
                f"POVM element sum deviates from identity by {defect:.3e}"
                f" > {POVM_SUM_TOL:.1e}")
        object.__setattr__(self, "elements", tuple(cooked))

    @property
    def dim(self) -> int:
        return self.elements[0][1].shape[0]

    @property
    def labels(self) -> tuple:
        return tuple(label for label, _ in self.elements)

    def element(self, label) -> np.ndarray:
        wanted = _canonical_label(label)
        for current, matrix in self.elements:
            if current == wanted:
                return matrix
        raise KeyError(f"no POVM element labelled {label!r}")


@dataclass(frozen=True)
class MeasurementOutcome:
    """One branch of a measurement: label, probability, collapsed state.

    ``post_state`` is None when the branch probability is numerically zero
    (at or below ``ZERO_PROBABILITY``) and no collapse is defined.
    """

    label: object
    probability: float
    post_state: DensityMatrix | None


def densify(state: PureState) -> DensityMatrix:
    """Rank-one density matrix |psi><psi|."""
    amp = state.amplitudes
    return DensityMatrix(np.outer(amp, amp.conj()))


def _born_probability(element: np.ndarray, rho: np.ndarray, label) -> float:
    p = float(np.einsum("ab,ba->", element, rho).real)
    if p < -PROB_WINDOW_TOL or p > 1.0 + PROB_WINDOW_TOL:
        raise ValueError(
            f"outcome {label!r} probability {p!r} outside [-{PROB_WINDOW_TOL:.0e},"
            f" 1+{PROB_WINDOW_TOL:.0e}]")
    return min(max(p, 0.0), 1.0)


def measure_probabilities(rho: DensityMatrix, povm: Povm) -> np.ndarray:
    """Born probabilities tr(E_i rho) in canonical label order, clamped to [0, 1]."""
    if rho.dim != povm.dim:
        raise ValueError(f"dimension mismatch: state {rho.dim}, POVM {povm.dim}")
    return np.array([_born_probability(m, rho.matrix, label)
                     for label, m in povm.elements])


def standard_implementation(rho: DensityMatrix, povm: Povm) -> list[MeasurementOutcome]:
    """Measure ``povm`` on ``rho``, keeping the outcome.

    Returns one ``MeasurementOutcome`` per element in canonical label order,
    with post state sqrt(E) rho sqrt(E) / tr(E rho).
    """
    if rho.dim != povm.dim:
        raise ValueError(f"dimension mismatch: state {rho.dim}, POVM {povm.dim}")
    outcomes = []
    for label, element in povm.elements:
        p = _born_probability(element, rho.matrix, label)
        if p <= ZERO_PROBABILITY:
            outcomes.append(MeasurementOutcome(label, p, None))
            continue
        root = linalg.matrix_sqrt_psd(element)
        post = root @ rho.matrix @ root / p
        outcomes.append(MeasurementOutcome(label, p, DensityMatrix(post)))
    return outcomes


def unknown_outcome_state(rho: DensityMatrix, povm: Povm) -> DensityMatrix:
    """Post-measurement state when the outcome is discarded:
    sum_i sqrt(E_i) rho sqrt(E_i)."""
    if rho.dim != povm.dim:
        raise ValueError(f"dimension mismatch: state {rho.dim}, POVM {povm.dim}")
    total = np.zeros((rho.dim, rho.dim), dtype=np.complex128)
    for _, element in povm.elements:
        root = linalg.matrix_sqrt_psd(element)
        total += root @ rho.matrix @ root
    return DensityMatrix(total)


def coarse_grain(povm: Povm) -> Povm:
    """Merge pair-labelled elements over their second index: F_i = sum_j E_(i,j).

    Every label must be an (i, j) pair; plain int labels (or a mix) are
    rejected because there is nothing well-defined to merge.
    """
    groups: dict[int, np.ndarray] = {}
    for label, element in povm.elements:
        if not isinstance(label, tuple):
            raise ValueError(
                f"coarse graining needs pair labels throughout, found {label!r}")
        i = label[0]
        if i in groups:
            groups[i] = groups[i] + element
        else:
            groups[i] = element.copy()
    return Povm(tuple(groups.items()))


def helstrom_probability(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """Best two-hypothesis discrimination probability
    1/2 + ||rho - sigma||_1 / 4 (equal priors)."""
    if rho.dim != sigma.dim:
        raise ValueError(f"dimension mismatch: {rho.dim} vs {sigma.dim}")
    return 0.5 + linalg.trace_norm(rho.matrix - sigma.matrix) / 4.0


def sample_outcome(rho: DensityMatrix, povm: Povm, rng: np.random.Generator,
                   size: int | None = None):
    """Draw outcome labels by inverse CDF over the canonical label order.

    Callers pass an explicit ``numpy.random.Generator``; for parallel use,
    derive one independent stream per batch (see ``qseal.rng.derive_rng``)
    rather than sharing a generator across workers.
    """
    probs = measure_probabilities(rho, povm)
    cdf = np.cumsum(probs)
    u = rng.random() if size is None else rng.random(size)
    idx = np.searchsorted(cdf, u * cdf[-1], side="right")
    idx = np.minimum(idx, len(probs) - 1)
    labels = povm.labels
    if size is None:
        return labels[int(idx)]
    return [labels[int(k)] for k in np.atleast_1d(idx)]
