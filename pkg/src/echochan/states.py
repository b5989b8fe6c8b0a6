"""Validated value types for states, operators, and bases.

All types are immutable after construction (backing arrays are frozen), so
they can be shared freely between workers.  Constructor validation runs on
every public path: an invalid ``DensityOperator`` cannot be observed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import ShapeError, SizeError, ValidityError

#: Largest joint dimension the toolkit will build via tensor products.
MAX_DIM = 4096


def _frozen_array(values, ndim: int) -> np.ndarray:
    a = np.array(values, dtype=complex)
    if a.ndim != ndim:
        raise ShapeError(f"expected {ndim}-dimensional array, got shape {a.shape}")
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class StateVector:
    """A pure state: complex amplitudes with unit norm (within 1e-10)."""

    amplitudes: np.ndarray

    def __post_init__(self):
        a = _frozen_array(self.amplitudes, 1)
        object.__setattr__(self, "amplitudes", a)
        norm_sq = float(np.sum(np.abs(a) ** 2))
        if abs(norm_sq - 1.0) > 1e-10:
            raise ValidityError(f"state vector squared norm {norm_sq} != 1")

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def density(self) -> "DensityOperator":
        a = self.amplitudes
        return DensityOperator(np.outer(a, np.conj(a)))

    def overlap(self, other: "StateVector") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))


@dataclass(frozen=True)
class DensityOperator:
    """A density matrix: Hermitian, unit trace, positive semidefinite."""

    matrix: np.ndarray

    def __post_init__(self):
        m = _frozen_array(self.matrix, 2)
        if m.shape[0] != m.shape[1]:
            raise ShapeError(f"density matrix must be square, got {m.shape}")
        object.__setattr__(self, "matrix", m)
        if linalg.hermiticity_defect(m) > 1e-10:
            raise ValidityError("density matrix is not Hermitian within 1e-10")
        tr = complex(np.trace(m))
        if abs(tr - 1.0) > 1e-10:
            raise ValidityError(f"density matrix trace {tr} != 1")
        if not linalg.is_psd_within(m, tol=1e-10):
            raise ValidityError("density matrix has eigenvalue below -1e-10")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class UnitaryOperator:
    """A unitary matrix: U^dagger U = I within 1e-10."""

    matrix: np.ndarray

    def __post_init__(self):
        m = _frozen_array(self.matrix, 2)
        if m.shape[0] != m.shape[1]:
            raise ShapeError(f"unitary must be square, got {m.shape}")
        object.__setattr__(self, "matrix", m)
        defect = np.linalg.norm(linalg.dagger(m) @ m - np.eye(m.shape[0]))
        if defect > 1e-10:
            raise ValidityError(f"operator fails unitarity by {defect}")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class OrthonormalBasis:
    """An ordered orthonormal basis, stored as the columns of a unitary."""

    matrix: np.ndarray

    def __post_init__(self):
        m = _frozen_array(self.matrix, 2)
        if m.shape[0] != m.shape[1]:
            raise ShapeError(f"basis matrix must be square, got {m.shape}")
        object.__setattr__(self, "matrix", m)
        gram = linalg.dagger(m) @ m
        if np.linalg.norm(gram - np.eye(m.shape[0])) > 1e-10:
            raise ValidityError("basis vectors are not orthonormal within 1e-10")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def vectors(self) -> tuple[StateVector, ...]:
        return tuple(StateVector(self.matrix[:, j]) for j in range(self.dim))

    def conjugate(self) -> "OrthonormalBasis":
        """The entrywise-conjugate basis (the echo-measurement basis)."""
        return OrthonormalBasis(np.conj(self.matrix))


def basis_state(dim: int, index: int) -> StateVector:
    """Computational basis vector |index> in dimension ``dim``."""
    if not 0 <= index < dim:
        raise ShapeError(f"basis index {index} outside [0, {dim})")
    a = np.zeros(dim, dtype=complex)
    a[index] = 1.0
    return StateVector(a)


def computational_basis(dim: int) -> OrthonormalBasis:
    return OrthonormalBasis(np.eye(dim, dtype=complex))


def max_entangled(dim: int) -> StateVector:
    """The standard maximally entangled pair sum_i |ii> / sqrt(dim)."""
    a = np.zeros((dim, dim), dtype=complex)
    np.fill_diagonal(a, 1.0 / np.sqrt(dim))
    return StateVector(a.reshape(-1))


def tensor(a, b):
    """Kronecker product of two states or two operators.

    ``StateVector x StateVector -> StateVector``; like operator types combine
    to the same type.  The joint dimension is capped at ``MAX_DIM``.
    """
    if isinstance(a, StateVector) and isinstance(b, StateVector):
        if a.dim * b.dim > MAX_DIM:
            raise SizeError(f"tensor dimension {a.dim * b.dim} exceeds {MAX_DIM}")
        return StateVector(np.kron(a.amplitudes, b.amplitudes))
    for kind in (DensityOperator, UnitaryOperator, OrthonormalBasis):
        if isinstance(a, kind) and isinstance(b, kind):
            if a.dim * b.dim > MAX_DIM:
                raise SizeError(
                    f"tensor dimension {a.dim * b.dim} exceeds {MAX_DIM}")
            return kind(np.kron(a.matrix, b.matrix))
    raise ShapeError(
        f"cannot tensor {type(a).__name__} with {type(b).__name__}")


def _check_dims(total: int, dims) -> tuple[int, ...]:
    dims = tuple(int(d) for d in dims)
    if any(d <= 0 for d in dims):
        raise ShapeError(f"factor dimensions must be positive, got {dims}")
    if int(np.prod(dims)) != total:
        raise ShapeError(f"factors {dims} do not multiply to dimension {total}")
    return dims


def partial_trace(rho: DensityOperator, dims, keep) -> DensityOperator:
    """Trace out all factors not listed in ``keep``.

    ``dims`` factorizes ``rho``; ``keep`` is an index or iterable of factor
    indices to retain (in their original order).
    """
    dims = _check_dims(rho.dim, dims)
    if isinstance(keep, (int, np.integer)):
        keep = (int(keep),)
    keep = tuple(sorted(set(int(k) for k in keep)))
    if any(k < 0 or k >= len(dims) for k in keep):
        raise ShapeError(f"keep indices {keep} outside factor range")
    return DensityOperator(partial_trace_matrix(rho.matrix, dims, keep))


def partial_trace_matrix(matrix: np.ndarray, dims, keep) -> np.ndarray:
    """Raw-array partial trace (no validation of the result)."""
    dims = tuple(dims)
    keep = tuple(keep)
    n = len(dims)
    t = np.asarray(matrix, dtype=complex).reshape(dims + dims)
    traced = [i for i in range(n) if i not in keep]
    # Contract traced row/column axis pairs from the back so indices stay valid.
    for i in sorted(traced, reverse=True):
        t = np.trace(t, axis1=i, axis2=i + (t.ndim // 2))
    d_keep = int(np.prod([dims[i] for i in keep])) if keep else 1
    return t.reshape(d_keep, d_keep)


def entropy_bits(rho: DensityOperator) -> float:
    """Von Neumann entropy in bits, via the in-repo Jacobi eigensolver."""
    w, _ = linalg.eig_hermitian(rho.matrix)
    return linalg.entropy_of_spectrum(w)


def born_measure(state, dims, subsystem: int, basis: OrthonormalBasis, rng,
                 remove: bool = False):
    """Projectively measure one factor of a joint state in ``basis``.

    Parameters
    ----------
    state : StateVector or DensityOperator
        Joint state factorized by ``dims``.
    subsystem : int
        Index of the measured factor; its dimension must match the basis.
    rng : RandomStream
        Source for the Born-rule draw (exactly one uniform is consumed).
    remove : bool
        When True the measured factor is contracted away; otherwise it is
        left collapsed onto the observed basis vector.

    Returns
    -------
    (outcome, post_state, probability)
    """
    dims = _check_dims(state.dim, dims)
    if not 0 <= subsystem < len(dims):
        raise ShapeError(f"subsystem {subsystem} outside factor range")
    if dims[subsystem] != basis.dim:
        raise ShapeError(
            f"subsystem dimension {dims[subsystem]} != basis dimension {basis.dim}")

    if isinstance(state, StateVector):
        outcome, post, prob = _born_pure(
            state.amplitudes, dims, subsystem, basis.matrix, rng, remove)
        return outcome, StateVector(post), prob
    if isinstance(state, DensityOperator):
        outcome, post, prob = _born_density(
            state.matrix, dims, subsystem, basis.matrix, rng, remove)
        return outcome, DensityOperator(post), prob
    raise ShapeError(f"cannot measure a {type(state).__name__}")


def sample_outcome(probs: np.ndarray, rng) -> int:
    """Draw an index with the given probabilities (one uniform consumed)."""
    total = float(np.sum(probs))
    if abs(total - 1.0) > 1e-8:
        raise ValidityError(f"outcome probabilities sum to {total}")
    cumulative = np.cumsum(probs)
    u = rng.uniform()
    return int(min(np.searchsorted(cumulative, u, side="right"),
                   len(cumulative) - 1))


def _born_pure(amps, dims, subsystem, basis_matrix, rng, remove):
    t = np.moveaxis(amps.reshape(dims), subsystem, 0)
    flat = t.reshape(dims[subsystem], -1)
    # Row j holds the (unnormalized) post-measurement amplitudes for outcome j.
    coeffs = np.conj(basis_matrix.T) @ flat
    probs = np.sum(np.abs(coeffs) ** 2, axis=1)
    outcome = sample_outcome(probs, rng)
    prob = float(probs[outcome])
    branch = coeffs[outcome] / np.sqrt(prob)
    rest_dims = dims[:subsystem] + dims[subsystem + 1:]
    if remove:
        return outcome, branch.reshape(-1), prob
    kept = np.multiply.outer(basis_matrix[:, outcome], branch)
    kept = np.moveaxis(kept.reshape((dims[subsystem],) + rest_dims), 0, subsystem)
    return outcome, kept.reshape(-1), prob


def _born_density(matrix, dims, subsystem, basis_matrix, rng, remove):
    n = len(dims)
    d_sub = dims[subsystem]
    t = matrix.reshape(dims + dims)
    # Rotate the measured factor into the measurement basis on both sides.
    t = np.tensordot(np.conj(basis_matrix.T), t, axes=([1], [subsystem]))
    t = np.moveaxis(t, 0, subsystem)
    t = np.tensordot(t, basis_matrix, axes=([n + subsystem], [0]))
    t = np.moveaxis(t, -1, n + subsystem)
    probs = np.empty(d_sub)
    rest = [i for i in range(n) if i != subsystem]
    d_rest = int(np.prod([dims[i] for i in rest])) if rest else 1
    blocks = []
    for j in range(d_sub):
        block = np.take(np.take(t, j, axis=n + subsystem), j, axis=subsystem)
        block = block.reshape(d_rest, d_rest)
        probs[j] = np.trace(block).real
        blocks.append(block)
    outcome = sample_outcome(probs, rng)
    prob = float(probs[outcome])
    post = blocks[outcome] / prob
    if remove:
        return outcome, post, prob
    proj = np.outer(basis_matrix[:, outcome], np.conj(basis_matrix[:, outcome]))
    rest_dims = tuple(dims[i] for i in rest)
    full = np.kron(proj, post.reshape(rest_dims + rest_dims).reshape(d_rest, d_rest))
    # Reorder so the measured factor sits back at its original position.
    full = full.reshape((d_sub,) + rest_dims + (d_sub,) + rest_dims)
    perm = list(range(1, subsystem + 1)) + [0] + list(range(subsystem + 1, n))
    full = np.transpose(full, perm + [n + i for i in perm])
    total = int(np.prod(dims))
    return outcome, full.reshape(total, total), prob
