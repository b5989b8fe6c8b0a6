"""Channel constructors and applications.

The central object is the retrocorrectable channel family: a control input is
measured in a randomly drawn basis, the (hidden) outcome selects one of a set
of randomly drawn unitaries to apply to the data input, and the drawn basis
and unitary set are emitted classically while the outcome itself is discarded
into the environment.  The dephased variant additionally dephases the data
input in the computational basis before the conditional unitary, which makes
the channel entanglement breaking.

The hidden outcome is stored on :class:`ChannelSample` for verification, but
by API contract protocol code must only read ``sample.flag``; tests and
invariant checks go through :func:`audit_hidden_outcome`.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import linalg
from .errors import (
    DomainError,
    ShapeError,
    UnsupportedRepresentationError,
    ValidityError,
)
from .sampling import RandomStream, haar_basis, haar_unitaries
from .states import (
    DensityOperator,
    OrthonormalBasis,
    StateVector,
    UnitaryOperator,
    sample_outcome,
)

PAULI_I = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (PAULI_I, PAULI_X, PAULI_Y, PAULI_Z)

Z_BASIS = OrthonormalBasis(np.eye(2, dtype=complex))
X_BASIS = OrthonormalBasis(np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2))


@dataclass(frozen=True)
class RetroChannelSpec:
    """Parameters of one retrocorrectable channel.

    ``basis_ensemble`` / ``unitary_ensemble`` are either the string ``"haar"``
    or a nonempty tuple to draw from uniformly; finite unitary ensembles are
    tuples of ``control_dim``-tuples of unitaries.
    """

    control_dim: int
    data_dim: int
    variant: str = "standard"
    basis_ensemble: str | tuple[OrthonormalBasis, ...] = "haar"
    unitary_ensemble: str | tuple[tuple[UnitaryOperator, ...], ...] = "haar"

    def __post_init__(self):
        if self.control_dim < 2 or self.data_dim < 2:
            raise DomainError("control and data dimensions must be >= 2")
        if self.variant not in ("standard", "dephased"):
            raise DomainError(f"unknown variant {self.variant!r}")
        if self.basis_ensemble != "haar":
            bases = tuple(self.basis_ensemble)
            if not bases:
                raise ValidityError("finite basis ensemble is empty")
            for b in bases:
                if b.dim != self.control_dim:
                    raise ShapeError("ensemble basis dimension mismatch")
            object.__setattr__(self, "basis_ensemble", bases)
        if self.unitary_ensemble != "haar":
            tuples = tuple(tuple(us) for us in self.unitary_ensemble)
            if not tuples:
                raise ValidityError("finite unitary ensemble is empty")
            for us in tuples:
                if len(us) != self.control_dim:
                    raise ShapeError(
                        f"each unitary tuple must have {self.control_dim} entries")
                for u in us:
                    if u.dim != self.data_dim:
                        raise ShapeError("ensemble unitary dimension mismatch")
            object.__setattr__(self, "unitary_ensemble", tuples)

    @property
    def has_finite_flags(self) -> bool:
        return self.basis_ensemble != "haar" and self.unitary_ensemble != "haar"


@dataclass(frozen=True)
class ChannelSample:
    """One drawn flag: the measurement basis and the conditional unitaries.

    ``hidden_j`` is the channel's internal measurement outcome.  It is kept
    for audits and is never part of the public flag.
    """

    basis: OrthonormalBasis
    unitaries: tuple[UnitaryOperator, ...]
    hidden_j: int | None = None

    def __post_init__(self):
        if len(self.unitaries) != self.basis.dim:
            raise ShapeError("need one unitary per basis vector")
        if self.hidden_j is not None and not 0 <= self.hidden_j < self.basis.dim:
            raise ValidityError(f"hidden outcome {self.hidden_j} out of range")

    @property
    def flag(self) -> tuple[OrthonormalBasis, tuple[UnitaryOperator, ...]]:
        """The classically emitted control output: (basis, unitaries)."""
        return self.basis, self.unitaries


def audit_hidden_outcome(sample: ChannelSample) -> int:
    """Audit view of the channel's hidden measurement outcome.

    Protocol logic must not call this; it exists so tests can verify the echo
    identity against what actually happened inside the channel.
    """
    if sample.hidden_j is None:
        raise ValidityError("channel has not been applied; no hidden outcome yet")
    return sample.hidden_j


def sample_flag(spec: RetroChannelSpec, rng: RandomStream) -> ChannelSample:
    """Draw a flag: Haar ensembles independently, finite ensembles uniformly."""
    if spec.basis_ensemble == "haar":
        basis = haar_basis(spec.control_dim, rng)
    else:
        basis = spec.basis_ensemble[int(rng.integers(len(spec.basis_ensemble)))]
    if spec.unitary_ensemble == "haar":
        stack = haar_unitaries(spec.data_dim, spec.control_dim, rng)
        unitaries = tuple(UnitaryOperator(u) for u in stack)
    else:
        pick = int(rng.integers(len(spec.unitary_ensemble)))
        unitaries = spec.unitary_ensemble[pick]
    return ChannelSample(basis=basis, unitaries=unitaries)


def _apply_unitary_pure(amps, dims, axis, u):
    t = np.tensordot(u, amps.reshape(dims), axes=([1], [axis]))
    return np.moveaxis(t, 0, axis).reshape(-1)


def _apply_unitary_density(matrix, dims, axis, u):
    n = len(dims)
    t = matrix.reshape(dims + dims)
    t = np.tensordot(u, t, axes=([1], [axis]))
    t = np.moveaxis(t, 0, axis)
    t = np.tensordot(t, np.conj(u.T), axes=([n + axis], [0]))
    t = np.moveaxis(t, -1, n + axis)
    total = int(np.prod(dims))
    return t.reshape(total, total)


def _dephase_density(matrix, dims, axis):
    n = len(dims)
    d = dims[axis]
    t = matrix.reshape(dims + dims).copy()
    idx_row = np.arange(d).reshape([d if i == axis else 1 for i in range(n)] + [1] * n)
    idx_col = np.arange(d).reshape([1] * n + [d if i == axis else 1 for i in range(n)])
    t = np.where(idx_row == idx_col, t, 0.0)
    total = int(np.prod(dims))
    return t.reshape(total, total)


def apply_retro(spec: RetroChannelSpec, sample: ChannelSample, state, dims,
                control_axis: int, data_axis: int, rng: RandomStream):
    """Apply one channel use to a joint state.

    The factor at ``control_axis`` (dimension ``control_dim``) is measured in
    the sampled basis and removed; the selected unitary acts on the factor at
    ``data_axis``; any other factors are untouched.  For the dephased variant
    the data factor is dephased in the computational basis first.

    Returns ``(state_out, sample_out)`` where ``sample_out`` carries the
    hidden outcome and the output state has the control factor dropped.
    """
    dims = tuple(int(d) for d in dims)
    if control_axis == data_axis:
        raise ShapeError("control and data must be distinct factors")
    if not (0 <= control_axis < len(dims) and 0 <= data_axis < len(dims)):
        raise ShapeError("factor index out of range")
    if dims[control_axis] != spec.control_dim:
        raise ShapeError(
            f"control factor has dimension {dims[control_axis]}, "
            f"expected {spec.control_dim}")
    if dims[data_axis] != spec.data_dim:
        raise ShapeError(
            f"data factor has dimension {dims[data_axis]}, "
            f"expected {spec.data_dim}")
    if int(np.prod(dims)) != state.dim:
        raise ShapeError(f"factors {dims} do not match state dimension {state.dim}")

    basis_m = sample.basis.matrix
    if isinstance(state, StateVector):
        amps = state.amplitudes
        if spec.variant == "dephased":
            # Trajectory semantics: dephasing is a discarded computational-
            # basis measurement (one uniform consumed, factor kept).
            t = np.moveaxis(amps.reshape(dims), data_axis, 0)
            flat = t.reshape(dims[data_axis], -1)
            probs = np.sum(np.abs(flat) ** 2, axis=1)
            k = sample_outcome(probs, rng)
            collapsed = np.zeros_like(flat)
            collapsed[k] = flat[k] / np.sqrt(probs[k])
            amps = np.moveaxis(
                collapsed.reshape((dims[data_axis],) + t.shape[1:]), 0, data_axis
            ).reshape(-1)
        t = np.moveaxis(amps.reshape(dims), control_axis, 0)
        flat = t.reshape(dims[control_axis], -1)
        coeffs = np.conj(basis_m.T) @ flat
        probs = np.sum(np.abs(coeffs) ** 2, axis=1)
        j = sample_outcome(probs, rng)
        branch = coeffs[j] / np.sqrt(probs[j])
        rest_dims = dims[:control_axis] + dims[control_axis + 1:]
        out = branch.reshape(rest_dims) if rest_dims else branch
        new_data_axis = data_axis - (1 if data_axis > control_axis else 0)
        out = _apply_unitary_pure(
            out.reshape(-1), rest_dims, new_data_axis,
            sample.unitaries[j].matrix)
        return StateVector(out), replace(sample, hidden_j=j)

    if isinstance(state, DensityOperator):
        m = state.matrix
        if spec.variant == "dephased":
            m = _dephase_density(m, dims, data_axis)
        n = len(dims)
        t = m.reshape(dims + dims)
        t = np.tensordot(np.conj(basis_m.T), t, axes=([1], [control_axis]))
        t = np.moveaxis(t, 0, control_axis)
        t = np.tensordot(t, basis_m, axes=([n + control_axis], [0]))
        t = np.moveaxis(t, -1, n + control_axis)
        rest_dims = dims[:control_axis] + dims[control_axis + 1:]
        d_rest = int(np.prod(rest_dims))
        probs = np.empty(spec.control_dim)
        blocks = []
        for j in range(spec.control_dim):
            block = np.take(np.take(t, j, axis=n + control_axis), j,
                            axis=control_axis).reshape(d_rest, d_rest)
            probs[j] = np.trace(block).real
            blocks.append(block)
        j = sample_outcome(probs, rng)
        post = blocks[j] / probs[j]
        new_data_axis = data_axis - (1 if data_axis > control_axis else 0)
        post = _apply_unitary_density(
            post, rest_dims, new_data_axis, sample.unitaries[j].matrix)
        return DensityOperator(post), replace(sample, hidden_j=j)

    raise ShapeError(f"cannot apply channel to a {type(state).__name__}")


def fixed_flag_data_map(sample: ChannelSample, control: StateVector) -> "KrausChannel":
    """The mixed-unitary map induced on the data for a fixed flag and a pure
    control input: Kraus operators ``sqrt(p_j) U_j`` with
    ``p_j = |<b_j|control>|^2``."""
    weights = np.abs(np.conj(sample.basis.matrix.T) @ control.amplitudes) ** 2
    kraus = tuple(np.sqrt(w) * u.matrix
                  for w, u in zip(weights, sample.unitaries) if w > 0)
    d = sample.unitaries[0].dim
    return KrausChannel(kraus, input_dim=d, output_dim=d)


# ---------------------------------------------------------------------------
# Simplified (partially retrocorrectable) channel
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SimplifiedChannelSpec:
    """Two fixed conjugate bases; one trigger outcome per basis.

    The channel measures its control qubit in a uniformly random one of the
    two bases, announces only the basis bit, and fully depolarizes the data
    qubit exactly when the trigger outcome occurred.
    """

    bases: tuple[OrthonormalBasis, OrthonormalBasis] = (Z_BASIS, X_BASIS)
    triggers: tuple[int, int] = (1, 1)

    def __post_init__(self):
        b0, b1 = self.bases
        if b0.dim != 2 or b1.dim != 2:
            raise ShapeError("simplified channel control must be a qubit")
        overlaps = np.abs(np.conj(b0.matrix.T) @ b1.matrix) ** 2
        if np.max(np.abs(overlaps - 0.5)) > 1e-10:
            raise ValidityError("the two bases must be mutually unbiased")
        for t in self.triggers:
            if t not in (0, 1):
                raise DomainError(f"trigger outcome {t} must be 0 or 1")


@dataclass(frozen=True)
class SimplifiedOutcome:
    """Result of one simplified-channel use.

    ``basis_bit`` is the public control output.  ``hidden_j`` (and therefore
    whether depolarization occurred) is audit-only, like the retro channel's
    hidden outcome.  ``control_rest`` holds the collapsed remainder when the
    control input was entangled with retained factors.
    """

    basis_bit: int
    data_out: StateVector | DensityOperator
    hidden_j: int | None
    control_rest: StateVector | None = None

    @property
    def flag(self) -> int:
        return self.basis_bit


def audit_simplified_depolarized(spec: SimplifiedChannelSpec,
                                 outcome: SimplifiedOutcome) -> bool:
    """Audit view: did this use depolarize the data?"""
    if outcome.hidden_j is None:
        raise ValidityError("no hidden outcome recorded")
    return outcome.hidden_j == spec.triggers[outcome.basis_bit]


def apply_simplified(spec: SimplifiedChannelSpec, control, data,
                     rng: RandomStream, control_dims=None) -> SimplifiedOutcome:
    """Apply the simplified channel.

    ``control`` is a qubit ``StateVector``, or a joint ``StateVector`` whose
    first factor (per ``control_dims``) is fed into the channel while the
    rest is retained by the sender.  ``data`` is a qubit ``StateVector`` or
    ``DensityOperator``; on the trigger outcome it is replaced by the
    maximally mixed state, otherwise passed through untouched.
    """
    if not isinstance(control, StateVector):
        raise ShapeError("control input must be a StateVector")
    if control_dims is None:
        control_dims = (control.dim,)
    control_dims = tuple(int(d) for d in control_dims)
    if control_dims[0] != 2:
        raise ShapeError("the measured control factor must be a qubit")
    if int(np.prod(control_dims)) != control.dim:
        raise ShapeError("control_dims do not match the control state")
    if data.dim != 2:
        raise ShapeError("data input must be a qubit")

    b = int(rng.integers(2))
    basis = spec.bases[b]
    t = control.amplitudes.reshape(control_dims)
    flat = t.reshape(2, -1)
    coeffs = np.conj(basis.matrix.T) @ flat
    probs = np.sum(np.abs(coeffs) ** 2, axis=1)
    j = sample_outcome(probs, rng)
    rest = None
    if len(control_dims) > 1:
        rest = StateVector(coeffs[j].reshape(-1) / np.sqrt(probs[j]))

    if j == spec.triggers[b]:
        data_out: StateVector | DensityOperator = DensityOperator(PAULI_I / 2.0)
    else:
        data_out = data
    return SimplifiedOutcome(basis_bit=b, data_out=data_out, hidden_j=j,
                             control_rest=rest)


# ---------------------------------------------------------------------------
# Kraus channels and Choi matrices
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class KrausChannel:
    """A channel given by Kraus operators; completeness within 1e-8."""

    kraus: tuple[np.ndarray, ...]
    input_dim: int
    output_dim: int

    def __post_init__(self):
        ops = tuple(np.asarray(k, dtype=complex) for k in self.kraus)
        if not ops:
            raise ValidityError("need at least one Kraus operator")
        for k in ops:
            if k.shape != (self.output_dim, self.input_dim):
                raise ShapeError(
                    f"Kraus operator shape {k.shape} != "
                    f"({self.output_dim}, {self.input_dim})")
        total = sum(np.conj(k.T) @ k for k in ops)
        if np.linalg.norm(total - np.eye(self.input_dim)) > 1e-8:
            raise ValidityError("Kraus operators do not sum to the identity")
        object.__setattr__(self, "kraus", ops)

    def apply_matrix(self, rho: np.ndarray) -> np.ndarray:
        rho = np.asarray(rho, dtype=complex)
        if rho.shape != (self.input_dim, self.input_dim):
            raise ShapeError(f"input shape {rho.shape} != channel input dimension")
        out = np.zeros((self.output_dim, self.output_dim), dtype=complex)
        for k in self.kraus:
            out += k @ rho @ np.conj(k.T)
        return out

    def apply(self, rho: DensityOperator) -> DensityOperator:
        return DensityOperator(self.apply_matrix(rho.matrix))


@dataclass(frozen=True)
class ChoiMatrix:
    """Normalized Choi state with its input/output factorization."""

    state: DensityOperator
    input_dim: int
    output_dim: int
    flag_count: int = 1

    def __post_init__(self):
        if self.state.dim != self.input_dim * self.output_dim:
            raise ShapeError("Choi dimension does not match input x output")


def enumerate_finite_flags(spec: RetroChannelSpec):
    """All (probability, ChannelSample) pairs of a finite-flag spec."""
    if not spec.has_finite_flags:
        raise UnsupportedRepresentationError(
            "Haar flag ensembles have no finite flag enumeration; "
            "use the Monte Carlo estimators instead")
    flags = []
    n = len(spec.basis_ensemble) * len(spec.unitary_ensemble)
    for basis in spec.basis_ensemble:
        for unitaries in spec.unitary_ensemble:
            flags.append((1.0 / n, ChannelSample(basis=basis, unitaries=unitaries)))
    return flags


def flag_conditional_kraus(spec: RetroChannelSpec, sample: ChannelSample):
    """Kraus operators (control x data -> data) of one fixed-flag use."""
    c, d = spec.control_dim, spec.data_dim
    ops = []
    for j in range(c):
        bra = np.conj(sample.basis.matrix[:, j])[None, :]
        u = sample.unitaries[j].matrix
        if spec.variant == "dephased":
            for k in range(d):
                proj = np.zeros((d, d), dtype=complex)
                proj[k, k] = 1.0
                ops.append(u @ np.kron(bra, proj))
        else:
            ops.append(u @ np.kron(bra, np.eye(d, dtype=complex)))
    return KrausChannel(tuple(ops), input_dim=c * d, output_dim=d)


def choi_matrix(channel) -> ChoiMatrix:
    """Normalized Choi state ``(id (x) N)(Phi)``.

    For a finite-flag retro spec the classical flag register is appended as a
    block-diagonal output factor; Haar ensembles raise
    ``UnsupportedRepresentationError``.
    """
    if isinstance(channel, KrausChannel):
        din, dout = channel.input_dim, channel.output_dim
        j = _choi_of_kraus(channel)
        return ChoiMatrix(DensityOperator(j), din, dout)
    if isinstance(channel, RetroChannelSpec):
        flags = enumerate_finite_flags(channel)
        din = channel.control_dim * channel.data_dim
        dout = channel.data_dim
        m = len(flags)
        total = np.zeros((din * dout * m, din * dout * m), dtype=complex)
        for f, (q, sample) in enumerate(flags):
            block = _choi_of_kraus(flag_conditional_kraus(channel, sample))
            e = np.zeros((m, m))
            e[f, f] = 1.0
            # kron appends the flag register as the last output factor
            total += q * np.kron(block, e)
        return ChoiMatrix(DensityOperator(total), din, dout * m, flag_count=m)
    raise ShapeError(f"cannot build Choi matrix of {type(channel).__name__}")


def _choi_of_kraus(channel: KrausChannel) -> np.ndarray:
    din, dout = channel.input_dim, channel.output_dim
    j = np.zeros((din * dout, din * dout), dtype=complex)
    for k in channel.kraus:
        # (id (x) K) applied to sum_i |ii>/sqrt(din): amplitudes K[:, i]/sqrt(din)
        vec = (k.T / np.sqrt(din)).reshape(-1)
        j += np.outer(vec, np.conj(vec))
    return j


def apply_from_choi(choi: ChoiMatrix, rho: np.ndarray) -> np.ndarray:
    """Reconstruct the channel action ``N(rho)`` from the Choi state."""
    rho = np.asarray(rho, dtype=complex)
    din, dout = choi.input_dim, choi.output_dim
    if rho.shape != (din, din):
        raise ShapeError(f"input shape {rho.shape} != ({din}, {din})")
    j4 = choi.state.matrix.reshape(din, dout, din, dout)
    return din * np.einsum("ab,aibj->ij", rho, j4)


def is_ppt(choi: ChoiMatrix, tol: float = 1e-10):
    """Partial-transpose test across the input|output cut.

    Returns ``(is_ppt, min_eigenvalue)`` of the partially transposed Choi.
    """
    din, dout = choi.input_dim, choi.output_dim
    pt = choi.state.matrix.reshape(din, dout, din, dout)
    pt = pt.transpose(2, 1, 0, 3).reshape(din * dout, din * dout)
    w, _ = linalg.eig_hermitian(pt)
    min_eig = float(w[0])
    return min_eig >= -tol, min_eig


# ---------------------------------------------------------------------------
# Reference channels (capacity-ladder witnesses)
# ---------------------------------------------------------------------------

def identity_qudit(d: int) -> KrausChannel:
    return KrausChannel((np.eye(d, dtype=complex),), input_dim=d, output_dim=d)


def dephasing() -> KrausChannel:
    """Full dephasing of a qubit in the computational basis."""
    k0 = np.array([[1, 0], [0, 0]], dtype=complex)
    k1 = np.array([[0, 0], [0, 1]], dtype=complex)
    return KrausChannel((k0, k1), input_dim=2, output_dim=2)


def classical_bit() -> KrausChannel:
    """The classical bit channel, i.e. a 100% dephasing qubit channel."""
    return dephasing()


def depolarizing(p: float) -> KrausChannel:
    """Qubit depolarizing channel ``rho -> (1-p) rho + p I/2``."""
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"depolarizing probability {p} outside [0, 1]")
    ops = (np.sqrt(1 - 3 * p / 4) * PAULI_I,
           np.sqrt(p / 4) * PAULI_X,
           np.sqrt(p / 4) * PAULI_Y,
           np.sqrt(p / 4) * PAULI_Z)
    ops = tuple(k for k in ops if np.linalg.norm(k) > 0)
    return KrausChannel(ops, input_dim=2, output_dim=2)


def erasure(p: float, d: int = 2) -> KrausChannel:
    """Erasure channel on ``d`` dimensions; output carries a flag state."""
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"erasure probability {p} outside [0, 1]")
    embed = np.zeros((d + 1, d), dtype=complex)
    embed[:d, :] = np.eye(d)
    ops = [np.sqrt(1 - p) * embed]
    for i in range(d):
        k = np.zeros((d + 1, d), dtype=complex)
        k[d, i] = np.sqrt(p)
        ops.append(k)
    ops = [k for k in ops if np.linalg.norm(k) > 0]
    return KrausChannel(tuple(ops), input_dim=d, output_dim=d + 1)


def pauli_pair_ensemble() -> tuple[tuple[UnitaryOperator, UnitaryOperator], ...]:
    """All 16 ordered pairs of Pauli unitaries (the default finite ensemble
    for Choi-based analysis of the (2,2) channels)."""
    us = tuple(UnitaryOperator(p) for p in PAULIS)
    return tuple((a, b) for a in us for b in us)


def dephased_retro_discretized() -> RetroChannelSpec:
    """The default finite discretization of the dephased (2,2) channel:
    bases {Z, X} and Pauli unitary pairs."""
    return RetroChannelSpec(
        control_dim=2, data_dim=2, variant="dephased",
        basis_ensemble=(Z_BASIS, X_BASIS),
        unitary_ensemble=pauli_pair_ensemble())
