"""Dense complex linear algebra on small matrices.

Everything in this module operates on plain ``numpy`` arrays; the validated
value types live in :mod:`echochan.states`.  The Hermitian eigensolver is a
cyclic Jacobi iteration kept in-repo: all matrices in this package are at most
a few hundred rows, and a self-contained solver keeps eigendecompositions
bit-reproducible across BLAS builds.
"""

from __future__ import annotations

import numpy as np

from .errors import DomainError, NumericalError, ShapeError, ValidityError

# Default algebraic tolerance; relaxed to 1e-8 where eigensolver error can
# accumulate (entropy of near-degenerate spectra, Kraus completeness sums).
ATOL = 1e-10

_LOG2 = np.log(2.0)


def as_square_matrix(m) -> np.ndarray:
    """Coerce to a square complex matrix, raising ``ShapeError`` otherwise."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {a.shape}")
    return a


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(m, -2, -1))


def hermiticity_defect(m: np.ndarray) -> float:
    """Frobenius norm of the anti-Hermitian part."""
    return float(np.linalg.norm(m - dagger(m)))


def is_psd_within(m: np.ndarray, tol: float = ATOL) -> bool:
    """True iff the Hermitian part of ``m`` has min eigenvalue >= -tol.

    Uses a shifted Cholesky factorization, which is cheap and deterministic;
    full spectra go through :func:`eig_hermitian`.
    """
    h = (m + dagger(m)) / 2.0
    shifted = h + tol * np.eye(h.shape[0])
    try:
        np.linalg.cholesky(shifted)
    except np.linalg.LinAlgError:
        return False
    return True


def eig_hermitian(h, *, conv_tol: float = 1e-12, max_sweeps: int = 100,
                  hermiticity_tol: float = 1e-8):
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Parameters
    ----------
    h : array_like
        Hermitian matrix (Hermiticity enforced within ``hermiticity_tol``).
    conv_tol : float
        Converged once the off-diagonal Frobenius norm drops below this.
    max_sweeps : int
        Full cyclic sweeps before giving up with ``NumericalError``.

    Returns
    -------
    (eigenvalues, eigenvectors)
        Eigenvalues ascending; eigenvectors as the columns of a unitary
        matrix, ordered to match.
    """
    a = as_square_matrix(h)
    if hermiticity_defect(a) > hermiticity_tol:
        raise ValidityError("matrix is not Hermitian within tolerance")
    a = (a + dagger(a)) / 2.0
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    if n == 1:
        return np.array([a[0, 0].real]), v

    offdiag = ~np.eye(n, dtype=bool)
    converged = False
    for _ in range(max_sweeps):
        if np.sqrt(np.sum(np.abs(a[offdiag]) ** 2)) < conv_tol:
            converged = True
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag == 0.0:
                    continue
                # Unitary 2x2 rotation G = diag(1, conj(phase)) @ R(theta)
                # zeroing the (p, q) entry; phase strips the complex angle,
                # R is the classic symmetric Jacobi rotation.
                conj_phase = np.conj(apq) / mag
                tau = (a[q, q].real - a[p, p].real) / (2.0 * mag)
                if tau == 0.0:
                    t = 1.0
                else:
                    t = np.sign(tau) / (abs(tau) + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                g00, g01 = c, s
                g10, g11 = -s * conj_phase, c * conj_phase

                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = g00 * col_p + g10 * col_q
                a[:, q] = g01 * col_p + g11 * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = np.conj(g00) * row_p + np.conj(g10) * row_q
                a[q, :] = np.conj(g01) * row_p + np.conj(g11) * row_q
                vec_p = v[:, p].copy()
                vec_q = v[:, q].copy()
                v[:, p] = g00 * vec_p + g10 * vec_q
                v[:, q] = g01 * vec_p + g11 * vec_q
    if not converged:
        raise NumericalError(
            f"Jacobi eigensolver did not converge in {max_sweeps} sweeps")

    w = np.diag(a).real.copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def binary_entropy(x: float) -> float:
    """h2(x) = -x log2 x - (1-x) log2 (1-x), with 0 log 0 := 0."""
    if x < -1e-12 or x > 1 + 1e-12:
        raise DomainError(f"binary_entropy argument {x} outside [0, 1]")
    x = min(max(float(x), 0.0), 1.0)
    if x == 0.0 or x == 1.0:
        return 0.0
    return float(-(x * np.log(x) + (1.0 - x) * np.log(1.0 - x)) / _LOG2)


def entropy_of_spectrum(eigenvalues) -> float:
    """Shannon entropy (bits) of a probability spectrum.

    Values in [-1e-10, 0) are clamped to zero (numerical PSD noise); anything
    below -1e-8 is rejected as an invalid spectrum.
    """
    w = np.asarray(eigenvalues, dtype=float)
    if w.size and w.min() < -1e-8:
        raise ValidityError(f"spectrum has eigenvalue {w.min()} < -1e-8")
    w = np.clip(w, 0.0, None)
    nz = w[w > 0.0]
    if nz.size == 0:
        return 0.0
    return float(-np.sum(nz * np.log(nz)) / _LOG2)


def binary_entropy_vec(x: np.ndarray) -> np.ndarray:
    """Vectorized h2 over an array with entries in [0, 1]."""
    x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
    out = np.zeros_like(x)
    inner = (x > 0.0) & (x < 1.0)
    xi = x[inner]
    out[inner] = -(xi * np.log(xi) + (1.0 - xi) * np.log(1.0 - xi)) / _LOG2
    return out


def mixture_two_pure_eigs(p: float, overlap: float):
    """Eigenvalues of ``p |a><a| + (1-p) |b><b|`` with ``|<a|b>|^2 = overlap``.

    Closed form: lambda_pm = (1 +- sqrt(1 - 4 p (1-p) (1-overlap))) / 2.
    Returns ``(lam_plus, lam_minus)`` with lam_plus >= lam_minus >= 0.
    """
    if not 0.0 - 1e-12 <= p <= 1.0 + 1e-12:
        raise DomainError(f"probability {p} outside [0, 1]")
    if not 0.0 - 1e-12 <= overlap <= 1.0 + 1e-12:
        raise DomainError(f"overlap {overlap} outside [0, 1]")
    p = min(max(float(p), 0.0), 1.0)
    overlap = min(max(float(overlap), 0.0), 1.0)
    disc = np.sqrt(max(0.0, 1.0 - 4.0 * p * (1.0 - p) * (1.0 - overlap)))
    return 0.5 * (1.0 + disc), 0.5 * (1.0 - disc)


def mixture_two_pure_eigs_vec(p: np.ndarray, overlap: np.ndarray) -> np.ndarray:
    """Vectorized ``lam_plus`` branch of :func:`mixture_two_pure_eigs`."""
    p = np.asarray(p, dtype=float)
    overlap = np.asarray(overlap, dtype=float)
    disc = np.sqrt(np.maximum(0.0, 1.0 - 4.0 * p * (1.0 - p) * (1.0 - overlap)))
    return 0.5 * (1.0 + disc)
