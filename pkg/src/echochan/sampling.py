"""Deterministic random streams and Haar-measure sampling.

``RandomStream`` wraps a counter-based Philox generator keyed by
``(seed, spawn path)``.  Sub-streams derived from the same parent are
statistically independent and reproduce identically regardless of the order
in which workers consume them, which is what makes Monte Carlo results
independent of the worker count.
"""

from __future__ import annotations

import numpy as np

from .errors import ShapeError
from .states import OrthonormalBasis, UnitaryOperator


class RandomStream:
    """A seeded, forkable random source with platform-stable output."""

    def __init__(self, seed: int, spawn_key: tuple[int, ...] = ()):
        self.seed = int(seed)
        self.spawn_key = tuple(int(k) for k in spawn_key)
        seq = np.random.SeedSequence(entropy=self.seed, spawn_key=self.spawn_key)
        self._gen = np.random.Generator(np.random.Philox(seq))

    def substream(self, index: int) -> "RandomStream":
        """Child stream ``index``; independent of draws made on the parent."""
        return RandomStream(self.seed, self.spawn_key + (int(index),))

    # Thin pass-throughs; keeping them on the class makes every consumption
    # point auditable.
    def uniform(self, size=None):
        return self._gen.uniform(size=size)

    def standard_normal(self, size=None):
        return self._gen.standard_normal(size=size)

    def integers(self, high: int, size=None):
        return self._gen.integers(high, size=size)

    def dirichlet(self, alpha, size=None):
        return self._gen.dirichlet(alpha, size=size)

    def __repr__(self):
        return f"RandomStream(seed={self.seed}, spawn_key={self.spawn_key})"


def haar_unitaries(dim: int, count: int, rng: RandomStream) -> np.ndarray:
    """Stack of ``count`` Haar-random unitaries, shape ``(count, dim, dim)``.

    Complex Ginibre matrices are orthonormalized by QR; multiplying each
    column by the phase of the corresponding diagonal entry of R removes the
    QR gauge freedom and lands exactly on the Haar measure.
    """
    if dim < 1:
        raise ShapeError(f"unitary dimension must be >= 1, got {dim}")
    z = rng.standard_normal((count, dim, dim)) + 1j * rng.standard_normal((count, dim, dim))
    z /= np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    diag = np.einsum("nii->ni", r)
    phases = diag / np.abs(diag)
    return q * phases[:, None, :]


def haar_unitary(dim: int, rng: RandomStream) -> UnitaryOperator:
    """One Haar-random unitary on ``dim`` dimensions."""
    return UnitaryOperator(haar_unitaries(dim, 1, rng)[0])


def haar_basis(dim: int, rng: RandomStream) -> OrthonormalBasis:
    """A Haar-random orthonormal basis (columns of a Haar unitary)."""
    return OrthonormalBasis(haar_unitaries(dim, 1, rng)[0])
