import numpy as np
import pytest
from scipy import stats

from echochan.sampling import RandomStream, haar_basis, haar_unitaries, haar_unitary


class TestRandomStream:
    def test_equal_seeds_equal_sequences(self):
        a = RandomStream(123456789)
        b = RandomStream(123456789)
        assert np.array_equal(a.standard_normal(100), b.standard_normal(100))
        assert np.array_equal(a.uniform(50), b.uniform(50))

    def test_substreams_do_not_depend_on_parent_draws(self):
        a = RandomStream(5)
        a.uniform(1000)
        from_spent_parent = a.substream(3).uniform(10)
        from_fresh_parent = RandomStream(5).substream(3).uniform(10)
        assert np.array_equal(from_spent_parent, from_fresh_parent)

    def test_substreams_distinct(self):
        a = RandomStream(5)
        assert not np.array_equal(a.substream(0).uniform(10),
                                  a.substream(1).uniform(10))

    def test_nested_substreams(self):
        a = RandomStream(9).substream(2).substream(7)
        b = RandomStream(9).substream(2).substream(7)
        assert np.array_equal(a.uniform(5), b.uniform(5))


class TestHaarUnitary:
    def test_dim_one_is_phase(self):
        u = haar_unitary(1, RandomStream(0))
        assert abs(abs(u.matrix[0, 0]) - 1.0) < 1e-12

    def test_unitarity(self):
        for dim in (2, 3, 5, 8):
            u = haar_unitary(dim, RandomStream(dim))
            assert np.linalg.norm(u.matrix.conj().T @ u.matrix - np.eye(dim)) < 1e-10

    def test_trace_second_moment(self):
        # First Haar moment of |tr U|^2 is 1 for any dimension.
        us = haar_unitaries(2, 1_000_000, RandomStream(42))
        tr2 = np.abs(np.einsum("nii->n", us)) ** 2
        se = tr2.std(ddof=1) / np.sqrt(len(tr2))
        assert abs(tr2.mean() - 1.0) <= 3 * se

    def test_fixed_state_overlap_moment(self):
        # E |<psi|U psi>|^2 = 2 / (d (d+1)) * ... = 1/2 for d = 2.
        us = haar_unitaries(2, 1_000_000, RandomStream(43))
        amp = np.abs(us[:, 0, 0]) ** 2
        se = amp.std(ddof=1) / np.sqrt(len(amp))
        assert abs(amp.mean() - 0.5) <= 3 * se


class TestHaarBasis:
    def test_orthonormal(self):
        b = haar_basis(4, RandomStream(1))
        assert np.linalg.norm(b.matrix.conj().T @ b.matrix - np.eye(4)) < 1e-10

    def test_outcome_probabilities_sum_to_one(self):
        b = haar_basis(2, RandomStream(2))
        probs = np.abs(b.matrix.conj().T @ np.array([1.0, 0.0])) ** 2
        assert probs.sum() == pytest.approx(1.0, abs=1e-12)

    def test_first_overlap_uniform(self):
        # |<b_0|0>|^2 for a Haar basis on C^2 is uniform on [0, 1].
        n = 1_000_000
        us = haar_unitaries(2, n, RandomStream(44))
        samples = np.abs(us[:, 0, 0]) ** 2
        ks = stats.kstest(samples, "uniform")
        assert ks.statistic < 1.628 / np.sqrt(n)  # 1% critical value

    def test_simplex_mean(self):
        # Each coordinate of (|<b_j|0>|^2)_j averages to 1/c.
        c = 3
        us = haar_unitaries(c, 200_000, RandomStream(45))
        weights = np.abs(us[:, 0, :]) ** 2
        se = weights.std(ddof=1, axis=0) / np.sqrt(len(weights))
        assert np.all(np.abs(weights.mean(axis=0) - 1.0 / c) <= 3 * se)
