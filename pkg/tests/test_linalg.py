import numpy as np
import pytest

from echochan import linalg
from echochan.errors import DomainError, NumericalError, ValidityError


class TestBinaryEntropy:
    def test_half_is_one(self):
        assert linalg.binary_entropy(0.5) == pytest.approx(1.0, abs=1e-15)

    def test_endpoints_are_zero(self):
        assert linalg.binary_entropy(0.0) == 0.0
        assert linalg.binary_entropy(1.0) == 0.0

    def test_quarter(self):
        # direct evaluation: -(1/4) log2(1/4) - (3/4) log2(3/4)
        expected = 0.25 * 2 - 0.75 * np.log2(0.75)
        assert linalg.binary_entropy(0.25) == pytest.approx(expected, abs=1e-14)
        assert linalg.binary_entropy(0.25) == pytest.approx(0.811278, abs=1e-6)

    def test_symmetry(self):
        for x in np.linspace(0, 1, 21):
            assert linalg.binary_entropy(x) == pytest.approx(
                linalg.binary_entropy(1 - x), abs=1e-14)

    def test_domain_error(self):
        with pytest.raises(DomainError):
            linalg.binary_entropy(1.001)
        with pytest.raises(DomainError):
            linalg.binary_entropy(-1e-3)


class TestMixtureTwoPureEigs:
    def test_orthogonal_equal_mixture(self):
        assert linalg.mixture_two_pure_eigs(0.5, 0.0) == (0.5, 0.5)

    def test_identical_states(self):
        for p in (0.0, 0.3, 0.5, 0.9, 1.0):
            lam_p, lam_m = linalg.mixture_two_pure_eigs(p, 1.0)
            assert lam_p == pytest.approx(1.0, abs=1e-15)
            assert lam_m == pytest.approx(0.0, abs=1e-15)

    def test_quarter_half_against_eigendecomposition(self):
        lam_p, lam_m = linalg.mixture_two_pure_eigs(0.25, 0.5)
        assert lam_p == pytest.approx(0.895285, abs=1e-6)
        assert lam_m == pytest.approx(0.104715, abs=1e-6)

    def test_against_explicit_mixtures(self):
        # 10^3 random (p, overlap): compare with an explicit 2x2 mixture.
        rng = np.random.default_rng(7)
        for _ in range(1000):
            p = rng.uniform()
            overlap = rng.uniform()
            a = np.array([1.0, 0.0])
            b = np.array([np.sqrt(overlap), np.sqrt(1 - overlap)])
            mix = p * np.outer(a, a) + (1 - p) * np.outer(b, b)
            w = np.sort(np.linalg.eigvalsh(mix))
            lam_p, lam_m = linalg.mixture_two_pure_eigs(p, overlap)
            assert lam_m == pytest.approx(w[0], abs=1e-10)
            assert lam_p == pytest.approx(w[1], abs=1e-10)

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            linalg.mixture_two_pure_eigs(-0.1, 0.5)
        with pytest.raises(DomainError):
            linalg.mixture_two_pure_eigs(0.5, 1.1)


class TestEigHermitian:
    def test_identity(self):
        w, v = linalg.eig_hermitian(np.eye(4))
        assert np.allclose(w, 1.0)
        assert np.allclose(v @ v.conj().T, np.eye(4))

    def test_diagonal(self):
        w, _ = linalg.eig_hermitian(np.diag([0.75, 0.25]))
        assert np.allclose(w, [0.25, 0.75])

    def test_random_reconstruction(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            z = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
            h = (z + z.conj().T) / 2
            w, v = linalg.eig_hermitian(h)
            assert np.linalg.norm(v @ np.diag(w) @ v.conj().T - h) < 1e-9
            assert np.linalg.norm(v.conj().T @ v - np.eye(8)) < 1e-9
            assert np.all(np.diff(w) >= 0)

    def test_agrees_with_lapack(self):
        rng = np.random.default_rng(3)
        z = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
        h = (z + z.conj().T) / 2
        w, _ = linalg.eig_hermitian(h)
        assert np.allclose(w, np.linalg.eigvalsh(h), atol=1e-11)

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValidityError):
            linalg.eig_hermitian(np.array([[0.0, 1.0], [0.0, 0.0]]))

    def test_non_convergence_raises(self):
        rng = np.random.default_rng(5)
        z = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
        h = (z + z.conj().T) / 2
        with pytest.raises(NumericalError):
            linalg.eig_hermitian(h, max_sweeps=1)


class TestEntropyOfSpectrum:
    def test_clamps_psd_noise(self):
        w = np.array([1.0 + 5e-11, -5e-11])
        assert linalg.entropy_of_spectrum(w) == pytest.approx(0.0, abs=1e-8)

    def test_rejects_bad_spectrum(self):
        with pytest.raises(ValidityError):
            linalg.entropy_of_spectrum(np.array([1.1, -0.1]))

    def test_uniform(self):
        assert linalg.entropy_of_spectrum(np.ones(8) / 8) == pytest.approx(3.0)


class TestPsdProbe:
    def test_accepts_psd(self):
        assert linalg.is_psd_within(np.diag([0.5, 0.5]))

    def test_accepts_tiny_negative(self):
        assert linalg.is_psd_within(np.diag([1.0, -5e-11]))

    def test_rejects_negative(self):
        assert not linalg.is_psd_within(np.diag([1.0, -1e-6]))
