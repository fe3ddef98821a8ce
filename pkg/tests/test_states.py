import math

import numpy as np
import pytest

from helpers import random_hermitian
from renyi_thermo.errors import (
    BetaRangeError,
    NotPositiveError,
    SingularSigmaError,
    ValidationError,
    ZeroTraceError,
)
from renyi_thermo.linalg import min_eigenvalue
from renyi_thermo.states import (
    DensityMatrix,
    PositiveMatrix,
    SampleSpec,
    density_from_matrix,
    gibbs_state,
    maximally_mixed,
    pure_state,
    rng_for,
    sample,
)


class TestDensityFromMatrix:
    def test_maximally_mixed_unchanged(self):
        rho = density_from_matrix(np.eye(4) / 4)
        assert np.array_equal(rho.data, np.eye(4) / 4)

    def test_renormalizes(self):
        rho = density_from_matrix(np.diag([0.5, 0.5000000001]))
        assert np.trace(rho.data).real == pytest.approx(1.0, abs=1e-15)
        assert np.allclose(np.diag(rho.data).real, [0.5, 0.5], atol=1e-10)

    def test_clips_small_negativity(self):
        rho = density_from_matrix(np.diag([1.0 + 1e-8, -1e-8]))
        assert rho.eigenvalues[0] == 0.0
        assert np.trace(rho.data).real == pytest.approx(1.0, abs=1e-15)

    def test_rejects_negative(self):
        with pytest.raises(NotPositiveError):
            density_from_matrix(np.diag([1.0, -0.5]))

    def test_rejects_zero_trace(self):
        with pytest.raises(ZeroTraceError):
            density_from_matrix(np.zeros((2, 2)))

    def test_construction_idempotent(self, rng):
        for n in (2, 3, 8):
            G = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
            rho = DensityMatrix(G @ G.conj().T)
            again = DensityMatrix(rho.data.copy())
            assert np.array_equal(rho.data, again.data)

    def test_gibbs_passes_unchanged(self, rng):
        rho0 = gibbs_state(random_hermitian(rng, 5), 0.7)
        assert np.array_equal(density_from_matrix(rho0.data).data, rho0.data)


class TestSpecialStates:
    def test_pure(self):
        rho = pure_state([1, 0])
        assert np.array_equal(rho.data, np.diag([1.0, 0.0]))
        assert rho.purity_hint is True

    def test_pure_general(self, rng):
        v = rng.normal(size=4) + 1j * rng.normal(size=4)
        rho = pure_state(v)
        u = v / np.linalg.norm(v)
        assert np.allclose(rho.data, np.outer(u, u.conj()), atol=1e-15)
        assert np.array_equal(rho.spectrum, [0, 0, 0, 1])

    def test_pure_zero_vector(self):
        with pytest.raises(ValidationError):
            pure_state([0, 0])

    def test_maximally_mixed(self):
        rho = maximally_mixed(12)
        assert np.array_equal(rho.data, np.eye(12) / 12)
        with pytest.raises(ValidationError):
            maximally_mixed(0)


class TestPositiveMatrix:
    def test_accepts_pd(self):
        assert PositiveMatrix(np.diag([1.0, 2.0])).n == 2

    def test_rejects_singular(self):
        with pytest.raises(SingularSigmaError):
            PositiveMatrix(np.diag([1.0, 0.0]))


class TestGibbs:
    def test_example_mean(self):
        H = np.diag([3, 2, 4, 1, 5, 9, 2, 6, 5, 3, 5, 9]).astype(float)
        rho0 = gibbs_state(H, 1.0)
        assert np.trace(rho0.data @ H).real == pytest.approx(1.79549, abs=1e-4)

    def test_beta_zero_maximally_mixed(self, rng):
        rho = gibbs_state(random_hermitian(rng, 3), 0.0)
        assert np.allclose(rho.data, np.eye(3) / 3, atol=1e-15)

    def test_two_level(self):
        rho = gibbs_state(np.diag([0.0, math.log(2)]), 1.0)
        assert np.allclose(np.diag(rho.data).real, [2 / 3, 1 / 3], atol=1e-15)

    def test_commutes_and_shift_invariant(self, rng):
        for _ in range(10):
            H = random_hermitian(rng, 5)
            beta = rng.uniform(-3, 3)
            rho = gibbs_state(H, beta)
            comm = rho.data @ H - H @ rho.data
            assert np.linalg.norm(comm) <= 1e-10 * np.linalg.norm(H)
            shifted = gibbs_state(H + 3.7 * np.eye(5), beta)
            assert np.allclose(shifted.data, rho.data, atol=1e-10)

    def test_negative_beta_favours_top(self):
        rho = gibbs_state(np.diag([0.0, 1.0]), -2.0)
        assert rho.data[1, 1].real > rho.data[0, 0].real

    def test_strictly_positive_and_exact_spectrum(self, rng):
        rho = gibbs_state(random_hermitian(rng, 6), 20.0)
        assert rho.spectrum[0] > 0
        assert math.fsum(rho.spectrum) == pytest.approx(1.0, abs=1e-15)

    def test_beta_range(self):
        H = np.diag([0.0, 10.0])
        gibbs_state(H, 70.0)
        with pytest.raises(BetaRangeError):
            gibbs_state(H, 70.1)
        with pytest.raises(BetaRangeError):
            gibbs_state(H, -80.0)
        with pytest.raises(BetaRangeError):
            gibbs_state(H, math.inf)


class TestSampling:
    def test_ginibre_density(self):
        rho = sample(SampleSpec("ginibre_density", 5, 1))
        assert np.trace(rho.data).real == pytest.approx(1.0, abs=1e-15)
        assert min_eigenvalue(rho) > 0

    def test_haar_unitary(self):
        U = sample(SampleSpec("haar_unitary", 4, 9))
        assert np.linalg.norm(U.conj().T @ U - np.eye(4)) <= 1e-12

    def test_gue_exactly_hermitian(self):
        A = sample(SampleSpec("gue_hermitian", 3, 5, scale=1.0))
        assert np.array_equal(A.data, A.data.conj().T)

    def test_gue_scale(self):
        a = sample(SampleSpec("gue_hermitian", 3, 5)).data
        b = sample(SampleSpec("gue_hermitian", 3, 5, scale=2.5)).data
        assert np.allclose(b, 2.5 * a)

    def test_deterministic(self):
        for kind in ("ginibre_density", "gue_hermitian", "haar_unitary"):
            a, b = sample(SampleSpec(kind, 4, 123)), sample(SampleSpec(kind, 4, 123))
            a, b = np.asarray(a), np.asarray(b)
            assert np.array_equal(a, b)
            c = np.asarray(sample(SampleSpec(kind, 4, 124)))
            assert not np.array_equal(a, c)

    def test_substreams_independent_of_order(self):
        x = [rng_for(7, 3, i).standard_normal() for i in range(5)]
        y = [rng_for(7, 3, i).standard_normal() for i in reversed(range(5))][::-1]
        assert x == y
        assert rng_for(7, 3, 0).standard_normal() != rng_for(7, 4, 0).standard_normal()

    def test_invalid_spec(self):
        with pytest.raises(ValidationError):
            SampleSpec("wishart", 3, 1)
        with pytest.raises(ValidationError):
            SampleSpec("gue_hermitian", 0, 1)
