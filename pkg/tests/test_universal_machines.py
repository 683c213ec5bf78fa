import itertools
import math

import numpy as np
import pytest

from clonot.cloning_machine import fidelity_clone, fidelity_not
from clonot.conservation import CloneSpec
from clonot.fock_algebra import QubitAmplitudes
from clonot.universal_machines import (
    DensityOperator,
    haar_moment,
    haar_moment_estimate,
    haar_states,
    normalization_trace,
    optimal_clone_fidelity,
    optimal_clone_fidelity_exact,
    optimal_not_fidelity,
    projection_cloner,
    reduced_first_qubit,
    single_copy_fidelity,
    sym_projector,
    universality_check,
    zeros_distribution,
)

ZERO = np.array([1.0, 0.0])


def permutation_average(copies):
    """(1/n!) sum over qubit permutations, built from explicit index maps."""
    dim = 2**copies
    out = np.zeros((dim, dim))
    for perm in itertools.permutations(range(copies)):
        P = np.zeros((dim, dim))
        for idx in range(dim):
            bits = [(idx >> (copies - 1 - q)) & 1 for q in range(copies)]
            new = [bits[perm[q]] for q in range(copies)]
            P[int("".join(map(str, new)), 2), idx] = 1
        out += P
    return out / math.factorial(copies)


def dense_cloner(N, M, psi):
    P = permutation_average(M)
    X = np.ones((1, 1))
    for _ in range(N):
        X = np.kron(X, np.outer(psi, psi.conj()))
    X = np.kron(X, np.eye(2 ** (M - N)))
    Y = P @ X @ P
    return Y / np.trace(Y)


def partial_trace_loop(rho, n):
    out = np.zeros((2, 2), dtype=complex)
    rest = 2 ** (n - 1)
    for i in range(2):
        for j in range(2):
            out[i, j] = sum(rho[i * rest + k, j * rest + k] for k in range(rest))
    return out


class TestDensityOperator:
    def test_rejects_non_hermitian(self):
        with pytest.raises(ValueError, match="Hermitian"):
            DensityOperator(np.array([[0.5, 0.1], [0.0, 0.5]]))

    def test_rejects_bad_trace(self):
        with pytest.raises(ValueError, match="trace"):
            DensityOperator(np.eye(2))

    def test_rejects_negative(self):
        with pytest.raises(ValueError, match="negative"):
            DensityOperator(np.diag([1.5, -0.5]))


class TestSymProjector:
    def test_single_copy(self):
        P = sym_projector(1)
        assert np.array_equal(P.matrix, np.eye(2)) and P.rank == 2

    def test_singlet_annihilated(self):
        P = sym_projector(2)
        singlet = np.array([0, 1, -1, 0]) / math.sqrt(2)
        assert P.rank == 3
        assert np.abs(P.matrix @ singlet).max() <= 1e-15

    @pytest.mark.parametrize("copies", range(1, 7))
    def test_idempotent_hermitian_rank(self, copies):
        P = sym_projector(copies).matrix
        assert np.abs(P @ P - P).max() <= 1e-13
        assert np.abs(P - P.conj().T).max() <= 1e-12
        assert np.linalg.matrix_rank(P) == copies + 1

    @pytest.mark.parametrize("copies", range(1, 5))
    def test_matches_permutation_average(self, copies):
        assert np.abs(sym_projector(copies).matrix - permutation_average(copies)).max() <= 1e-13

    def test_cap(self):
        with pytest.raises(ValueError):
            sym_projector(13)


class TestHaarMoment:
    def test_one_copy_maximally_mixed(self):
        assert np.allclose(haar_moment(1).matrix, np.eye(2) / 2, atol=1e-15)

    @pytest.mark.parametrize("copies", [2, 3])
    def test_monte_carlo(self, copies):
        exact = haar_moment(copies).matrix
        assert abs(np.trace(exact) - 1) <= 1e-12
        mean, se_re, se_im = haar_moment_estimate(copies, 100_000, np.random.default_rng(2024))
        assert np.all(np.abs(mean.real - exact.real) <= 3 * se_re + 1e-12)
        assert np.all(np.abs(mean.imag - exact.imag) <= 3 * se_im + 1e-12)


class TestProjectionCloner:
    def test_normalization_trace(self):
        assert normalization_trace(1, 2, ZERO) == pytest.approx(1.5, abs=1e-14)

    def test_one_to_two_output(self):
        psi_plus = np.array([0, 1, 1, 0]) / math.sqrt(2)
        expected = 2 / 3 * np.diag([1.0, 0, 0, 0]) + 1 / 3 * np.outer(psi_plus, psi_plus)
        assert np.abs(projection_cloner(1, 2, ZERO).matrix - expected).max() <= 1e-15

    @pytest.mark.parametrize("N,M", [(1, 2), (1, 3), (2, 3), (2, 4), (1, 4)])
    def test_matches_dense_construction(self, N, M):
        psi = haar_states(np.random.default_rng(N * 10 + M), 1)[0]
        assert np.abs(projection_cloner(N, M, psi).matrix - dense_cloner(N, M, psi)).max() <= 1e-12

    def test_symmetric_support(self):
        for N, M in [(1, 3), (2, 5)]:
            rho = projection_cloner(N, M, ZERO).matrix
            P = sym_projector(M).matrix
            assert np.abs(P @ rho @ P - rho).max() <= 1e-13

    def test_normalization_input_independent(self):
        rng = np.random.default_rng(9)
        for N, M in [(1, 2), (2, 5), (3, 6)]:
            ref = normalization_trace(N, M, ZERO)
            traces = [normalization_trace(N, M, psi) for psi in haar_states(rng, 100)]
            assert max(abs(t - ref) / ref for t in traces) <= 1e-10

    def test_caps_and_inputs(self):
        with pytest.raises(ValueError):
            projection_cloner(1, 11, ZERO)
        with pytest.raises(ValueError):
            projection_cloner(2, 2, ZERO)
        with pytest.raises(ValueError, match="normalized"):
            projection_cloner(1, 2, [1.0, 1.0])

    def test_accepts_qubit_amplitudes(self):
        q = QubitAmplitudes(0.6, 0.8j)
        assert single_copy_fidelity(projection_cloner(1, 2, q), q) == pytest.approx(5 / 6, abs=1e-12)


class TestSingleCopyFidelity:
    @pytest.mark.parametrize("N,M,value", [(1, 2, 5 / 6), (2, 3, 11 / 12)])
    def test_examples(self, N, M, value):
        assert single_copy_fidelity(projection_cloner(N, M, ZERO), ZERO) == pytest.approx(value, abs=1e-12)

    def test_perfect_copies(self):
        rho = np.zeros((8, 8))
        rho[0, 0] = 1
        assert single_copy_fidelity(DensityOperator(rho), ZERO) == 1

    def test_partial_trace_matches_loop(self):
        psi = haar_states(np.random.default_rng(3), 1)[0]
        rho = projection_cloner(2, 4, psi)
        assert np.abs(reduced_first_qubit(rho) - partial_trace_loop(rho.matrix, 4)).max() <= 1e-14

    def test_non_symmetric_rejected(self):
        rho = np.zeros((4, 4))
        rho[1, 1] = 1
        with pytest.raises(ValueError, match="symmetric"):
            single_copy_fidelity(DensityOperator(rho), ZERO)

    def test_all_cases(self):
        rng = np.random.default_rng(17)
        for M in range(2, 11):
            for N in range(1, M):
                psi = haar_states(rng, 1)[0]
                f = single_copy_fidelity(projection_cloner(N, M, psi), psi)
                assert abs(f - optimal_clone_fidelity(N, M)) <= 1e-9


class TestZerosDistribution:
    def test_one_to_two(self):
        d = zeros_distribution(projection_cloner(1, 2, ZERO), CloneSpec.canonical(1, 2))
        assert d.p[2] == pytest.approx(2 / 3, abs=1e-15)
        assert d.p[1] == pytest.approx(1 / 3, abs=1e-15)

    def test_perfect_copy(self):
        rho = np.zeros((8, 8))
        rho[0, 0] = 1
        d = zeros_distribution(DensityOperator(rho), CloneSpec.canonical(1, 3))
        assert d.p[3] == 1

    def test_mass_below_N_rejected(self):
        rho = np.zeros((8, 8))
        rho[7, 7] = 1
        with pytest.raises(ValueError, match="fewer than N"):
            zeros_distribution(DensityOperator(rho), CloneSpec.canonical(1, 3))

    def test_consistent_with_single_copy_fidelity(self):
        for N, M in [(1, 2), (1, 5), (3, 7), (6, 10)]:
            rho = projection_cloner(N, M, ZERO)
            d = zeros_distribution(rho, CloneSpec.canonical(N, M))
            assert abs(fidelity_clone(d) - single_copy_fidelity(rho, ZERO)) <= 1e-12
            assert abs(fidelity_not(d) - optimal_not_fidelity(N)) <= 1e-9


class TestClosedForms:
    def test_clone(self):
        assert optimal_clone_fidelity_exact(1, 2) == pytest.approx(5 / 6)
        assert optimal_clone_fidelity(2, 3) == pytest.approx(11 / 12, abs=1e-15)
        assert optimal_clone_fidelity(1, 10**6) == pytest.approx(0.666667, abs=1e-6)

    def test_not(self):
        assert optimal_not_fidelity(1) == pytest.approx(2 / 3)
        assert optimal_not_fidelity(2) == 0.75

    def test_invalid(self):
        with pytest.raises(ValueError):
            optimal_clone_fidelity(2, 2)
        with pytest.raises(ValueError):
            optimal_not_fidelity(0)


class TestUniversality:
    def test_one_to_two(self):
        assert universality_check(1, 2, 100, seed=0) <= 1e-9

    def test_two_to_four(self):
        assert universality_check(2, 4, 50, seed=1) <= 1e-9

    def test_deterministic(self):
        assert universality_check(1, 3, 2, seed=5) == universality_check(1, 3, 2, seed=5)

    def test_too_few_samples(self):
        with pytest.raises(ValueError):
            universality_check(1, 2, 1, seed=0)
