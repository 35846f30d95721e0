"""Operator-layer tests: symmetry action, commutator derivative, exact rank.

Dense matrices, the matrix-free path, the exact-arithmetic rank, and the
kernel-convolution oracle are all separate routes; tests cross those routes
against each other and against hand-computed fixtures.
"""

from fractions import Fraction

import numpy as np
import pytest

from pqcalc.function_space import (
    FourierSpectrum,
    character,
    fourier_coefficients,
    fourier_forward,
    random_values,
    sgn_table,
)
from pqcalc.operators import (
    DENSE_CAP,
    calibrate_kernel_gamma,
    character_derivative,
    derivative_apply,
    derivative_matrix,
    derivative_operator_matrix_free,
    exact_rank,
    exact_rows_from_spectrum,
    gauss_sum,
    hilbert_apply,
    hilbert_kernel_apply,
    hilbert_matrix,
    hilbert_operator,
    kernel_values,
    multiplication_matrix,
    numerical_rank,
    reference_gamma,
)
from pqcalc.padic_core import dual_index, enumerate_dual, legendre_symbol, prufer_reduce


def _character_spectrum(a, level):
    return FourierSpectrum.from_entries(a.p, level, [(a, 1.0)])


class TestHilbertAction:
    def test_constant_annihilated(self):
        spec = FourierSpectrum(3, 1, [5.0, 0.0, 0.0])
        out = hilbert_apply(spec)
        assert np.allclose(out.coeffs, 0.0)

    def test_character_eigenvalues(self):
        plus = _character_spectrum(prufer_reduce(1, 1, 3), 1)
        minus = _character_spectrum(prufer_reduce(2, 1, 3), 1)
        assert np.allclose(hilbert_apply(plus).coeffs, plus.coeffs)
        assert np.allclose(hilbert_apply(minus).coeffs, -minus.coeffs)

    @pytest.mark.parametrize("p,n", [(3, 2), (5, 1), (7, 1)])
    def test_twice_is_identity_minus_mean_projection(self, p, n):
        size = p**n
        for t in range(size):
            e = np.zeros(size)
            e[t] = 1.0
            spec = FourierSpectrum(p, n, e)
            twice = hilbert_apply(hilbert_apply(spec)).coeffs
            expect = e.copy()
            expect[0] = 0.0
            assert np.array_equal(twice, expect.astype(complex))

    def test_operator_object_and_matrix(self):
        op = hilbert_operator(3, 2)
        assert op.diagonal.tolist() == [0, 1, -1, 1, 1, -1, -1, 1, -1]
        m = hilbert_matrix(3, 2)
        spec = FourierSpectrum(3, 2, np.arange(9, dtype=float))
        assert np.allclose(m @ spec.coeffs, op.apply(spec).coeffs)


class TestDerivativeMatrix:
    def test_frozen_character_matrix_p3(self):
        D = derivative_matrix(_character_spectrum(prufer_reduce(1, 1, 3), 1), 1)
        expect = np.array([[0, 0, -1], [-1, 0, 0], [0, 2, 0]], dtype=complex)
        assert np.allclose(D.matrix, expect)

    def test_constant_gives_zero_matrix(self):
        spec = FourierSpectrum(3, 2, np.eye(1, 9, 0).ravel() * 7.0)
        D = derivative_matrix(spec, 2)
        assert np.allclose(D.matrix, 0.0)

    @pytest.mark.parametrize("p,n", [(3, 2), (5, 1)])
    def test_single_character_action(self, p, n):
        # column alpha of d(chi_a) holds (sgn(alpha) - sgn(alpha + a)) at row alpha + a
        for a in enumerate_dual(p, n):
            if a.is_zero:
                continue
            D = derivative_matrix(_character_spectrum(a, n), n)
            for t, alpha in enumerate(enumerate_dual(p, n)):
                col = D.matrix[:, t]
                target = alpha + a
                s = target.num * p ** (n - target.level) if not target.is_zero else 0
                expect = np.zeros(p**n, dtype=complex)
                expect[s] = alpha.sgn - target.sgn
                assert np.allclose(col, expect)

    def test_equal_sign_entries_vanish(self):
        f = random_values(3, 2, seed=1)
        D = derivative_matrix(fourier_forward(f), 2)
        sgn = sgn_table(3, 2)
        same = sgn[None, :] == sgn[:, None]
        assert np.allclose(D.matrix[same], 0.0)
        assert np.allclose(np.diag(D.matrix), 0.0)

    def test_level_cap_enforced(self):
        f = random_values(3, 1, seed=2)
        with pytest.raises(ValueError):
            derivative_matrix(fourier_forward(f), 7)  # 3^7 = 2187 > cap
        op = derivative_operator_matrix_free(f, 7)
        assert op.matrix is None and op.size == 3**7 > DENSE_CAP


class TestMatrixFreePath:
    @pytest.mark.parametrize("p,n", [(3, 2), (3, 3), (5, 2)])
    def test_apply_matches_dense(self, p, n):
        rng = np.random.default_rng((p, n, 13))
        f = random_values(p, n, seed=(p, n, 14))
        D = derivative_matrix(fourier_forward(f), n)
        for _ in range(3):
            v = rng.standard_normal(p**n) + 1j * rng.standard_normal(p**n)
            dense = D.matrix @ v
            free = D.apply(v)
            assert np.max(np.abs(dense - free)) <= 1e-10 * max(1.0, np.max(np.abs(dense)))

    def test_adjoint_matches_dense_hermitian(self):
        f = random_values(3, 2, seed=15)
        D = derivative_matrix(fourier_forward(f), 2)
        v = np.random.default_rng(16).standard_normal(9) + 0j
        assert np.allclose(D.matrix.conj().T @ v, D.apply_adjoint(v), atol=1e-12)

    def test_derivative_apply_example_action(self):
        a = prufer_reduce(1, 1, 3)
        f = character(a, 2)
        for alpha in enumerate_dual(3, 2):
            v = _character_spectrum(alpha, 2)
            out = derivative_apply(f, v, 2)
            target = alpha + a
            expect = FourierSpectrum.from_entries(
                3, 2, [(target, alpha.sgn - target.sgn)]
            )
            assert np.max(np.abs(out.coeffs - expect.coeffs)) < 1e-12

    def test_mixed_levels_promoted(self):
        f = random_values(3, 1, seed=17)
        v = fourier_forward(random_values(3, 2, seed=18))
        out = derivative_apply(f, v, 3)
        D = derivative_matrix(fourier_forward(f.promote(3)), 3)
        assert np.allclose(out.coeffs, D.matrix @ v.promote(3).coeffs, atol=1e-10)


class TestAlgebraicIdentities:
    @pytest.mark.parametrize("p,n", [(3, 2), (5, 2)])
    def test_leibniz(self, p, n):
        f = random_values(p, n, seed=(p, n, 19))
        g = random_values(p, n, seed=(p, n, 20))
        Df = derivative_matrix(fourier_forward(f), n).matrix
        Dg = derivative_matrix(fourier_forward(g), n).matrix
        Mf = multiplication_matrix(fourier_forward(f), n)
        Mg = multiplication_matrix(fourier_forward(g), n)
        Dfg = derivative_matrix(fourier_forward(f * g), n).matrix
        lhs = Dfg
        rhs = Df @ Mg + Mf @ Dg
        scale = max(1.0, np.max(np.abs(lhs)))
        assert np.max(np.abs(lhs - rhs)) <= 1e-10 * scale

    @pytest.mark.parametrize("p,n", [(3, 2), (5, 1), (7, 1)])
    def test_skew_adjoint_for_real_functions(self, p, n):
        f = random_values(p, n, seed=(p, n, 21))
        real_f = (f + f.conj()) * 0.5
        D = derivative_matrix(fourier_forward(real_f), n).matrix
        assert np.max(np.abs(D + D.conj().T)) <= 1e-12

    def test_adjoint_is_negated_conjugate_derivative(self):
        f = random_values(3, 2, seed=22)
        D = derivative_matrix(fourier_forward(f), 2).matrix
        Dc = derivative_matrix(fourier_forward(f.conj()), 2).matrix
        assert np.allclose(D.conj().T, -Dc, atol=1e-12)

    @pytest.mark.parametrize("p,n", [(3, 2), (5, 2), (7, 1)])
    def test_operator_norm_bound(self, p, n):
        f = random_values(p, n, seed=(p, n, 23))
        D = derivative_matrix(fourier_forward(f), n).matrix
        sigma1 = np.linalg.svd(D, compute_uv=False)[0]
        assert sigma1 <= 2.0 * f.norm_inf() + 1e-12

    def test_multiplication_matrix_consistency(self):
        f = random_values(3, 2, seed=24)
        g = random_values(3, 2, seed=25)
        M = multiplication_matrix(fourier_forward(f), 2)
        prod_direct = fourier_coefficients(f * g)
        prod_matrix = M @ fourier_coefficients(g)
        assert np.allclose(prod_direct, prod_matrix, atol=1e-12)


class TestExactRank:
    # Frozen against a brute-force census of sign flips: rank(d chi_a) is
    # 2 + #{alpha : sgn(alpha) != sgn(alpha + a)} over nonboundary classes,
    # which comes out to (|a| + |a|/p + 2)/2, NOT (|a| + 3)/2 once |a| >= p^2.
    # The extra (|a|/p - 1)/2 flips live on the shells below |a|, where
    # sgn(alpha + a) is pinned to sgn's value on the leading digit of a while
    # sgn(alpha) still takes both signs equally often.
    def test_frozen_ranks(self):
        assert exact_rank(character_derivative(prufer_reduce(1, 1, 3))) == 3
        assert exact_rank(character_derivative(prufer_reduce(1, 2, 3))) == 7
        assert exact_rank(character_derivative(prufer_reduce(1, 3, 3))) == 19
        assert exact_rank(character_derivative(prufer_reduce(1, 1, 5))) == 4
        assert exact_rank(character_derivative(prufer_reduce(1, 2, 5))) == 16
        assert exact_rank(character_derivative(prufer_reduce(2, 1, 7))) == 5

    @pytest.mark.parametrize("p,level", [(3, 2), (3, 3), (5, 2), (7, 1)])
    def test_rank_matches_flip_census(self, p, level):
        # Two independent routes: exact elimination over Z[i] versus a direct
        # count of the columns the commutator can populate.
        size = p**level
        sgn = sgn_table(p, level)
        for a in enumerate_dual(p, level):
            if a.is_zero:
                continue
            shift = dual_index(a, level)
            cols = np.arange(size)
            flips = int(np.count_nonzero(sgn[cols] != sgn[(cols + shift) % size]))
            got = exact_rank(character_derivative(a, level))
            assert got == flips
            norm = a.norm
            assert got == (norm + norm // p + 2) // 2

    def test_rank_stable_under_embedding(self):
        a = prufer_reduce(2, 1, 3)
        assert exact_rank(character_derivative(a, 1)) == 3
        assert exact_rank(character_derivative(a, 2)) == 3
        assert exact_rank(character_derivative(a, 3)) == 3

    @pytest.mark.parametrize("p", [3, 5])
    def test_exact_vs_numerical_rank(self, p):
        for a in enumerate_dual(p, 2):
            if a.is_zero:
                continue
            D = character_derivative(a, 2)
            assert exact_rank(D) == numerical_rank(D)

    def test_exact_rows_match_dense(self):
        a = prufer_reduce(2, 2, 5)
        D = character_derivative(a, 2)
        rebuilt = np.zeros((25, 25), dtype=complex)
        for s, row in enumerate(D.exact_rows):
            for t, (re, im) in row.items():
                rebuilt[s, t] = re + 1j * im
        assert np.allclose(rebuilt, D.matrix)

    def test_rational_spectrum_rank(self):
        entries = {
            1: (Fraction(1, 3), Fraction(0)),
            3: (Fraction(-2, 5), Fraction(1, 7)),
        }
        rows = exact_rows_from_spectrum(entries, 3, 2)
        from pqcalc.operators import _gaussian_rank

        got = _gaussian_rank(rows)
        coeffs = np.zeros(9, dtype=complex)
        coeffs[1] = 1.0 / 3.0
        coeffs[3] = -2.0 / 5.0 + 1j / 7.0
        D = derivative_matrix(FourierSpectrum(3, 2, coeffs), 2)
        assert got == numerical_rank(D)

    def test_zero_spectrum_rank_zero(self):
        from pqcalc.operators import _gaussian_rank

        assert _gaussian_rank(exact_rows_from_spectrum({0: (Fraction(1), Fraction(0))}, 3, 1)) == 0
        assert _gaussian_rank([{}, {}, {}]) == 0

    def test_missing_exact_representation_rejected(self):
        f = random_values(3, 1, seed=26)
        D = derivative_matrix(fourier_forward(f), 1)
        with pytest.raises(ValueError):
            exact_rank(D)

    def test_numerical_rank_zero_matrix(self):
        spec = FourierSpectrum(3, 1, [1.0, 0, 0])
        assert numerical_rank(derivative_matrix(spec, 1)) == 0


class TestKernelOracle:
    def test_kernel_table_frozen_p3(self):
        # z = 1..8 at level 2: valuations (0,0,1,0,0,1,0,0), leading digits
        # (1,2,1,1,2,2,1,2) -> signs (1,-1,1,1,-1,-1,1,-1) scaled by p^v
        K = kernel_values(3, 2)
        assert K.tolist() == [0.0, 1.0, -1.0, 3.0, 1.0, -1.0, -3.0, 1.0, -1.0]

    def test_constant_maps_near_zero(self):
        f = character(prufer_reduce(0, 0, 3), 2)
        out = hilbert_kernel_apply(f, 2, gamma=1.0)
        assert np.max(np.abs(out.values)) < 1e-12

    @pytest.mark.parametrize("p", [3, 5, 7])
    def test_calibrated_agreement_all_characters(self, p):
        gamma = calibrate_kernel_gamma(p, 2)
        for a in enumerate_dual(p, 2):
            f = character(a, 2)
            got = hilbert_kernel_apply(f, 2, gamma=gamma)
            expect = a.sgn * f.values
            err = np.max(np.abs(got.values - expect))
            assert err <= 1e-9 * max(1.0, np.max(np.abs(expect)))

    @pytest.mark.parametrize("p", [3, 5, 7, 11])
    def test_calibration_matches_quadratic_sum_analysis(self, p):
        # eigenvalue worked out by hand: (-1|p) * (quadratic sum) / p,
        # independent of the probe character
        gamma = calibrate_kernel_gamma(p, 2)
        analytic = legendre_symbol(-1, p) * gauss_sum(p) / p
        assert abs(gamma - analytic) < 1e-10
        other = calibrate_kernel_gamma(p, 2, probe=prufer_reduce(2, 2, p))
        assert abs(gamma - other) < 1e-10

    @pytest.mark.parametrize("p", [5, 13])
    def test_reference_gamma_values(self, p):
        # p = 1 mod 4: the quadratic sum itself equals sqrt(p)
        assert abs(gauss_sum(p) - reference_gamma(p)) < 1e-9

    @pytest.mark.parametrize("p", [3, 7])
    def test_reference_gamma_values_3mod4(self, p):
        assert abs(gauss_sum(p) - reference_gamma(p)) < 1e-9

    def test_probe_validation(self):
        with pytest.raises(ValueError):
            calibrate_kernel_gamma(3, 2, probe=prufer_reduce(0, 0, 3))
        with pytest.raises(ValueError):
            calibrate_kernel_gamma(3, 1, probe=prufer_reduce(1, 2, 3))
