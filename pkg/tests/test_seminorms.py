"""Seminorm evaluators and their cross-checks.

BMO values for the indicator and truncated-log families were computed by
hand from the disk census (16/27 and 52/81 are exact fractions); character
Besov values come from the geometric-sum closed form, and the shift-integral
value for a level-1 character reduces to |omega - 1| = sqrt(3) times a
two-term weight.
"""

import math

import numpy as np
import pytest

from pqcalc.function_space import (
    LocallyConstantFn,
    character,
    fourier_forward,
    indicator,
    log_norm,
    promote,
    random_spectrum,
    random_values,
)
from pqcalc.operators import derivative_matrix
from pqcalc.padic_core import enumerate_dual, prufer_reduce
from pqcalc.seminorms import (
    SeminormReport,
    besov_bmo_refined_sequence,
    besov_seminorm_discrete,
    besov_seminorm_integral,
    bmo_oscillation_sequence,
    bmo_seminorm,
    disk_mean,
    seminorm_report,
    sobolev_half_norm,
)


def constant_fn(p, level, value=1.0):
    return LocallyConstantFn(p, level, np.full(p**level, value, dtype=complex))


class TestSobolevHalf:
    def test_constant_in_kernel(self):
        # forward transform leaves ~1e-16 dust in the nonzero bins
        assert sobolev_half_norm(fourier_forward(constant_fn(3, 2, 2.5))) <= 1e-14

    def test_single_character(self):
        for p, k in [(3, 1), (3, 2), (5, 1)]:
            f = character(prufer_reduce(1, k, p))
            got = sobolev_half_norm(fourier_forward(f))
            assert math.isclose(got, math.sqrt(p**k), rel_tol=1e-12)

    def test_true_trace_constant_per_character(self):
        # The Frobenius mass of d chi_a is 2(|a| + |a|/p - 1), which matches
        # 2 |a| only at |a| = p; the seminorm keeps the plain |a| weight.
        for p, k in [(3, 1), (3, 2), (5, 2)]:
            f = character(prufer_reduce(1, k, p))
            D = derivative_matrix(fourier_forward(f), k)
            frob2 = float(np.linalg.norm(D.matrix, "fro") ** 2)
            norm = p**k
            assert math.isclose(frob2, 2.0 * (norm + norm // p - 1), rel_tol=1e-12)

    def test_frobenius_vs_weighted_energy(self):
        # exact relation on any spectrum: sum of per-character masses
        f = random_values(3, 2, seed=60)
        spec = fourier_forward(f)
        D = derivative_matrix(spec, 2)
        frob2 = float(np.linalg.norm(D.matrix, "fro") ** 2)
        expected = 0.0
        for a in enumerate_dual(3, 2):
            if a.is_zero:
                continue
            expected += 2.0 * (a.norm + a.norm // 3 - 1) * abs(spec[a]) ** 2
        assert math.isclose(frob2, expected, rel_tol=1e-10)

    def test_level_one_hilbert_schmidt_identity(self):
        # at level 1 the Frobenius mass is exactly twice the squared seminorm
        f = random_values(5, 1, seed=61)
        spec = fourier_forward(f)
        D = derivative_matrix(spec, 1)
        frob2 = float(np.linalg.norm(D.matrix, "fro") ** 2)
        assert math.isclose(frob2, 2.0 * sobolev_half_norm(spec) ** 2, rel_tol=1e-10)


class TestDiskMean:
    def test_full_disk_is_global_mean(self):
        f = random_values(3, 2, seed=62)
        assert np.isclose(disk_mean(f, 0, 0), fourier_forward(f).coeffs[0])

    def test_constant_disk(self):
        f = indicator(3, 0, 1, 2)
        assert disk_mean(f, 0, 1) == pytest.approx(1.0)
        assert disk_mean(f, 1, 1) == pytest.approx(0.0)

    def test_character_averages_out_on_coarse_disks(self):
        f = character(prufer_reduce(1, 2, 3))
        for k in (0, 1):
            for c in range(3**k):
                assert abs(disk_mean(f, c, k)) <= 1e-12

    def test_finer_than_level_reads_value(self):
        f = random_values(3, 1, seed=63)
        assert disk_mean(f, 4, 2) == complex(f.values[4 % 3])

    def test_range_errors(self):
        f = random_values(3, 1, seed=64)
        with pytest.raises(ValueError):
            disk_mean(f, 3, 1)
        with pytest.raises(ValueError):
            disk_mean(f, -1, 0)
        with pytest.raises(ValueError):
            disk_mean(f, 0, -1)


class TestBMO:
    def test_constant_zero(self):
        assert bmo_seminorm(constant_fn(5, 2, 3 - 4j)) == 0.0
        assert bmo_oscillation_sequence(constant_fn(3, 2)) == [0.0, 0.0, 0.0]

    def test_frozen_indicator(self):
        assert math.isclose(bmo_seminorm(indicator(3, 0, 1, 1)), 4.0 / 9.0, rel_tol=1e-12)

    def test_frozen_log_norm_family(self):
        assert math.isclose(bmo_seminorm(log_norm(3, 1)), 4.0 / 9.0, rel_tol=1e-12)
        assert math.isclose(bmo_seminorm(log_norm(3, 2)), 16.0 / 27.0, rel_tol=1e-12)
        assert math.isclose(bmo_seminorm(log_norm(3, 3)), 52.0 / 81.0, rel_tol=1e-12)

    @pytest.mark.parametrize("p,level,seed", [(3, 2, 65), (5, 1, 66), (3, 3, 67)])
    def test_matches_disk_census(self, p, level, seed):
        # independent route: loop every disk through disk_mean
        f = random_values(p, level, seed=seed)
        per_scale = []
        for k in range(level + 1):
            worst = 0.0
            for c in range(p**k):
                mean = disk_mean(f, c, k)
                block = f.values[c :: p**k]
                worst = max(worst, float(np.abs(block - mean).mean()))
            per_scale.append(worst)
        expected = [max(per_scale[k:]) for k in range(level + 1)]
        got = bmo_oscillation_sequence(f)
        assert np.allclose(got, expected, atol=1e-12)

    def test_sequence_shape(self):
        f = random_values(3, 2, seed=68)
        seq = bmo_oscillation_sequence(f)
        assert len(seq) == 3
        assert all(a >= b - 1e-15 for a, b in zip(seq, seq[1:]))
        assert seq[-1] == 0.0

    def test_vanishes_at_own_level_after_promotion(self):
        f = promote(random_values(3, 1, seed=69), 3)
        seq = bmo_oscillation_sequence(f)
        # disk means of equal values can differ from them by an ulp
        assert all(x <= 1e-14 for x in seq[1:])

    def test_bounded_by_twice_sup(self):
        for seed in (70, 71):
            f = random_values(3, 2, seed=seed)
            assert bmo_seminorm(f) <= 2.0 * f.norm_inf() + 1e-12


class TestBesovDiscrete:
    def test_constant_zero(self):
        assert besov_seminorm_discrete(constant_fn(3, 2), 2, 2, 0.5) == 0.0

    @pytest.mark.parametrize(
        "p,k,q", [(3, 1, 1.0), (3, 2, 2.0), (3, 3, 1.0), (5, 1, 4.0), (5, 2, 2.0)]
    )
    def test_character_closed_form(self, p, k, q):
        f = character(prufer_reduce(1, k, p))
        got = besov_seminorm_discrete(f, q, q, 1.0 / q)
        want = ((p**k - 1) / (p - 1)) ** (1.0 / q)
        assert math.isclose(got, want, rel_tol=1e-12)

    def test_sup_form(self):
        f = character(prufer_reduce(1, 2, 3))
        got = besov_seminorm_discrete(f, 2, math.inf, 0.5)
        # sup of p^(n/2) * 1 over n = 0, 1
        assert math.isclose(got, math.sqrt(3.0), rel_tol=1e-12)

    def test_q_infinity_allowed(self):
        f = character(prufer_reduce(1, 1, 3))
        got = besov_seminorm_discrete(f, math.inf, 1, 1.0)
        assert math.isclose(got, 1.0, rel_tol=1e-12)

    def test_promote_invariance(self):
        f = random_values(3, 2, seed=72)
        a = besov_seminorm_discrete(f, 2, 2, 0.5)
        b = besov_seminorm_discrete(promote(f, 4), 2, 2, 0.5)
        assert math.isclose(a, b, rel_tol=1e-10)

    def test_bad_parameters(self):
        f = constant_fn(3, 1)
        with pytest.raises(ValueError):
            besov_seminorm_discrete(f, 0.5, 2, 0.5)
        with pytest.raises(ValueError):
            besov_seminorm_discrete(f, 2, 0.0, 0.5)
        with pytest.raises(ValueError):
            besov_seminorm_discrete(f, 2, 2, 0.0)


class TestBesovIntegral:
    def test_constant_zero(self):
        assert besov_seminorm_integral(constant_fn(3, 2), 2, 2, 0.5) == 0.0

    @pytest.mark.parametrize("q,r,s", [(1.0, 1.0, 1.0), (2.0, 2.0, 0.5), (2.0, 3.0, 0.25)])
    def test_level_one_character(self, q, r, s):
        f = character(prufer_reduce(1, 1, 3))
        got = besov_seminorm_integral(f, q, r, s)
        want = math.sqrt(3.0) * (2.0 / 3.0) ** (1.0 / r)
        assert math.isclose(got, want, rel_tol=1e-12)

    def test_shift_invariance(self):
        f = random_values(3, 2, seed=73)
        g = LocallyConstantFn(3, 2, np.roll(f.values, 4))
        a = besov_seminorm_integral(f, 2, 2, 0.5)
        b = besov_seminorm_integral(g, 2, 2, 0.5)
        assert math.isclose(a, b, rel_tol=1e-12)

    def test_promote_invariance(self):
        f = random_values(3, 2, seed=74)
        a = besov_seminorm_integral(f, 1, 1, 1.0)
        b = besov_seminorm_integral(promote(f, 3), 1, 1, 1.0)
        assert math.isclose(a, b, rel_tol=1e-10)

    def test_infinite_exponents_rejected(self):
        f = constant_fn(3, 1)
        with pytest.raises(ValueError):
            besov_seminorm_integral(f, math.inf, 2, 0.5)
        with pytest.raises(ValueError):
            besov_seminorm_integral(f, 2, math.inf, 0.5)

    @pytest.mark.parametrize("q", [1.0, 2.0, 4.0])
    def test_comparable_to_discrete(self, q):
        # equivalence-of-seminorms: bounded ratio on a small ensemble
        for seed in range(5):
            g = random_spectrum(3, 2, gamma=1.0, seed=seed)
            d = besov_seminorm_discrete(g, q, q, 1.0 / q)
            i = besov_seminorm_integral(g, q, q, 1.0 / q)
            assert 0.5 * d <= i <= 2.0 * d


class TestRefinedSequence:
    def test_constant_zero(self):
        assert besov_bmo_refined_sequence(constant_fn(3, 2), 2) == 0.0

    def test_terms_vanish_past_level(self):
        f = promote(random_values(3, 1, seed=75), 2)
        a = besov_bmo_refined_sequence(f, 2)
        b = besov_bmo_refined_sequence(promote(f, 3), 2)
        assert math.isclose(a, b, rel_tol=1e-10)

    def test_smoothing_difference_bmo_bound(self):
        from pqcalc.function_space import conditional_expectation

        f = random_values(3, 2, seed=76)
        for n in range(3):
            diff = f - conditional_expectation(f, n)
            assert bmo_seminorm(diff) <= 2.0 * diff.norm_inf() + 1e-12

    @pytest.mark.parametrize("q", [1.0, 2.0, 4.0])
    def test_comparable_to_discrete(self, q):
        for seed in range(5):
            g = random_spectrum(3, 2, gamma=1.0, seed=seed)
            d = besov_seminorm_discrete(g, q, q, 1.0 / q)
            r = besov_bmo_refined_sequence(g, q)
            assert 0.5 * d <= r <= 2.0 * d

    def test_bad_exponent(self):
        with pytest.raises(ValueError):
            besov_bmo_refined_sequence(constant_fn(3, 1), 0.5)
        with pytest.raises(ValueError):
            besov_bmo_refined_sequence(constant_fn(3, 1), math.inf)


EVALUATORS = [
    lambda f: sobolev_half_norm(fourier_forward(f)),
    bmo_seminorm,
    lambda f: besov_seminorm_discrete(f, 2, 2, 0.5),
    lambda f: besov_seminorm_integral(f, 2, 2, 0.5),
    lambda f: besov_bmo_refined_sequence(f, 2),
]


class TestSeminormAxioms:
    @pytest.mark.parametrize("idx", range(len(EVALUATORS)))
    def test_homogeneity_and_triangle(self, idx):
        norm = EVALUATORS[idx]
        f = random_values(3, 2, seed=77)
        g = random_values(3, 2, seed=78)
        scaled = LocallyConstantFn(3, 2, (1.5 - 2.0j) * f.values)
        assert math.isclose(norm(scaled), abs(1.5 - 2.0j) * norm(f), rel_tol=1e-10)
        assert norm(f + g) <= norm(f) + norm(g) + 1e-10

    @pytest.mark.parametrize("idx", range(len(EVALUATORS)))
    def test_constants_in_kernel(self, idx):
        assert EVALUATORS[idx](constant_fn(3, 2, 2.0 - 1.0j)) <= 1e-14


class TestReport:
    def test_report_structure(self):
        f = log_norm(3, 2)
        rep = seminorm_report(f, fourier_forward(f), [(2.0, 2.0, 0.5), (2.0, math.inf, 0.5)])
        assert rep.p == 3 and rep.level == 2
        assert math.isclose(rep.bmo, 16.0 / 27.0, rel_tol=1e-12)
        assert len(rep.vmo_sequence) == 3
        doc = rep.to_json_dict()
        assert set(doc) == {"sobolev_half", "bmo", "vmo_sequence", "besov"}
        rows = doc["besov"]
        assert len(rows) == 2
        by_r = {row["r"]: row for row in rows}
        assert by_r["inf"]["integral"] is None
        assert by_r[2.0]["integral"] is not None
