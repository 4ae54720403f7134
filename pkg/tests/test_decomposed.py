import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from it2fuzzy import presets
from it2fuzzy.core import (
    LinguisticVariable,
    PiecewiseLinearMF,
    Rule,
    RuleBase,
    SampledMF,
    centroid,
    make_triangle,
    sample_mf,
    t1_output,
    zero_mf,
)
from it2fuzzy.decomposed import (
    CombinerResult,
    DecomposedSystem,
    IT2Set,
    IT2Variable,
    UndefinedOutput,
    blur_variable,
    combine_centroid,
    decompose,
    evaluate_paths,
    it2_output,
)
from it2fuzzy.oracle import fou_centroid_bruteforce

SAT = presets.INPUT_SATURATION
DELTA = presets.BLUR_DELTA


def _sampled(mf_vertices_or_mf, lo, hi, n=1001):
    mf = mf_vertices_or_mf
    return sample_mf(mf, lo, hi, n)


class TestBlurVariable:
    def test_zero_delta_is_identity(self):
        var = presets.error_variable()
        blurred = blur_variable(var, 0.0)
        for (label, mf), it2 in zip(var.terms, blurred.terms):
            assert it2.label == label
            assert it2.upper == mf
            assert it2.lower == mf

    def test_full_triangle_blur_arithmetic(self):
        # the centred term widens to +/-(sat + delta) and narrows to
        # +/-(sat - delta), apex fixed at zero
        blurred = blur_variable(presets.error_variable(), DELTA)
        z = {s.label: s for s in blurred.terms}["Z"]
        assert z.upper.vertices == ((-SAT - DELTA, 0.0), (0.0, 1.0), (SAT + DELTA, 0.0))
        assert z.lower.vertices == ((-SAT + DELTA, 0.0), (0.0, 1.0), (SAT - DELTA, 0.0))

    def test_shoulder_blurs_interior_foot_only(self):
        blurred = blur_variable(presets.error_variable(), DELTA)
        n = {s.label: s for s in blurred.terms}["N"]
        # the universe-edge shoulder stays pinned at -sat
        assert n.upper.vertices == ((-SAT, 1.0), (DELTA, 0.0))
        assert n.lower.vertices == ((-SAT, 1.0), (-DELTA, 0.0))

    def test_widening_clips_to_universe(self):
        var = LinguisticVariable("x", (-1.0, 1.0), (("T", make_triangle(-1.0, 0.0, 1.0)),))
        blurred = blur_variable(var, 0.5)
        assert blurred.terms[0].upper.vertices == ((-1.0, 0.0), (0.0, 1.0), (1.0, 0.0))

    def test_narrowing_past_support_degenerates_to_zero(self):
        var = LinguisticVariable("x", (-2.0, 2.0), (("T", make_triangle(-1.0, 0.0, 1.0)),))
        blurred = blur_variable(var, 1.0)
        assert blurred.terms[0].lower == zero_mf(-2.0, 2.0)
        xs = np.linspace(-2, 2, 101)
        assert np.all(blurred.terms[0].lower.sample(xs) == 0.0)

    def test_ordering_invariant_holds_for_every_term(self):
        blurred = blur_variable(presets.error_variable(), DELTA)
        lo, hi = blurred.universe
        xs = np.linspace(lo, hi, 2001)
        for s in blurred.terms:
            assert np.all(s.lower.sample(xs) <= s.upper.sample(xs) + 1e-12)

    def test_negative_delta_rejected(self):
        with pytest.raises(ValueError):
            blur_variable(presets.error_variable(), -0.1)

    def test_non_triangular_term_rejected(self):
        trapezoid = PiecewiseLinearMF(((0.0, 0.0), (1.0, 1.0), (2.0, 1.0), (3.0, 0.0)))
        var = LinguisticVariable("x", (0.0, 3.0), (("T", trapezoid),))
        with pytest.raises(ValueError):
            blur_variable(var, 0.1)
        # zero blur never reshapes, so it accepts any form
        assert blur_variable(var, 0.0).terms[0].upper == trapezoid


class TestIT2Types:
    def test_ordering_violation_rejected(self):
        with pytest.raises(ValueError):
            IT2Set("T", lower=make_triangle(-2, 0, 2), upper=make_triangle(-1, 0, 1))

    def test_terms_must_fit_universe(self):
        good = IT2Set("T", lower=make_triangle(-1, 0, 1), upper=make_triangle(-2, 0, 2))
        with pytest.raises(ValueError):
            IT2Variable("x", (-1.5, 1.5), (good,))

    def test_bound_variables_share_labels(self):
        blurred = blur_variable(presets.error_variable(), DELTA)
        assert blurred.upper_variable.labels == blurred.lower_variable.labels == ("N", "Z", "P")


class TestDecompose:
    def test_builds_two_t1_paths(self, it2_system):
        assert it2_system.upper_path.rulebase == it2_system.lower_path.rulebase
        assert it2_system.upper_path.output == it2_system.lower_path.output
        assert it2_system.upper_path.grid_size == it2_system.lower_path.grid_size == 1001

    def test_zero_delta_paths_identical(self, it2_system_flat):
        assert it2_system_flat.upper_path.inputs == it2_system_flat.lower_path.inputs

    def test_mismatched_consequent_label_rejected(self):
        inputs = (
            blur_variable(presets.error_variable(), DELTA),
            blur_variable(presets.error_rate_variable(), DELTA),
        )
        bad_rules = RuleBase((Rule(("N", "N"), "HUGE"),))
        with pytest.raises(ValueError):
            decompose(inputs, presets.force_variable(), bad_rules)

    def test_it2_output_variable_accepted(self):
        inputs = (
            blur_variable(presets.error_variable(), DELTA),
            blur_variable(presets.error_rate_variable(), DELTA),
        )
        it2_out = blur_variable(presets.force_variable(), 2.0)
        system = decompose(inputs, it2_out, presets.control_rulebase())
        upper, lower = evaluate_paths(system, (0.1, -0.05))
        assert np.all(lower.mu <= upper.mu)

    def test_path_mismatch_rejected(self, t1_system):
        other = presets.pendulum_t1_system(grid_size=501)
        with pytest.raises(ValueError):
            DecomposedSystem(upper_path=t1_system, lower_path=other)


class TestEvaluatePaths:
    def test_zero_delta_paths_agree_exactly(self, it2_system_flat):
        upper, lower = evaluate_paths(it2_system_flat, (0.2, -0.1))
        np.testing.assert_array_equal(upper.mu, lower.mu)

    def test_fou_ordering_pointwise(self, it2_system):
        upper, lower = evaluate_paths(it2_system, (0.1, 0.0))
        assert np.all(lower.mu <= upper.mu)
        assert upper.mu.max() > lower.mu.max()

    def test_blur_band_input_fires_upper_only(self):
        # input outside the narrowed support but inside the widened one
        var = LinguisticVariable("u", (0.0, 4.0), (("T", make_triangle(1.0, 2.0, 3.0)),))
        out = LinguisticVariable("v", (0.0, 4.0), (("O", make_triangle(0.0, 2.0, 4.0)),))
        system = decompose(
            (blur_variable(var, 0.5),), out, RuleBase((Rule(("T",), "O"),)), grid_size=401
        )
        upper, lower = evaluate_paths(system, (1.2,))
        assert np.all(lower.mu == 0.0)
        assert upper.mu.max() > 0.0
        # the combined output then reduces to the upper centroid
        result = combine_centroid(upper, lower)
        assert result.lower_centroid is None
        assert result.crisp == result.upper_centroid


class TestCombineCentroid:
    def test_identical_aggregates_reduce_to_upper_centroid(self, t1_system):
        from it2fuzzy.core import infer

        agg = infer(t1_system, (0.1, -0.2))
        result = combine_centroid(agg, agg)
        assert result.crisp == result.upper_centroid
        c, _ = centroid(agg)
        assert result.crisp == c

    def test_symmetric_nested_triangles(self):
        upper = _sampled(make_triangle(0, 2, 4), 0, 4)
        lower = _sampled(make_triangle(1, 2, 3), 0, 4)
        result = combine_centroid(upper, lower)
        assert result.crisp == pytest.approx(2.0, abs=1e-9)
        assert result.upper_area == pytest.approx(2.0, abs=1e-6)
        assert result.lower_area == pytest.approx(1.0, abs=1e-6)

    def test_asymmetric_pair_against_hand_computation(self):
        # areas 2 and 3/4, centroids 5/3 and 7/6 give
        # (2*5/3 - 3/4*7/6) / (2 - 3/4) = 59/30
        upper = _sampled(make_triangle(0.0, 1.0, 4.0), 0, 4)
        lower = _sampled(make_triangle(0.5, 1.0, 2.0), 0, 4)
        result = combine_centroid(upper, lower)
        assert result.crisp == pytest.approx(59.0 / 30.0, abs=1e-9)

    def test_asymmetric_pair_against_bruteforce(self):
        upper = _sampled(make_triangle(0.0, 1.0, 4.0), 0, 4)
        lower = _sampled(make_triangle(0.5, 1.0, 2.0), 0, 4)
        crisp = combine_centroid(upper, lower).crisp
        assert crisp == pytest.approx(fou_centroid_bruteforce(upper, lower), abs=1e-4 * 4)

    def test_zero_upper_area_is_undefined(self):
        empty = _sampled(zero_mf(0, 1), 0, 1, 101)
        with pytest.raises(UndefinedOutput):
            combine_centroid(empty, empty)

    def test_grid_mismatch_rejected(self):
        a = _sampled(make_triangle(0, 1, 2), 0, 2, 101)
        b = _sampled(make_triangle(0, 1, 2), 0, 2, 201)
        with pytest.raises(ValueError):
            combine_centroid(a, b)

    def test_result_invariants(self, it2_system):
        rng = np.random.default_rng(3)
        lo, hi = it2_system.output_universe
        for e, e_dot in rng.uniform(-SAT, SAT, size=(50, 2)):
            result = combine_centroid(*evaluate_paths(it2_system, (e, e_dot)))
            assert result.upper_area >= result.lower_area >= 0.0
            assert lo <= result.crisp <= hi


class TestIT2Output:
    def test_balanced_input_gives_zero(self, it2_system):
        assert abs(it2_output(it2_system, (0.0, 0.0))) < 1e-6

    def test_antisymmetry(self, it2_system):
        rng = np.random.default_rng(11)
        for e, e_dot in rng.uniform(-SAT, SAT, size=(100, 2)):
            assert it2_output(it2_system, (-e, -e_dot)) == pytest.approx(
                -it2_output(it2_system, (e, e_dot)), abs=1e-6
            )

    def test_zero_blur_collapses_to_t1(self, t1_system, it2_system_flat):
        rng = np.random.default_rng(5)
        for e, e_dot in rng.uniform(-SAT, SAT, size=(200, 2)):
            diff = abs(it2_output(it2_system_flat, (e, e_dot)) - t1_output(t1_system, (e, e_dot)))
            assert diff <= 1e-9

    def test_determinism(self, it2_system):
        first = it2_output(it2_system, (0.07, -0.13))
        second = it2_output(it2_system, (0.07, -0.13))
        assert first == second


class TestGeometricProperties:
    def _pendulum_pair(self, it2_system, e=0.12, e_dot=-0.04):
        return evaluate_paths(it2_system, (e, e_dot))

    def test_translation_equivariance(self, it2_system):
        upper, lower = self._pendulum_pair(it2_system)
        base = combine_centroid(upper, lower).crisp
        for shift in (-12.5, 3.75, 100.0):
            shifted = combine_centroid(
                SampledMF(upper.lo + shift, upper.hi + shift, upper.mu),
                SampledMF(lower.lo + shift, lower.hi + shift, lower.mu),
            ).crisp
            assert shifted == pytest.approx(base + shift, abs=1e-9 * max(1.0, abs(shift)))

    def test_mirror_antisymmetry(self, it2_system):
        upper, lower = self._pendulum_pair(it2_system)
        base = combine_centroid(upper, lower).crisp
        mirrored = combine_centroid(
            SampledMF(upper.lo, upper.hi, upper.mu[::-1]),
            SampledMF(lower.lo, lower.hi, lower.mu[::-1]),
        ).crisp
        midpoint_sum = upper.lo + upper.hi
        assert mirrored == pytest.approx(midpoint_sum - base, abs=1e-9 * (upper.hi - upper.lo))

    @given(e=st.floats(-SAT, SAT), e_dot=st.floats(-SAT, SAT))
    @settings(max_examples=100, deadline=None)
    def test_fou_ordering_preserved_everywhere(self, it2_system, e, e_dot):
        upper, lower = evaluate_paths(it2_system, (e, e_dot))
        assert np.all(lower.mu <= upper.mu)
