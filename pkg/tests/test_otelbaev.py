import math

import numpy as np
import pytest

from core.measure import add, build_measure, dilate, reflect, support_hull, translate
from core.otelbaev import (
    OtelbaevFunction, bisect_point, cross_check_point, envelope, eval_point, positive_root,
    power_integral, profile_rows, sublevel_integral, sublevel_measure, sup_norm,
)
from generators.example_generator import (
    double_delta_lt_upper, double_delta_near_limit, double_delta_qstar, generate_example,
    single_delta_lt_upper, single_delta_qstar,
)
from utils.errors import ParameterError


def _sample_points(m, rng, count):
    lo, hi = support_hull(m)
    return rng.uniform(lo - 2.0, hi + 2.0, count)


class TestPointwise:
    def test_single_delta(self, delta0):
        pt = eval_point(delta0, 2.0, 0.0)
        assert pt.d == 0.5
        assert pt.q == 4.0
        assert eval_point(delta0, 2.0, 0.2).q == 4.0
        assert eval_point(delta0, 2.0, 1.0).d == pytest.approx(2.0)
        assert eval_point(delta0, 2.0, 1.0).q == pytest.approx(0.25)

    def test_double_mass_delta(self, double_delta0):
        assert eval_point(double_delta0, 2.0, 0.0).q == pytest.approx(16.0)
        assert eval_point(double_delta0, 2.0, 0.2).q == pytest.approx(6.25)

    @pytest.mark.acceptance
    def test_symmetric_pair_at_origin(self, symmetric_pair):
        pt = eval_point(symmetric_pair, 1.0, 0.0)
        assert pt.d == pytest.approx(2.0, rel=1e-15)
        assert pt.q == pytest.approx(0.25, rel=1e-15)

    def test_zero_measure(self):
        pt = eval_point(build_measure(), 2.0, 3.0)
        assert pt.d == math.inf
        assert pt.q == 0.0

    @pytest.mark.parametrize("alpha", [0.0, -1.0, math.inf, math.nan])
    def test_bad_alpha(self, delta0, alpha):
        with pytest.raises(ParameterError):
            OtelbaevFunction(delta0, alpha)

    @pytest.mark.parametrize("a, b", [(1.0, 0.0), (2.0, 3.0), (0.0, 2.0), (0.5, -1.0), (1e-12, 1e6)])
    def test_positive_root(self, a, b):
        r = positive_root(a, b)
        assert r > 0.0
        assert a * r * r + b * r == pytest.approx(1.0, rel=1e-12)


@pytest.mark.acceptance
class TestClosedForms:
    @pytest.mark.parametrize("c, alpha", [(1.0, 2.0), (2.0, 2.0), (0.5, 1.0), (1.5, 3.0)])
    def test_single_delta_profile(self, c, alpha):
        m = generate_example("single_delta", {"c": c})
        for x in np.linspace(-3.0, 3.0, 601):
            assert eval_point(m, alpha, x).q == pytest.approx(single_delta_qstar(c, alpha, x), rel=1e-12)

    @pytest.mark.parametrize("y", [0.1, 0.2, 0.3, 0.45, 0.5, 1.0, 2.5])
    def test_double_delta_profile(self, y):
        m = generate_example("double_delta", {"y": y})
        for x in np.linspace(-3.0, y + 3.0, 2001):
            assert eval_point(m, 2.0, x).q == pytest.approx(double_delta_qstar(y, x), rel=1e-12)

    def test_sublevel_of_delta(self, delta0):
        s = sublevel_measure(delta0, 2.0, 1.0 / 16.0)
        assert s.total_length == pytest.approx(4.0, abs=1e-9 + s.err)
        assert len(s.components) == 1
        assert s.components[0] == pytest.approx((-2.0, 2.0))

    def test_sup_norm_of_delta(self, delta0):
        value, err = sup_norm(delta0, 2.0)
        assert value == pytest.approx(4.0)
        assert err == pytest.approx(0.0, abs=1e-12)

    def test_power_integral_of_delta(self, delta0):
        # 4 gamma + 2 over gamma times 16^gamma, divided by 4^(gamma+1), at gamma = 1/2
        result = power_integral(delta0, 2.0, 0.5)
        assert result.value == pytest.approx(4.0, rel=1e-9)
        assert result.err <= 1e-6 * result.value

    @pytest.mark.parametrize("gamma", [0.1, 0.25, 0.5, 1.0, 1.5, 3.0])
    def test_power_integral_single_delta_formula(self, delta0, gamma):
        value = 4.0 ** (gamma + 1.0) * power_integral(delta0, 2.0, gamma).value
        assert value == pytest.approx(single_delta_lt_upper(gamma), rel=1e-9)

    @pytest.mark.parametrize("y", [0.05, 0.1, 0.3, 0.75, 3.0])
    @pytest.mark.parametrize("gamma", [0.25, 0.5, 1.5])
    def test_power_integral_double_delta_formula(self, y, gamma):
        m = generate_example("double_delta", {"y": y})
        value = 4.0 ** (gamma + 1.0) * power_integral(m, 2.0, gamma).value
        assert value == pytest.approx(double_delta_lt_upper(y, gamma), rel=1e-9)

    @pytest.mark.parametrize("gamma", [0.25, 0.5, 2.0])
    def test_near_limit_is_double_mass(self, double_delta0, gamma):
        value = 4.0 ** (gamma + 1.0) * power_integral(double_delta0, 2.0, gamma).value
        assert value == pytest.approx(double_delta_near_limit(gamma), rel=1e-9)


class TestQueries:
    def test_profile_rows_grid(self, delta0):
        rows = profile_rows(delta0, 2.0, -1.0, 1.0, 0.5)
        assert [r[0] for r in rows] == [-1.0, -0.5, 0.0, 0.5, 1.0]
        assert rows[2][1:] == (0.5, 4.0)

    def test_profile_rows_bad_grid(self, delta0):
        with pytest.raises(ParameterError):
            profile_rows(delta0, 2.0, 1.0, 0.0, 0.1)
        with pytest.raises(ParameterError):
            profile_rows(delta0, 2.0, 0.0, 1.0, 0.0)

    def test_envelope_contains_profile(self, delta0):
        for cell in envelope(delta0, 2.0, (-1.0, 1.0), 0.01):
            for x in (cell.lo, cell.mid, cell.hi):
                q = single_delta_qstar(1.0, 2.0, x)
                assert cell.q_lower * (1 - 1e-12) <= q <= cell.q_upper * (1 + 1e-12)

    def test_sublevel_threshold_must_be_positive(self, delta0):
        with pytest.raises(ParameterError):
            sublevel_measure(delta0, 2.0, 0.0)

    def test_sublevel_above_sup_is_empty(self, delta0):
        assert sublevel_measure(delta0, 2.0, 4.5).is_empty

    def test_sublevel_integral_of_inverse_width(self, delta0):
        # over {|x| <= 10}: d = 1/2 on the plateau, 2|x| beyond it
        value, err = sublevel_integral(delta0, 2.0, -1.0, 0.0025)
        assert value == pytest.approx(1.0 + math.log(40.0), rel=1e-9)

    def test_zero_measure_queries(self):
        zero = build_measure()
        assert sup_norm(zero, 2.0) == (0.0, 0.0)
        assert power_integral(zero, 2.0, 0.5).value == 0.0
        assert sublevel_measure(zero, 2.0, 1.0).total_length == 0.0

    def test_power_integral_gamma_must_be_positive(self, delta0):
        with pytest.raises(ParameterError):
            power_integral(delta0, 2.0, 0.0)


class TestCrossCheck:
    def test_bisection_agrees_on_mixed_measure(self, mixed, rng):
        for x in _sample_points(mixed, rng, 50):
            exact = cross_check_point(mixed, 2.0, float(x))
            assert exact.q > 0

    def test_both_bisection_forms(self, symmetric_pair):
        strict = bisect_point(symmetric_pair, 1.0, 0.0, strict=True)
        loose = bisect_point(symmetric_pair, 1.0, 0.0, strict=False)
        assert strict.d == pytest.approx(2.0, rel=1e-10)
        assert loose.d == pytest.approx(2.0, rel=1e-10)

    @pytest.mark.property
    def test_bisection_on_corpus(self, small_corpus, rng):
        for m in small_corpus:
            for x in _sample_points(m, rng, 10):
                cross_check_point(m, 2.0, float(x))


@pytest.fixture(params=[("small_corpus", 20), pytest.param(("full_corpus", 5), marks=pytest.mark.slow)],
                ids=["small", "full"])
def property_corpus(request):
    """(measures, points per measure); the full variant makes 1000 instances per property"""
    name, per = request.param
    return request.getfixturevalue(name), per


@pytest.mark.property
class TestProperties:
    def test_width_is_two_lipschitz(self, property_corpus, rng):
        measures, per = property_corpus
        for m in measures:
            xs = np.sort(_sample_points(m, rng, 2 * per))
            ds = [eval_point(m, 2.0, float(x)).d for x in xs]
            for (x0, d0), (x1, d1) in zip(zip(xs, ds), zip(xs[1:], ds[1:])):
                assert abs(d1 - d0) <= 2.0 * (x1 - x0) + 1e-12 * max(d0, d1)

    def test_controlled_variation(self, property_corpus, rng):
        measures, per = property_corpus
        for m in measures:
            for x in _sample_points(m, rng, per):
                pt = eval_point(m, 2.0, float(x))
                for y in (x - 0.25 * pt.d, x + 0.25 * pt.d):
                    q = eval_point(m, 2.0, float(y)).q
                    assert pt.q / 4.0 * (1 - 1e-12) <= q <= 4.0 * pt.q * (1 + 1e-12)

    def test_controlled_variation_across_window(self, property_corpus, rng):
        measures, per = property_corpus
        for m in measures:
            for x in _sample_points(m, rng, per):
                pt = eval_point(m, 2.0, float(x))
                y = rng.uniform(x - 0.5 * pt.d, x + 0.5 * pt.d)
                assert pt.q <= 4.0 * eval_point(m, 2.0, float(y)).q * (1 + 1e-12), (m, x, y)
                z = rng.uniform(x - 0.25 * pt.d, x + 0.25 * pt.d)
                assert eval_point(m, 2.0, float(z)).q <= 4.0 * pt.q * (1 + 1e-12), (m, x, z)

    def test_alpha_equivalence(self, property_corpus, rng):
        low, high = 0.5, 2.0
        measures, per = property_corpus
        for m in measures:
            for x in _sample_points(m, rng, per):
                q_low = eval_point(m, low, float(x)).q
                q_high = eval_point(m, high, float(x)).q
                assert q_low <= q_high * (1 + 1e-12)
                assert q_high <= (high / low) ** 2 * q_low * (1 + 1e-12)

    def test_subadditivity(self, property_corpus, rng):
        measures, per = property_corpus
        for m1, m2 in zip(measures[::2], measures[1::2]):
            both = add(m1, m2)
            for x in _sample_points(both, rng, 2 * per):
                q = eval_point(both, 2.0, float(x)).q
                q1 = eval_point(m1, 2.0, float(x)).q
                q2 = eval_point(m2, 2.0, float(x)).q
                assert max(q1, q2) <= q * (1 + 1e-12)
                assert q <= 2.0 * (q1 + q2) * (1 + 1e-12)

    def test_dilation_covariance(self, property_corpus, rng):
        s = 3.0
        measures, per = property_corpus
        for m in measures:
            scaled = dilate(m, s)
            for x in _sample_points(scaled, rng, per):
                q = eval_point(scaled, 2.0, float(x)).q
                assert q == pytest.approx(s * s * eval_point(m, 2.0, float(s * x)).q, rel=1e-9)

    def test_translation_and_reflection(self, property_corpus, rng):
        measures, per = property_corpus
        for m in measures:
            moved, mirrored = translate(m, 0.75), reflect(m)
            for x in _sample_points(m, rng, per):
                d = eval_point(m, 2.0, float(x)).d
                assert eval_point(moved, 2.0, float(x) + 0.75).d == pytest.approx(d, rel=1e-9)
                assert eval_point(mirrored, 2.0, -float(x)).d == pytest.approx(d, rel=1e-12)

    def test_distance_bound_outside_hull(self, small_corpus):
        for m in small_corpus:
            lo, hi = support_hull(m)
            for dist in (0.1, 1.0, 10.0):
                for x in (lo - dist, hi + dist):
                    assert eval_point(m, 2.0, x).q <= (1 + 1e-12) / (4.0 * dist * dist)

    def test_distance_bound_in_interior_gaps(self, property_corpus):
        measures, _ = property_corpus
        checked = 0
        for m in measures:
            st = m.structure
            for left, right, value in zip(st.points[:-1], st.points[1:], st.gap_value):
                if value > 0.0:
                    continue
                for t in (0.25, 0.5, 0.75):
                    x = left + t * (right - left)
                    dist = min(x - left, right - x)
                    assert eval_point(m, 2.0, x).q <= (1 + 1e-12) / (4.0 * dist * dist), (m, x)
                    checked += 1
        assert checked > 0

    def test_compact_support_decay(self, small_corpus):
        for m in small_corpus:
            lo, hi = support_hull(m)
            x = 100.0 * max(abs(lo), abs(hi), 1.0)
            for t in (x, -x):
                scaled = eval_point(m, 2.0, t).q * t * t
                assert 0.2 <= scaled <= 0.3
