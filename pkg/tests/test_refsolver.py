import math

import pytest

from core.measure import build_measure, dilate, reflect, translate
from generators.example_generator import generate_example
from spectral.refsolver import counting_exact, lt_sum_exact, negative_spectrum, secular, spectrum_rows
from utils.errors import BoundaryAmbiguousError, ParameterError


class TestNegativeSpectrum:
    @pytest.mark.parametrize("c", [0.5, 1.0, 2.0, 3.7])
    def test_single_delta(self, c):
        spectrum = negative_spectrum(generate_example("single_delta", {"c": c}))
        assert spectrum.count == 1
        assert spectrum.eigenvalues[0] == pytest.approx(-c * c / 4.0, rel=1e-10)
        assert spectrum.kappas[0] == pytest.approx(c / 2.0, rel=1e-10)

    def test_symmetric_pair(self):
        # delta at +-1 with mass 3/2: even state kappa (1 + tanh kappa) = 3/2, odd kappa (1 + coth kappa) = 3/2
        m = build_measure([(-1.0, 1.5), (1.0, 1.5)])
        spectrum = negative_spectrum(m)
        assert spectrum.count == 2
        even, odd = spectrum.kappas
        assert even * (1.0 + math.tanh(even)) == pytest.approx(1.5, abs=1e-9)
        assert odd * (1.0 + 1.0 / math.tanh(odd)) == pytest.approx(1.5, abs=1e-9)

    @pytest.mark.acceptance
    @pytest.mark.parametrize("y, count", [(0.5, 1), (1.99, 1), (2.01, 2), (5.0, 2)])
    def test_double_delta_bound_states(self, y, count):
        assert negative_spectrum(generate_example("double_delta", {"y": y})).count == count

    def test_square_well_ground_state(self, box):
        spectrum = negative_spectrum(box)
        kappa = spectrum.kappas[0]
        k = math.sqrt(1.0 - kappa * kappa)
        assert k * math.tan(k) == pytest.approx(kappa, abs=1e-9)

    def test_zero_measure(self):
        spectrum = negative_spectrum(build_measure())
        assert spectrum.count == 0
        assert spectrum_rows(spectrum) == []

    def test_ordering_and_zero_count(self, mixed):
        spectrum = negative_spectrum(mixed)
        assert list(spectrum.eigenvalues) == sorted(spectrum.eigenvalues)
        assert spectrum.count == secular(mixed, 0.0).zeros
        assert all(ev >= -spectrum.kappa_max ** 2 for ev in spectrum.eigenvalues)

    def test_invariance(self, mixed):
        base = negative_spectrum(mixed).eigenvalues
        assert negative_spectrum(translate(mixed, 3.25)).eigenvalues == pytest.approx(base, rel=1e-9)
        assert negative_spectrum(reflect(mixed)).eigenvalues == pytest.approx(base, rel=1e-9)
        s = 2.0
        scaled = negative_spectrum(dilate(mixed, s)).eigenvalues
        assert scaled == pytest.approx([s * s * ev for ev in base], rel=1e-9)

    def test_bad_tolerance(self, delta0):
        with pytest.raises(ParameterError):
            negative_spectrum(delta0, tol=-1.0)

    def test_secular_rejects_negative_kappa(self, delta0):
        with pytest.raises(ParameterError):
            secular(delta0, -0.1)


class TestCounting:
    def test_single_delta_counts(self, delta0):
        assert counting_exact(delta0, 0.1) == 1
        assert counting_exact(delta0, 0.3) == 0

    def test_boundary_is_ambiguous(self, delta0):
        with pytest.raises(BoundaryAmbiguousError) as exc:
            counting_exact(delta0, 0.25)
        assert exc.value.eigenvalue == pytest.approx(-0.25)

    def test_lambda_must_be_positive(self, delta0):
        with pytest.raises(ParameterError):
            counting_exact(delta0, 0.0)

    def test_below(self, mixed):
        spectrum = negative_spectrum(mixed)
        assert spectrum.below(1e-12) == spectrum.count
        assert spectrum.below(-spectrum.eigenvalues[0]) == 0


class TestLiebThirringSum:
    @pytest.mark.acceptance
    def test_half_single_delta(self):
        m = generate_example("single_delta", {"c": 1.5})
        assert lt_sum_exact(m, 0.5) == pytest.approx(0.75, rel=1e-10)

    @pytest.mark.parametrize("gamma", [0.1, 0.5, 1.0, 2.5])
    def test_matches_eigenvalue_sum(self, mixed, gamma):
        spectrum = negative_spectrum(mixed)
        expected = math.fsum(abs(ev) ** gamma for ev in spectrum.eigenvalues)
        assert lt_sum_exact(mixed, gamma, spectrum) == pytest.approx(expected, rel=1e-12)

    def test_zero_measure(self):
        assert lt_sum_exact(build_measure(), 1.0) == 0.0

    def test_gamma_must_be_positive(self, delta0):
        with pytest.raises(ParameterError):
            lt_sum_exact(delta0, 0.0)
