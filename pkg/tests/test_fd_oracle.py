import math

import pytest

from core.measure import build_measure
from core.otelbaev import sup_norm
from spectral.fd_oracle import fd_oracle
from spectral.refsolver import negative_spectrum
from utils.errors import ParameterError


def _tolerance(m, h):
    return max(5.0 * h * math.sqrt(sup_norm(m, 2.0)[0]), 1e-6)


@pytest.mark.acceptance
class TestFiniteDifferenceOracle:
    def test_single_delta(self, delta0):
        approx = fd_oracle(delta0)
        exact = negative_spectrum(delta0)
        assert approx.method == "finite-difference"
        assert approx.count == exact.count == 1
        assert approx.eigenvalues[0] == pytest.approx(-0.25, abs=_tolerance(delta0, 1e-3))
        assert approx.warnings == ()

    def test_mixed_measure(self, mixed):
        approx = fd_oracle(mixed)
        exact = negative_spectrum(mixed)
        assert approx.count == exact.count
        tol = _tolerance(mixed, 1e-3)
        for a, b in zip(approx.eigenvalues, exact.eigenvalues):
            assert a == pytest.approx(b, abs=tol)

    def test_square_well(self, box):
        approx = fd_oracle(box, h=2e-3)
        exact = negative_spectrum(box)
        assert approx.eigenvalues == pytest.approx(exact.eigenvalues, abs=_tolerance(box, 2e-3))


class TestPadding:
    def test_short_pad_is_reported(self):
        # kappa = 0.1 decays over ~10, far beyond a pad of 15 with Dirichlet walls
        weak = build_measure([(0.0, 0.2)])
        approx = fd_oracle(weak, pad=15.0)
        assert approx.warnings
        assert "pad 15.0 too small" in approx.warnings[0]

    def test_pad_check_can_be_skipped(self):
        weak = build_measure([(0.0, 0.2)])
        assert fd_oracle(weak, pad=15.0, check_pad=False).warnings == ()

    def test_zero_measure(self):
        assert fd_oracle(build_measure()).count == 0

    def test_bad_step(self, delta0):
        with pytest.raises(ParameterError):
            fd_oracle(delta0, h=-1e-3)


def _assert_agree(m):
    approx = fd_oracle(m, check_pad=False)
    exact = negative_spectrum(m)
    tol = _tolerance(m, 1e-3)
    paired = min(approx.count, exact.count)
    for a, b in zip(approx.eigenvalues[:paired], exact.eigenvalues[:paired]):
        assert a == pytest.approx(b, abs=tol, rel=2e-2), m
    # a state only one side resolves must be shallow
    for extra in approx.eigenvalues[paired:] + exact.eigenvalues[paired:]:
        assert extra > -tol, m


class TestCorpusAgreement:
    @pytest.mark.property
    def test_small_corpus(self, small_corpus):
        for m in small_corpus:
            _assert_agree(m)

    @pytest.mark.slow
    def test_full_corpus(self, full_corpus):
        for m in full_corpus:
            _assert_agree(m)
