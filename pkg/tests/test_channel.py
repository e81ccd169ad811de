from fractions import Fraction
import math

import numpy as np
import pytest
from scipy import stats

from lowt.boolfn import make_named
from lowt.errors import ParameterError, ResourceError
from lowt.rng import make_rng
from lowt.sketch import FourierSamplingGenerator, OrReductionGenerator, rpdt_table_construction
from lowt.verify.channel import channel_error_report, exact_channel_tiny, wilson_interval
from lowt.verify.statevector import StateVector, plus_state


def test_wilson_against_proportion_ci():
    for k, n in [(0, 100), (3, 100), (50, 100), (97, 100), (100, 100), (17, 10_000)]:
        lo, hi = wilson_interval(k, n)
        ref = stats.binomtest(k, n).proportion_ci(0.99, method="wilson")
        assert lo == pytest.approx(ref.low, abs=1e-12) and hi == pytest.approx(ref.high, abs=1e-12)


def test_wilson_rejects_zero_trials():
    with pytest.raises(ParameterError):
        wilson_interval(0, 0)


def test_or_report_n8_k5(validate):
    r = channel_error_report(OrReductionGenerator(8, 5), 2000, make_rng(1), seed=1)
    assert r.max_error_exact == Fraction(1, 32)
    assert r.diamond_certificate == 0.125 and r.closed_form_certificate == 0.125
    assert r.independent_inputs
    validate(r.to_json(), "channel_report")


def test_constant_one_fourier_report():
    r = channel_error_report(FourierSamplingGenerator(make_named("const1", n=3), 4), 200, make_rng(2))
    assert r.max_error == 0 and r.diamond_certificate == 0 and r.empirical_max_error == 0


def test_or3_fourier_k32():
    gen = FourierSamplingGenerator(make_named("or", n=3), 32)
    r = channel_error_report(gen, 4000, make_rng(3))
    bound = 2 * math.exp(-32 / (8 * (7 / 4) ** 2))
    assert bound == pytest.approx(0.54, abs=0.01)
    assert r.max_error <= bound and r.analytic_bound == pytest.approx(bound)
    assert len(r.flagged) <= 1


def test_table_report_uses_shared_sketches():
    gen = rpdt_table_construction("meq", {"n": 3, "m": 2}, Fraction(1, 4))
    r = channel_error_report(gen, 300, make_rng(4))
    assert not r.independent_inputs and r.max_error == 0 and r.empirical_max_error == 0


def test_report_guards():
    with pytest.raises(ParameterError):
        channel_error_report(OrReductionGenerator(4, 2), 0, make_rng(0))
    with pytest.raises(ResourceError):
        channel_error_report(OrReductionGenerator(20, 2), 10, make_rng(0))
    r = channel_error_report(OrReductionGenerator(40, 3), 500, make_rng(0), xs=[0, 1, 2**39])
    assert r.max_error_exact == Fraction(1, 8)


def test_tiny_channel_basis_equals_exact_error():
    gen = OrReductionGenerator(2, 2)
    for x in range(4):
        for b in (0, 1):
            _, d = exact_channel_tiny(gen, StateVector.basis(3, x | b << 2))
            assert d == pytest.approx(float(gen.exact_error(x)), abs=1e-12)


def test_tiny_channel_eigenstate_and_plus():
    gen = OrReductionGenerator(2, 2)
    _, d0 = exact_channel_tiny(gen, StateVector.basis(3, 0))
    assert d0 == pytest.approx(0, abs=1e-12)
    _, dplus = exact_channel_tiny(gen, plus_state(3))
    assert dplus == pytest.approx(0, abs=1e-12)  # |+> on the target is invariant under X
    inputs_plus = plus_state(2).tensor(StateVector.basis(1, 0))
    rho, d = exact_channel_tiny(gen, inputs_plus)
    assert 0 < d <= 1
    assert np.trace(rho).real == pytest.approx(1)


def test_tiny_channel_guards():
    with pytest.raises(ResourceError):
        exact_channel_tiny(OrReductionGenerator(4, 1), StateVector.basis(5))
    with pytest.raises(ParameterError):
        exact_channel_tiny(OrReductionGenerator(2, 1), StateVector.basis(2))
