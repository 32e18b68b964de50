import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chemofluid.errors import ConfigError
from chemofluid.model import (
    PRESETS,
    D_eps,
    F_eps,
    F_eps_prime,
    ModelParams,
    get_preset,
    numeric_preset,
    psi,
    psi_prime,
    validate_assumptions,
)

nonneg = st.floats(min_value=0.0, max_value=1e6, allow_nan=False, allow_subnormal=False)
eps_values = st.floats(min_value=1e-6, max_value=0.999)


def test_defaults_and_replace():
    p = ModelParams()
    assert p.m == 2.0 and p.eps == 1e-2 and p.kinetics.name == "linear"
    q = p.replace(eps=1e-3)
    assert q.eps == 1e-3 and p.eps == 1e-2


@pytest.mark.parametrize("kw", [dict(m=0.0), dict(diff_coeff=-1.0), dict(eps=0.0),
                                dict(eps=1.0), dict(energy_weight=0.5), dict(c_floor=0.0)])
def test_bad_params(kw):
    with pytest.raises(ConfigError):
        ModelParams(**kw)


def test_unknown_preset():
    with pytest.raises(ConfigError):
        get_preset("nope")


def test_F_eps_examples():
    assert F_eps(0.1, 0.0) == 0.0
    assert F_eps_prime(0.1, 0.0) == 1.0
    assert math.isclose(F_eps(0.5, 2.0), math.log(2.0) / 0.5)
    # F_eps(s) -> s as eps -> 0
    assert abs(F_eps(1e-9, 3.0) - 3.0) < 1e-6
    with pytest.raises(ValueError):
        F_eps(0.1, -1.0)


@given(nonneg, eps_values)
def test_F_eps_bounds(s, eps):
    f = F_eps(eps, s)
    fp = F_eps_prime(eps, s)
    assert 0.0 <= f <= s * (1 + 1e-12)
    assert 0.0 < fp <= 1.0
    assert s * fp <= 1.0 / eps * (1 + 1e-12)


@given(nonneg, eps_values, st.floats(min_value=2 / 3, max_value=4.0))
def test_D_eps_positive(s, eps, m):
    p = ModelParams(m=m, eps=eps)
    d = D_eps(p, s)
    assert d > 0
    assert math.isclose(d, (s + eps) ** (m - 1), rel_tol=1e-12)


def test_D_eps_linear_is_constant():
    p = ModelParams(m=1.0, diff_coeff=0.7)
    assert np.all(D_eps(p, np.array([0.0, 1.0, 1e5])) == 0.7)


def test_D_eps_small_m_at_zero():
    p = ModelParams(m=2 / 3, eps=1e-3)
    assert math.isclose(D_eps(p, 0.0), 1e-3 ** (-1 / 3), rel_tol=1e-12)


def test_psi_linear_closed_form():
    s = np.array([1e-6, 0.25, 1.0, 4.0])
    assert np.allclose(psi(PRESETS["linear"], s), 2 * (np.sqrt(s) - 1), rtol=0, atol=1e-15)
    assert psi(PRESETS["linear"], np.array([1.0]))[0] == 0.0


def test_psi_saturating_against_hand_antiderivative():
    # 1/sqrt(g) = sqrt((1+s)/s); antiderivative sqrt(s(1+s)) + asinh(sqrt(s))
    def ref(s):
        return np.sqrt(s * (1 + s)) + np.arcsinh(np.sqrt(s)) - math.sqrt(2) - math.asinh(1)

    s = np.array([1e-8, 1e-3, 0.3, 1.0, 2.0, 7.5])
    assert np.allclose(psi(PRESETS["saturating"], s), ref(s), rtol=1e-12, atol=1e-14)


def test_psi_prime_chain_rule():
    s = np.array([0.1, 0.5, 2.0])
    for name in ("linear", "saturating"):
        pre = PRESETS[name]
        h = 1e-6
        fd = (psi(pre, s + h) - psi(pre, s - h)) / (2 * h)
        assert np.allclose(fd, psi_prime(pre, s), rtol=1e-7)
        assert np.allclose(psi_prime(pre, s) ** 2, 1 / pre.g(s), rtol=1e-12)


def test_numeric_preset_matches_linear():
    num = numeric_preset("num-linear", lambda c: np.ones_like(c), lambda c: c)
    assert not num.symbolic
    c = np.linspace(0.0, 2.0, 9)
    assert np.allclose(num.dg(c), 1.0, atol=1e-8)
    assert np.allclose(num.d2g(c), 0.0, atol=1e-4)
    report = validate_assumptions(ModelParams(kinetics=num))
    assert report.passed
    assert "numerical" in report["g-increasing"].method


@pytest.mark.parametrize("name", ["linear", "saturating"])
def test_good_presets_pass(name):
    report = validate_assumptions(ModelParams(kinetics=name), c_max_probe=5.0)
    assert report.passed, report.format()


def test_quadratic_preset_flags_concavity():
    report = validate_assumptions(ModelParams(kinetics="quadratic"))
    assert not report.passed
    assert "g-concave" in report.failed
    # g'(0) = 0 also breaks the strict monotonicity at the origin
    assert "g-increasing" in report.failed


def test_small_m_fails_threshold_only():
    report = validate_assumptions(ModelParams(m=0.5))
    assert report.failed == ["m-threshold"]


def test_validator_input_errors():
    with pytest.raises(ValueError):
        validate_assumptions(ModelParams(), c_max_probe=0.0)
    with pytest.raises(ValueError):
        validate_assumptions(ModelParams(), n_probe_points=8)


def test_report_format_lists_every_check():
    text = validate_assumptions(ModelParams()).format()
    assert text.count("PASS") == 9
    assert text.splitlines()[-1] == "overall: PASS"


@settings(max_examples=30)
@given(st.floats(min_value=1e-3, max_value=50.0))
def test_psi_monotone(s):
    pre = PRESETS["saturating"]
    a, b = psi(pre, np.array([s, s * 1.01]))
    assert b > a
