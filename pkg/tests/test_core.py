import math

import numpy as np
import pytest

from gravmode import make_params
from gravmode.core import TruncationSpec


def test_unit_point():
    p = make_params(1.0, 1.0)
    assert p.beta == pytest.approx(1.0 / math.sqrt(2.0), rel=1e-15)
    assert p.mu == 1.0
    assert p.chi == pytest.approx(0.25, rel=1e-15)


def test_chi_quadruples_with_omega():
    assert make_params(2.0, 1.0).chi == pytest.approx(1.0, rel=1e-15)


def test_tiny_omega():
    p = make_params(1e-33, 1.0)
    assert p.chi == pytest.approx(2.5e-67, rel=1e-15)
    assert p.beta == pytest.approx(7.0710678118654755e32, rel=1e-15)


@pytest.mark.parametrize("omega,lc", [
    (0.0, 1.0), (-1.0, 1.0), (1.0, 0.0), (1.0, -2.0),
    (math.nan, 1.0), (1.0, math.inf), (math.inf, 1.0),
])
def test_rejects_bad_inputs(omega, lc):
    with pytest.raises(ValueError):
        make_params(omega, lc)


def test_rejects_chi_underflow():
    with pytest.raises(ValueError):
        make_params(1e-200, 1e-200)


def test_derived_fields_consistent_to_a_few_ulp():
    rng = np.random.default_rng(42)
    for _ in range(200):
        omega = 10.0 ** rng.uniform(-33, 1)
        lc = 10.0 ** rng.uniform(-1, 1)
        p = make_params(omega, lc)
        lhs = p.chi * 8.0 * p.beta * p.beta
        assert abs(lhs / (lc * lc) - 1.0) <= 4.0 * np.finfo(float).eps
        assert abs(p.beta * p.omega * math.sqrt(2.0) - 1.0) <= 4.0 * np.finfo(float).eps


def test_chi_scaling_in_omega():
    rng = np.random.default_rng(7)
    for _ in range(100):
        omega = 10.0 ** rng.uniform(-10, 0)
        k = 10.0 ** rng.uniform(-3, 3)
        lc = 10.0 ** rng.uniform(-1, 1)
        a = make_params(omega, lc).chi
        b = make_params(k * omega, lc).chi
        assert b == pytest.approx(k * k * a, rel=1e-12)


def test_params_are_immutable():
    p = make_params(1.0, 1.0)
    with pytest.raises(AttributeError):
        p.omega = 2.0


def test_truncation_spec_validation():
    TruncationSpec(n_max=2, tol=1e-3)
    with pytest.raises(ValueError):
        TruncationSpec(n_max=1)
    with pytest.raises(ValueError):
        TruncationSpec(n_max=8, tol=0.0)
