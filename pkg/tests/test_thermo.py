"""Gas constants, Planck-style potentials, and the config schema."""
import json
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curvegas.numerics import fd_derivative
from curvegas.thermo import (
    ConfigError,
    DomainError,
    GasParams,
    VirialCoefficient,
    admissibility,
    default_config,
    entropy,
    entropy_partials,
    ideal_gas_potential,
    load_config,
    parse_config,
    pressure,
    pressure_partials,
    virial_potential,
)


# ------------------------------------------------------------- GasParams

def test_default_gas_omega_is_one():
    gas = GasParams()
    assert gas.omega == pytest.approx(1.0)


def test_omega_derivation():
    assert GasParams(g=2.0, lam=1.0).omega == pytest.approx(2.0)
    assert GasParams(g=9.8, lam=0.5).omega == pytest.approx(math.sqrt(9.8))


@pytest.mark.parametrize("kwargs", [
    {"R": 0.0}, {"R": -1.0}, {"n": 0}, {"n": 2.5}, {"k": 0.0},
    {"g": -9.8}, {"lam": 0.0},
])
def test_gas_rejects_nonpositive_constants(kwargs):
    with pytest.raises(DomainError):
        GasParams(**kwargs)


# ------------------------------------------------------ VirialCoefficient

def test_polynomial_evaluation_and_derivatives():
    a = VirialCoefficient((1.0, -2.0, 3.0))  # 1 - 2y + 3y^2
    assert a.value(2.0) == pytest.approx(9.0)
    assert a.deriv(2.0) == pytest.approx(10.0)
    assert a.deriv(2.0, order=2) == pytest.approx(6.0)
    assert a.deriv(2.0, order=3) == 0.0
    assert a.deriv(2.0, order=7) == 0.0


def test_is_zero_flag():
    assert VirialCoefficient(()).is_zero
    assert VirialCoefficient((0.0, 0.0)).is_zero
    assert not VirialCoefficient((0.0, 1e-30)).is_zero


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(-3, 3), min_size=1, max_size=5), st.floats(0.2, 2))
def test_polynomial_derivative_matches_finite_differences(coeffs, y):
    a = VirialCoefficient(tuple(coeffs))
    approx = fd_derivative(a.value, y)
    assert abs(a.deriv(y) - approx) <= 1e-6 * max(1.0, abs(a.deriv(y)))


# -------------------------------------------------------------- potential

def test_ideal_pressure_law():
    pot = ideal_gas_potential(3)
    for x, y in [(0.5, 0.7), (1.0, 1.0), (2.5, 0.3)]:
        assert pressure(pot, 2.0, x, y) == pytest.approx(2.0 * x * y)


def test_ideal_admissibility_is_reciprocal_density():
    pot = ideal_gas_potential(5)
    for x in (0.1, 1.0, 7.0):
        assert admissibility(pot, x, 1.3) == pytest.approx(-1.0 / x)


def test_potential_requires_positive_arguments():
    pot = ideal_gas_potential(3)
    with pytest.raises(DomainError):
        pot.value(-1.0, 1.0)
    with pytest.raises(DomainError):
        pot.phi_x(1.0, 0.0)


def test_empty_virial_list_reproduces_ideal():
    a = virial_potential(3, [])
    b = ideal_gas_potential(3)
    for x, y in [(0.5, 0.5), (2.0, 1.5)]:
        assert a.value(x, y) == b.value(x, y)
        assert a.phi_xyy(x, y) == b.phi_xyy(x, y)


def test_plain_sequences_are_promoted():
    pot = virial_potential(3, [(0.0, 1.0), [0.5]])
    assert isinstance(pot.virial[0], VirialCoefficient)
    assert pot.virial[1].value(9.0) == 0.5


_SECOND = [("phi_xx", "phi_x", "x"), ("phi_xy", "phi_x", "y"),
           ("phi_yy", "phi_y", "y")]
_THIRD = [("phi_xxx", "phi_xx", "x"), ("phi_xxy", "phi_xx", "y"),
          ("phi_xyy", "phi_xy", "y"), ("phi_yyy", "phi_yy", "y")]


@pytest.mark.parametrize("name,parent,wrt", _SECOND + _THIRD)
def test_potential_partials_chain_consistently(name, parent, wrt):
    """Each higher partial is the derivative of the one below it."""
    pot = virial_potential(4, [(0.3, -0.2, 0.1), (0.0, 0.05), (0.02,)])
    for x, y in [(0.6, 0.8), (1.4, 1.1), (2.2, 0.5)]:
        exact = getattr(pot, name)(x, y)
        base = getattr(pot, parent)
        if wrt == "x":
            approx = fd_derivative(lambda v: base(v, y), x)
        else:
            approx = fd_derivative(lambda v: base(x, v), y)
        assert abs(exact - approx) <= 1e-6 * max(1.0, abs(exact))


def test_first_partials_differentiate_the_value():
    pot = virial_potential(3, [(0.2, 0.1)])
    x, y = 1.3, 0.9
    fx = fd_derivative(lambda v: pot.value(v, y), x)
    fy = fd_derivative(lambda v: pot.value(x, v), y)
    assert pot.phi_x(x, y) == pytest.approx(fx, abs=1e-9)
    assert pot.phi_y(x, y) == pytest.approx(fy, abs=1e-9)


def test_pressure_and_entropy_gradients():
    pot = virial_potential(3, [(0.1, 0.2), (0.05,)])
    R = 1.7
    for x, y in [(0.7, 0.9), (1.8, 1.4)]:
        p, p_x, p_y = pressure_partials(pot, R, x, y)
        s, s_x, s_y = entropy_partials(pot, R, x, y)
        assert p == pytest.approx(pressure(pot, R, x, y))
        assert s == pytest.approx(entropy(pot, R, x, y))
        assert p_x == pytest.approx(
            fd_derivative(lambda v: pressure(pot, R, v, y), x), rel=1e-7)
        assert p_y == pytest.approx(
            fd_derivative(lambda v: pressure(pot, R, x, v), y), rel=1e-7)
        assert s_x == pytest.approx(
            fd_derivative(lambda v: entropy(pot, R, v, y), x), rel=1e-7)
        assert s_y == pytest.approx(
            fd_derivative(lambda v: entropy(pot, R, x, v), y), rel=1e-7)


def test_ideal_entropy_closed_form():
    # s = R((n/2)(ln y + 1) - ln x) for the ideal potential
    pot = ideal_gas_potential(3)
    x, y, R = 0.8, 1.7, 2.0
    expected = R * (1.5 * (math.log(y) + 1.0) - math.log(x))
    assert entropy(pot, R, x, y) == pytest.approx(expected)


# ----------------------------------------------------------------- config

def test_default_config_round_trips():
    gas, pot = parse_config(default_config())
    assert gas == GasParams()
    assert pot.virial == ()


def test_config_partial_override():
    gas, pot = parse_config({"n": 5, "g": 2.0})
    assert gas.n == 5
    assert gas.g == 2.0
    assert gas.R == 1.0


def test_config_virial_potential():
    gas, pot = parse_config(
        {"potential": {"type": "virial", "coeffs": [[0.0, 1.0], [0.5]]}}
    )
    assert len(pot.virial) == 2
    assert pot.virial[0].value(2.0) == 2.0


@pytest.mark.parametrize("obj", [
    {"omega": 1.0},
    {"frequency": 2.0},
    {"R": "one"},
    {"n": 3.5},
    {"n": True},
    {"potential": {"type": "planck"}},
    {"potential": {"type": "ideal", "coeffs": [[1.0]]}},
    {"potential": {"type": "virial", "coeffs": [1.0]}},
    {"potential": {"type": "virial", "coeffs": [[1.0, "x"]]}},
    {"potential": []},
    {"R": -2.0},
    [],
])
def test_config_rejections(obj):
    with pytest.raises(ConfigError):
        parse_config(obj)


def test_load_config_from_file(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(json.dumps({"n": 4}))
    gas, _ = load_config(path)
    assert gas.n == 4


def test_load_config_error_paths(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(tmp_path / "absent.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    with pytest.raises(ConfigError, match="not valid JSON"):
        load_config(bad)
