"""Thermodynamic state functions built on a Planck-style potential.

The potential ``phi(x, y)`` in density ``x`` and temperature ``y``
generates pressure and specific entropy:

    p = -R x^2 y phi_x,        s = R (phi + y phi_y).

The ideal gas corresponds to ``phi = (n/2) ln y - ln x``; truncated
virial corrections subtract ``sum_i (x^i / i) A_i(y)`` with polynomial
coefficients ``A_i``. Hyperbolicity of the flow equations needs the
admissibility combination ``x phi_xx + 2 phi_x`` to stay negative.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

__all__ = [
    "DomainError",
    "ConfigError",
    "GasParams",
    "VirialCoefficient",
    "PlanckPotential",
    "ideal_gas_potential",
    "virial_potential",
    "pressure",
    "entropy",
    "admissibility",
    "pressure_partials",
    "entropy_partials",
    "default_config",
    "parse_config",
    "load_config",
]


class DomainError(ValueError):
    """Evaluation outside the physical domain (x > 0, y > 0) or an
    invalid parameter combination."""


class ConfigError(ValueError):
    """Malformed configuration mapping."""


@dataclass(frozen=True)
class GasParams:
    """Bulk constants of the gas and the curve it flows on.

    Parameters
    ----------
    R : float
        Specific gas constant, positive.
    n : int
        Degrees of freedom, at least 1.
    k : float
        Thermal conductivity, positive.
    g : float
        Gravitational acceleration, positive.
    lam : float
        Curvature coefficient of the vertical profile ``z = lam * a**2``,
        positive.
    """

    R: float = 1.0
    n: int = 3
    k: float = 1.0
    g: float = 1.0
    lam: float = 0.5

    def __post_init__(self):
        if not self.R > 0.0:
            raise DomainError("R must be positive")
        if int(self.n) != self.n or self.n < 1:
            raise DomainError("n must be a positive integer")
        if not self.k > 0.0:
            raise DomainError("k must be positive")
        if not self.g > 0.0:
            raise DomainError("g must be positive")
        if not self.lam > 0.0:
            raise DomainError("lam must be positive")

    @property
    def omega(self) -> float:
        """Oscillation frequency sqrt(2 g lam) of the curved channel."""
        return math.sqrt(2.0 * self.g * self.lam)


@dataclass(frozen=True)
class VirialCoefficient:
    """Polynomial virial coefficient A(y), stored ascending in y."""

    coeffs: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))

    def value(self, y: float) -> float:
        acc = 0.0
        for c in reversed(self.coeffs):
            acc = acc * y + c
        return acc

    def deriv(self, y: float, order: int = 1) -> float:
        """Exact derivative of the polynomial, any order."""
        if order < 0:
            raise ValueError("order must be nonnegative")
        cs = list(self.coeffs)
        for _ in range(order):
            cs = [i * c for i, c in enumerate(cs)][1:]
        acc = 0.0
        for c in reversed(cs):
            acc = acc * y + c
        return acc

    @property
    def is_zero(self) -> bool:
        return all(c == 0.0 for c in self.coeffs)


@dataclass(frozen=True)
class PlanckPotential:
    """Potential phi(x, y) = (n/2) ln y - ln x - sum_i (x^i/i) A_i(y).

    All partial derivatives through third order are exact closed forms;
    they are the quantities every residual and symbol computation in
    this package consumes. Evaluation requires x > 0 and y > 0.
    """

    n: int
    virial: tuple[VirialCoefficient, ...] = field(default_factory=tuple)

    def _check(self, x: float, y: float) -> None:
        if not (x > 0.0 and y > 0.0):
            raise DomainError(f"potential needs x > 0 and y > 0, got ({x!r}, {y!r})")

    def value(self, x: float, y: float) -> float:
        self._check(x, y)
        acc = 0.5 * self.n * math.log(y) - math.log(x)
        for i, a in enumerate(self.virial, start=1):
            acc -= x ** i / i * a.value(y)
        return acc

    def phi_x(self, x: float, y: float) -> float:
        self._check(x, y)
        acc = -1.0 / x
        for i, a in enumerate(self.virial, start=1):
            acc -= x ** (i - 1) * a.value(y)
        return acc

    def phi_y(self, x: float, y: float) -> float:
        self._check(x, y)
        acc = 0.5 * self.n / y
        for i, a in enumerate(self.virial, start=1):
            acc -= x ** i / i * a.deriv(y)
        return acc

    def phi_xx(self, x: float, y: float) -> float:
        self._check(x, y)
        acc = 1.0 / (x * x)
        for i, a in enumerate(self.virial, start=1):
            if i >= 2:
                acc -= (i - 1) * x ** (i - 2) * a.value(y)
        return acc

    def phi_xy(self, x: float, y: float) -> float:
        self._check(x, y)
        acc = 0.0
        for i, a in enumerate(self.virial, start=1):
            acc -= x ** (i - 1) * a.deriv(y)
        return acc

    def phi_yy(self, x: float, y: float) -> float:
        self._check(x, y)
        acc = -0.5 * self.n / (y * y)
        for i, a in enumerate(self.virial, start=1):
            acc -= x ** i / i * a.deriv(y, 2)
        return acc

    def phi_xxx(self, x: float, y: float) -> float:
        self._check(x, y)
        acc = -2.0 / x ** 3
        for i, a in enumerate(self.virial, start=1):
            if i >= 3:
                acc -= (i - 1) * (i - 2) * x ** (i - 3) * a.value(y)
        return acc

    def phi_xxy(self, x: float, y: float) -> float:
        self._check(x, y)
        acc = 0.0
        for i, a in enumerate(self.virial, start=1):
            if i >= 2:
                acc -= (i - 1) * x ** (i - 2) * a.deriv(y)
        return acc

    def phi_xyy(self, x: float, y: float) -> float:
        self._check(x, y)
        acc = 0.0
        for i, a in enumerate(self.virial, start=1):
            acc -= x ** (i - 1) * a.deriv(y, 2)
        return acc

    def phi_yyy(self, x: float, y: float) -> float:
        self._check(x, y)
        acc = self.n / y ** 3
        for i, a in enumerate(self.virial, start=1):
            acc -= x ** i / i * a.deriv(y, 3)
        return acc


def ideal_gas_potential(n: int) -> PlanckPotential:
    """Potential of the n-degree-of-freedom ideal gas."""
    return PlanckPotential(n=int(n))


def virial_potential(
    n: int, coefficients: Sequence[VirialCoefficient | Sequence[float]]
) -> PlanckPotential:
    """Ideal-gas potential with truncated virial corrections.

    ``coefficients[i-1]`` supplies the polynomial A_i(y) multiplying
    ``x^i / i``. Plain float sequences are promoted to
    :class:`VirialCoefficient`. An empty or all-zero list reproduces
    :func:`ideal_gas_potential` exactly.
    """
    packed = tuple(
        c if isinstance(c, VirialCoefficient) else VirialCoefficient(tuple(c))
        for c in coefficients
    )
    return PlanckPotential(n=int(n), virial=packed)


def pressure(pot: PlanckPotential, R: float, x: float, y: float) -> float:
    """Pressure p = -R x^2 y phi_x. Ideal gas: p = R x y."""
    return -R * x * x * y * pot.phi_x(x, y)


def entropy(pot: PlanckPotential, R: float, x: float, y: float) -> float:
    """Specific entropy s = R (phi + y phi_y)."""
    return R * (pot.value(x, y) + y * pot.phi_y(x, y))


def admissibility(pot: PlanckPotential, x: float, y: float) -> float:
    """Hyperbolicity indicator x phi_xx + 2 phi_x; admissible when < 0.

    For the ideal gas this is -1/x, negative on the whole domain.
    """
    return x * pot.phi_xx(x, y) + 2.0 * pot.phi_x(x, y)


def pressure_partials(
    pot: PlanckPotential, R: float, x: float, y: float
) -> tuple[float, float, float]:
    """Pressure with its (x, y) gradient, all in closed form."""
    px = -R * x * y * (2.0 * pot.phi_x(x, y) + x * pot.phi_xx(x, y))
    py = -R * x * x * (pot.phi_x(x, y) + y * pot.phi_xy(x, y))
    return pressure(pot, R, x, y), px, py


def entropy_partials(
    pot: PlanckPotential, R: float, x: float, y: float
) -> tuple[float, float, float]:
    """Entropy with its (x, y) gradient."""
    sx = R * (pot.phi_x(x, y) + y * pot.phi_xy(x, y))
    sy = R * (2.0 * pot.phi_y(x, y) + y * pot.phi_yy(x, y))
    return entropy(pot, R, x, y), sx, sy


_CONFIG_KEYS = {"R", "n", "k", "g", "lambda", "potential"}
_POTENTIAL_KEYS = {"type", "coeffs"}


def default_config() -> dict:
    """Baseline configuration mapping used by the command line tool."""
    return {
        "R": 1.0,
        "n": 3,
        "k": 1.0,
        "g": 1.0,
        "lambda": 0.5,
        "potential": {"type": "ideal"},
    }


def parse_config(obj: dict) -> tuple[GasParams, PlanckPotential]:
    """Validate a configuration mapping and build the parameter objects.

    Unknown keys are rejected rather than ignored; in particular the
    frequency is always derived from g and lambda and cannot be set
    directly. Missing keys fall back to :func:`default_config`.

    Raises
    ------
    ConfigError
        On unknown keys, wrong types, or out-of-range values.
    """
    if not isinstance(obj, dict):
        raise ConfigError("configuration must be a JSON object")
    unknown = set(obj) - _CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    merged = default_config()
    merged.update(obj)
    for key in ("R", "k", "g", "lambda"):
        if not isinstance(merged[key], (int, float)) or isinstance(merged[key], bool):
            raise ConfigError(f"config key {key!r} must be a number")
    if not isinstance(merged["n"], int) or isinstance(merged["n"], bool):
        raise ConfigError("config key 'n' must be an integer")
    pot_obj = merged["potential"]
    if not isinstance(pot_obj, dict):
        raise ConfigError("config key 'potential' must be an object")
    unknown = set(pot_obj) - _POTENTIAL_KEYS
    if unknown:
        raise ConfigError(f"unknown potential keys: {sorted(unknown)}")
    kind = pot_obj.get("type", "ideal")
    try:
        gas = GasParams(
            R=float(merged["R"]),
            n=merged["n"],
            k=float(merged["k"]),
            g=float(merged["g"]),
            lam=float(merged["lambda"]),
        )
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc
    if kind == "ideal":
        if "coeffs" in pot_obj:
            raise ConfigError("ideal potential takes no 'coeffs'")
        return gas, ideal_gas_potential(gas.n)
    if kind == "virial":
        raw = pot_obj.get("coeffs", [])
        if not isinstance(raw, list) or not all(
            isinstance(row, list) and all(
                isinstance(v, (int, float)) and not isinstance(v, bool) for v in row
            )
            for row in raw
        ):
            raise ConfigError("'coeffs' must be a list of lists of numbers")
        return gas, virial_potential(gas.n, [tuple(map(float, row)) for row in raw])
    raise ConfigError(f"unknown potential type {kind!r}")


def load_config(path: str | Path) -> tuple[GasParams, PlanckPotential]:
    """Read a JSON configuration file. See :func:`parse_config`."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path!s}: {exc}") from exc
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path!s} is not valid JSON: {exc}") from exc
    return parse_config(obj)
