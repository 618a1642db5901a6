"""Compressible flow along a curve with a quadratic vertical profile.

State variables are velocity ``u(t, a)``, density ``rho(t, a)`` and
temperature ``theta(t, a)`` of a gas column constrained to the curve
``(f(a), g(a), lam * a**2)``; only the vertical component of gravity
survives the constraint and acts through the restoring term
``2 g lam a``. The governing system couples momentum, continuity and a
heat-conducting energy balance whose thermodynamic closure comes from a
Planck potential (see :mod:`curvegas.thermo`).

Two explicit solution families are provided. Both are periodic-window
solutions built from quadratures of powers of ``cos(c3 - omega t)`` and
exist where that cosine is positive; their construction fixes the
integration base point at the window centre ``t = c3 / omega`` where the
nested antiderivatives vanish.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from functools import lru_cache
from typing import Callable, Optional

import numpy as np

from .numerics import fd_derivative, quadrature
from .thermo import (
    DomainError,
    GasParams,
    PlanckPotential,
    admissibility,
    entropy_partials,
    pressure_partials,
)

__all__ = [
    "OutsideValidity",
    "DerivativeUnavailable",
    "SolutionConstants",
    "FlowField",
    "solution_family_1",
    "solution_family_2",
    "validity_window",
    "correspondence_window",
    "euler_residual",
    "euler_residual_grid",
    "invariants_of_flow",
    "euler_symbol",
    "characteristic_speeds",
]

_PARTIALS = ("u_t", "u_a", "rho_t", "rho_a", "theta_t", "theta_a", "theta_aa")


class OutsideValidity(ValueError):
    """Evaluation point lies outside the field's validity region."""


class DerivativeUnavailable(RuntimeError):
    """A required partial derivative is neither supplied nor computable."""


@dataclass(frozen=True)
class SolutionConstants:
    """Free constants (c1..c5) of an explicit solution family.

    ``family`` selects which closed form the constants feed. For family
    1, ``c1`` must be nonzero and ``c2`` positive (it sits under a
    square root). ``c3`` shifts the time window, ``c4`` and ``c5`` shift
    the two quadratures.
    """

    c1: float = 1.0
    c2: float = 2.0
    c3: float = 0.0
    c4: float = 0.0
    c5: float = 0.0
    family: int = 1

    def __post_init__(self):
        if self.family not in (1, 2):
            raise DomainError("family must be 1 or 2")
        if self.family == 1:
            if self.c1 == 0.0:
                raise DomainError("family 1 needs c1 != 0")
            if not self.c2 > 0.0:
                raise DomainError("family 1 needs c2 > 0")


@dataclass
class FlowField:
    """A candidate flow: three state callables plus optional derivatives.

    ``u``, ``rho`` and ``theta`` map ``(t, a)`` to floats. Exact partial
    derivative callables may be supplied under the names ``u_t``, ``u_a``,
    ``rho_t``, ``rho_a``, ``theta_t``, ``theta_a`` and ``theta_aa``;
    missing ones fall back to central finite differences of the state
    callables. ``validity`` (optional) flags where the field is defined;
    ``window`` (optional) is the maximal time interval of validity.
    """

    u: Callable[[float, float], float]
    rho: Callable[[float, float], float]
    theta: Callable[[float, float], float]
    partials: dict[str, Callable[[float, float], float]] = dc_field(
        default_factory=dict
    )
    validity: Optional[Callable[[float, float], bool]] = None
    window: Optional[tuple[float, float]] = None
    label: str = ""

    def __post_init__(self):
        bad = set(self.partials) - set(_PARTIALS)
        if bad:
            raise DerivativeUnavailable(f"unknown partial names: {sorted(bad)}")

    def is_valid(self, t: float, a: float) -> bool:
        return True if self.validity is None else bool(self.validity(t, a))

    def partial(self, name: str, t: float, a: float) -> float:
        """Evaluate one partial derivative, exact if supplied."""
        if name in self.partials:
            return float(self.partials[name](t, a))
        if name not in _PARTIALS:
            raise DerivativeUnavailable(f"unknown partial name: {name}")
        base = {"u": self.u, "rho": self.rho, "theta": self.theta}[
            name.split("_")[0]
        ]
        wrt = name.split("_")[1]
        if wrt == "t":
            return fd_derivative(lambda s: base(s, a), t, order=1)
        if wrt == "a":
            return fd_derivative(lambda b: base(t, b), a, order=1)
        # theta_aa
        return fd_derivative(lambda b: base(t, b), a, order=2)


def validity_window(consts: SolutionConstants, gas: GasParams) -> tuple[float, float]:
    """Open time interval where cos(c3 - omega t) > 0."""
    w = gas.omega
    t_ref = consts.c3 / w
    return (t_ref - 0.5 * math.pi / w, t_ref + 0.5 * math.pi / w)


def correspondence_window(
    consts: SolutionConstants, gas: GasParams
) -> tuple[float, float]:
    """Half-window where the velocity gradient is nonnegative.

    On this branch the flow's differential invariants trace out the
    graph of the matching constant-type reduced solution, which carries
    the positive square root. The interval is open on the left, closed
    at the window centre.
    """
    w = gas.omega
    t_ref = consts.c3 / w
    return (t_ref - 0.5 * math.pi / w, t_ref)


def _phase(consts: SolutionConstants, gas: GasParams, t: float) -> tuple[float, float]:
    phi = consts.c3 - gas.omega * t
    return math.cos(phi), math.sin(phi)


class _Drift:
    """Shared quadrature machinery of both families.

    ``drift`` is the a-independent velocity component
    ``cf (seci + c4)/cos`` with ``seci`` the antiderivative of
    ``cos**(-2/n)`` based at the window centre. ``nested`` is the
    antiderivative of ``drift / cos``, reduced by parts to the single
    quadrature ``tani`` of ``tan * cos**(-2/n)`` so no quadrature ever
    nests inside another. Quadrature results are cached per time value;
    a tensor grid with twenty distinct times costs twenty integrals.
    """

    def __init__(self, consts: SolutionConstants, gas: GasParams, tol: float):
        if not consts.c2 > 0.0:
            raise DomainError("the drift quadratures need c2 > 0")
        if consts.c1 == 0.0:
            raise DomainError("the drift quadratures need c1 != 0")
        self.consts = consts
        self.gas = gas
        self.w = gas.omega
        self.n = gas.n
        self.t_ref = consts.c3 / self.w
        n = float(self.n)
        self.big_d = (
            consts.c1 * consts.c2 ** (-(n + 2) / (2.0 * n))
            * self.w ** ((n + 2) / n)
        )
        self.cf = -gas.R * self.big_d
        self.quad_tol = tol
        self.seci = lru_cache(maxsize=None)(self._seci)
        self.tani = lru_cache(maxsize=None)(self._tani)

    def _seci(self, t: float) -> float:
        return quadrature(
            lambda tau: _phase(self.consts, self.gas, tau)[0] ** (-2.0 / self.n),
            self.t_ref, t, tol=self.quad_tol,
        )

    def _tani(self, t: float) -> float:
        def integrand(tau: float) -> float:
            c, s = _phase(self.consts, self.gas, tau)
            return (s / c) * c ** (-2.0 / self.n)
        return quadrature(integrand, self.t_ref, t, tol=self.quad_tol)

    def drift(self, t: float) -> float:
        c, _ = _phase(self.consts, self.gas, t)
        return self.cf * (self.seci(t) + self.consts.c4) / c

    def drift_dot(self, t: float) -> float:
        c, s = _phase(self.consts, self.gas, t)
        return self.cf * (
            c ** (-2.0 / self.n - 1.0)
            - self.w * s * (self.seci(t) + self.consts.c4) / (c * c)
        )

    def nested(self, t: float) -> float:
        c, s = _phase(self.consts, self.gas, t)
        return self.cf * (
            -(self.seci(t) + self.consts.c4) * s / c + self.tani(t)
        ) / self.w


def solution_family_1(
    consts: SolutionConstants, gas: GasParams, tol: float = 1e-10
) -> FlowField:
    """First explicit family: spatially uniform density.

    Density depends on time alone, velocity is linear in ``a`` plus the
    shared drift quadrature, and temperature is linear in ``a``. All
    partial derivatives are exact; ``tol`` bounds the quadrature error
    and sets the guard band the validity predicate keeps away from the
    window endpoints.
    """
    if consts.family != 1:
        raise DomainError("constants are tagged for a different family")
    w = gas.omega
    n = gas.n
    c1, c2, c5 = consts.c1, consts.c2, consts.c5
    ex = 1.0 + 2.0 / n
    mach = _Drift(consts, gas, tol)
    big_d = mach.big_d
    drift, drift_dot, nested = mach.drift, mach.drift_dot, mach.nested

    def rho(t: float, a: float) -> float:
        c, _ = _phase(consts, gas, t)
        return w / (math.sqrt(c2) * c)

    def rho_t(t: float, a: float) -> float:
        c, s = _phase(consts, gas, t)
        return -w * w * s / (math.sqrt(c2) * c * c)

    def u(t: float, a: float) -> float:
        c, s = _phase(consts, gas, t)
        return a * w * s / c + drift(t)

    def u_t(t: float, a: float) -> float:
        c, _ = _phase(consts, gas, t)
        return -a * w * w / (c * c) + drift_dot(t)

    def u_a(t: float, a: float) -> float:
        c, s = _phase(consts, gas, t)
        return w * s / c

    def theta(t: float, a: float) -> float:
        c, _ = _phase(consts, gas, t)
        return c1 * a * rho(t, a) ** ex - c ** (-2.0 / n) * (big_d * nested(t) + c5)

    def theta_t(t: float, a: float) -> float:
        c, s = _phase(consts, gas, t)
        lin = c1 * a * ex * rho(t, a) ** (ex - 1.0) * rho_t(t, a)
        shift = (2.0 / n) * w * s * c ** (-2.0 / n - 1.0) * (big_d * nested(t) + c5)
        return lin + shift - c ** (-2.0 / n) * big_d * drift(t) / c

    def theta_a(t: float, a: float) -> float:
        return c1 * rho(t, a) ** ex

    lo, hi = validity_window(consts, gas)
    guard = 10.0 * tol

    def valid(t: float, a: float) -> bool:
        if not (lo + guard < t < hi - guard):
            return False
        return theta(t, a) > 0.0

    return FlowField(
        u=u, rho=rho, theta=theta,
        partials={
            "u_t": u_t, "u_a": u_a,
            "rho_t": rho_t, "rho_a": lambda t, a: 0.0,
            "theta_t": theta_t, "theta_a": theta_a,
            "theta_aa": lambda t, a: 0.0,
        },
        validity=valid,
        window=(lo, hi),
        label="family-1",
    )


def solution_family_2(
    consts: SolutionConstants, gas: GasParams, tol: float = 1e-10
) -> FlowField:
    """Second explicit family: density linear in ``a``, power-law closure.

    Temperature is proportional to density times a time-dependent factor
    ``(c2 cos^2 / omega^2)**((n-2)/(2n))``, which degenerates at n = 2;
    that case is rejected. Velocity carries twice the family-1 drift.
    """
    if consts.family != 2:
        raise DomainError("constants are tagged for a different family")
    if gas.n == 2:
        raise DomainError("family 2 needs n != 2: its exponent 2n/(n-2) degenerates")
    w = gas.omega
    n = gas.n
    c1, c2, c5 = consts.c1, consts.c2, consts.c5
    mach = _Drift(consts, gas, tol)
    drift, drift_dot, nested = mach.drift, mach.drift_dot, mach.nested
    beta = (n - 2.0) / (2.0 * n)
    pref = c1 * w * w / c2

    def rho(t: float, a: float) -> float:
        c, _ = _phase(consts, gas, t)
        return pref * (a / (c * c) - (2.0 * nested(t) + c5) / c)

    def rho_a(t: float, a: float) -> float:
        c, _ = _phase(consts, gas, t)
        return pref / (c * c)

    def rho_t(t: float, a: float) -> float:
        # d/dt of 1/cos^2 is -2 w sin / cos^3 since d(cos)/dt = +w sin here
        c, s = _phase(consts, gas, t)
        dinv2 = -2.0 * w * s / c ** 3
        dnest = 2.0 * drift(t) / (c * c)
        dshift = (2.0 * nested(t) + c5) * w * s / (c * c)
        return pref * (a * dinv2 - dnest + dshift)

    def factor(t: float) -> float:
        c, _ = _phase(consts, gas, t)
        return (c2 * c * c / (w * w)) ** beta

    def factor_dot(t: float) -> float:
        c, s = _phase(consts, gas, t)
        return 2.0 * beta * w * (s / c) * factor(t)

    def u(t: float, a: float) -> float:
        c, s = _phase(consts, gas, t)
        return a * w * s / c + 2.0 * drift(t)

    def u_t(t: float, a: float) -> float:
        c, _ = _phase(consts, gas, t)
        return -a * w * w / (c * c) + 2.0 * drift_dot(t)

    def u_a(t: float, a: float) -> float:
        c, s = _phase(consts, gas, t)
        return w * s / c

    def theta(t: float, a: float) -> float:
        return rho(t, a) * factor(t)

    def theta_t(t: float, a: float) -> float:
        return rho_t(t, a) * factor(t) + rho(t, a) * factor_dot(t)

    def theta_a(t: float, a: float) -> float:
        return rho_a(t, a) * factor(t)

    lo, hi = validity_window(consts, gas)
    guard = 10.0 * tol

    def valid(t: float, a: float) -> bool:
        if not (lo + guard < t < hi - guard):
            return False
        return rho(t, a) > 0.0

    return FlowField(
        u=u, rho=rho, theta=theta,
        partials={
            "u_t": u_t, "u_a": u_a,
            "rho_t": rho_t, "rho_a": rho_a,
            "theta_t": theta_t, "theta_a": theta_a,
            "theta_aa": lambda t, a: 0.0,
        },
        validity=valid,
        window=(lo, hi),
        label="family-2",
    )


def euler_residual(
    flow: FlowField,
    gas: GasParams,
    pot: PlanckPotential,
    t: float,
    a: float,
) -> tuple[float, float, float]:
    """Residuals of (momentum, continuity, energy) at one point.

    All three vanish on exact solutions. Pressure and entropy gradients
    are expanded through the potential's chain rules, so the only
    derivatives taken here are the flow's own partials.

    Raises
    ------
    OutsideValidity
        If the flow's validity predicate rejects ``(t, a)``.
    """
    if not flow.is_valid(t, a):
        raise OutsideValidity(f"({t!r}, {a!r}) outside the field's region")
    rho = flow.rho(t, a)
    theta = flow.theta(t, a)
    u = flow.u(t, a)
    d = {name: flow.partial(name, t, a) for name in _PARTIALS}
    _, p_x, p_y = pressure_partials(pot, gas.R, rho, theta)
    _, s_x, s_y = entropy_partials(pot, gas.R, rho, theta)
    p_a = p_x * d["rho_a"] + p_y * d["theta_a"]
    r1 = rho * (d["u_t"] + u * d["u_a"]) + p_a + 2.0 * gas.g * gas.lam * rho * a
    r2 = d["rho_t"] + d["rho_a"] * u + rho * d["u_a"]
    s_t = s_x * d["rho_t"] + s_y * d["theta_t"]
    s_a = s_x * d["rho_a"] + s_y * d["theta_a"]
    r3 = rho * theta * (s_t + u * s_a) - gas.k * d["theta_aa"]
    return r1, r2, r3


def euler_residual_grid(
    flow: FlowField,
    gas: GasParams,
    pot: PlanckPotential,
    ts: np.ndarray,
    activities: np.ndarray,
) -> np.ndarray:
    """Stack of residual triples over a tensor grid, shape (nt, na, 3).

    Points outside the validity region come back as NaN rather than
    raising, so callers can mask them.
    """
    out = np.empty((len(ts), len(activities), 3))
    for i, t in enumerate(ts):
        for j, a in enumerate(activities):
            try:
                out[i, j] = euler_residual(flow, gas, pot, float(t), float(a))
            except OutsideValidity:
                out[i, j] = np.nan
    return out


def invariants_of_flow(
    flow: FlowField, t: float, a: float
) -> tuple[float, float, float, float, float, float]:
    """First-order differential invariants (x, y, K, L, M, N) of a flow.

    The identification is fixed once and for all:
    ``(x, y, K, L, M, N) = (rho, theta, u_a, rho_a, theta_a,
    theta_t + u theta_a)``. On flows with functionally dependent
    invariants the sextuple traces out the graph of a reduced-equation
    solution.

    Raises
    ------
    OutsideValidity
        If the flow's validity predicate rejects ``(t, a)``.
    """
    if not flow.is_valid(t, a):
        raise OutsideValidity(f"({t!r}, {a!r}) outside the field's region")
    u = flow.u(t, a)
    return (
        flow.rho(t, a),
        flow.theta(t, a),
        flow.partial("u_a", t, a),
        flow.partial("rho_a", t, a),
        flow.partial("theta_a", t, a),
        flow.partial("theta_t", t, a) + u * flow.partial("theta_a", t, a),
    )


def euler_symbol(
    gas: GasParams,
    pot: PlanckPotential,
    state: tuple[float, float, float],
    xi: tuple[float, float],
) -> tuple[np.ndarray, float, float]:
    """Principal symbol of the flow system at a state point.

    ``state`` is ``(u, rho, theta)`` and ``xi = (xi_t, xi_a)`` a
    covector. Rows are ordered (momentum, continuity, energy), columns
    (u, rho, theta); each equation contributes its own top-order terms,
    so the energy row reduces to the conduction entry. The pressure-
    gradient entries of the momentum row are spelled through the
    potential's partials.

    Returns the matrix, its determinant, and the closed-form factored
    determinant ``-k rho xi_a^2 (ell^2 + R rho theta xi_a^2 adm)`` with
    ``ell = xi_t + u xi_a`` and ``adm`` the admissibility combination;
    the two agree identically.
    """
    u, rho, theta = state
    xi1, xi2 = xi
    ell = xi1 + u * xi2
    phi_x = pot.phi_x(rho, theta)
    phi_xx = pot.phi_xx(rho, theta)
    phi_xy = pot.phi_xy(rho, theta)
    m = np.array([
        [
            rho * ell,
            -gas.R * rho * theta * xi2 * (rho * phi_xx + 2.0 * phi_x),
            -gas.R * rho * rho * xi2 * (theta * phi_xy + phi_x),
        ],
        [rho * xi2, ell, 0.0],
        [0.0, 0.0, -gas.k * xi2 * xi2],
    ])
    det_direct = float(np.linalg.det(m))
    adm = admissibility(pot, rho, theta)
    det_factored = (
        -gas.k * rho * xi2 * xi2
        * (ell * ell + gas.R * rho * theta * xi2 * xi2 * adm)
    )
    return m, det_direct, det_factored


def characteristic_speeds(
    gas: GasParams,
    pot: PlanckPotential,
    rho: float,
    theta: float,
    u: float,
) -> tuple[float, float]:
    """Sound-like characteristic speeds u -+ sqrt(-R rho theta adm).

    Real exactly when the admissibility combination is nonpositive; the
    ideal gas gives the familiar u -+ sqrt(R theta).
    """
    adm = admissibility(pot, rho, theta)
    rad = -gas.R * rho * theta * adm
    if rad < 0.0:
        raise DomainError("admissibility violated: characteristics are complex")
    c = math.sqrt(rad)
    return u - c, u + c
