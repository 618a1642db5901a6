"""Reduced PDE system for the first-order invariants of curve flows.

When a flow's gradient invariants K, L, M, N (velocity, density and
temperature gradients plus the convective temperature rate) are viewed
as functions of density ``x`` and temperature ``y``, the flow equations
collapse to four relations in those six quantities. This module
evaluates the residuals of that reduced system, its principal symbol
and characteristic directions, and constructs the two known families of
solutions that are constant along characteristics.

The reduced chart is valid only where ``M != 0`` and ``x K M + L N !=
0``; residual evaluation refuses points that violate either bound
instead of returning polluted numbers.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Callable, Optional

import numpy as np

from .numerics import fd_derivative
from .thermo import DomainError, GasParams, PlanckPotential, admissibility

__all__ = [
    "NondegeneracyViolated",
    "AltFormUnavailable",
    "EmptyDomain",
    "TresseField",
    "CharacteristicField",
    "QuotientJet",
    "quotient_residual",
    "quotient_residual_alt4",
    "quotient_symbol",
    "characteristic_fields",
    "first_integral_residual",
    "quotsol1",
    "quotsol2",
]

_COMPONENTS = ("K", "L", "M", "N")
_PARTIALS = tuple(f"{c}_{v}" for c in _COMPONENTS for v in ("x", "y"))


class NondegeneracyViolated(ValueError):
    """The reduced chart degenerates at this point (M or xKM + LN ~ 0)."""


class AltFormUnavailable(ValueError):
    """The rewritten fourth equation needs L bounded away from zero."""


class EmptyDomain(ValueError):
    """The requested field has an empty domain of definition."""


@dataclass
class TresseField:
    """Evaluable quadruple (K, L, M, N) over the (x, y) plane.

    Component callables are required; the eight first partials may be
    supplied exactly under names like ``"K_x"`` and otherwise fall back
    to central differences. ``domain`` (optional) is a predicate marking
    where the field is defined.
    """

    K: Callable[[float, float], float]
    L: Callable[[float, float], float]
    M: Callable[[float, float], float]
    N: Callable[[float, float], float]
    partials: dict[str, Callable[[float, float], float]] = dc_field(
        default_factory=dict
    )
    domain: Optional[Callable[[float, float], bool]] = None
    label: str = ""

    def __post_init__(self):
        bad = set(self.partials) - set(_PARTIALS)
        if bad:
            raise ValueError(f"unknown partial names: {sorted(bad)}")

    def in_domain(self, x: float, y: float) -> bool:
        return True if self.domain is None else bool(self.domain(x, y))

    def component(self, name: str, x: float, y: float) -> float:
        return float(getattr(self, name)(x, y))

    def partial(self, name: str, x: float, y: float) -> float:
        """One first partial, exact if supplied, else central fd."""
        if name in self.partials:
            return float(self.partials[name](x, y))
        if name not in _PARTIALS:
            raise ValueError(f"unknown partial name: {name}")
        comp, wrt = name.split("_")
        base = getattr(self, comp)
        if wrt == "x":
            return fd_derivative(lambda s: base(s, y), x, order=1)
        return fd_derivative(lambda s: base(x, s), y, order=1)

    def jet(self, x: float, y: float) -> dict[str, float]:
        """All twelve point values needed by the residuals."""
        out = {c: self.component(c, x, y) for c in _COMPONENTS}
        out.update({p: self.partial(p, x, y) for p in _PARTIALS})
        return out


@dataclass(frozen=True)
class CharacteristicField:
    """One characteristic direction of the reduced system at a point."""

    x: float
    y: float
    vector: tuple[float, float]
    tag: str  # "Z1" | "Z2" | "Z3"


def _check_nondegenerate(x: float, j: dict[str, float]) -> None:
    # chart validity: M and xKM + LN bounded away from zero, with
    # thresholds scaled by the local component magnitudes
    scale = 1.0 + abs(j["K"]) + abs(j["L"]) + abs(j["M"]) + abs(j["N"])
    if abs(j["M"]) <= 1e-10 * scale:
        raise NondegeneracyViolated(f"M ~ 0 at scale {scale!r}")
    combo = x * j["K"] * j["M"] + j["L"] * j["N"]
    combo_scale = 1.0 + abs(x * j["K"] * j["M"]) + abs(j["L"] * j["N"])
    if abs(combo) <= 1e-10 * combo_scale:
        raise NondegeneracyViolated(f"xKM + LN ~ 0 at scale {combo_scale!r}")


def _bracket_w(pot: PlanckPotential, x: float, y: float, j: dict[str, float]) -> float:
    """Third-order potential bracket shared by the last two residuals."""
    K, L, M, N = j["K"], j["L"], j["M"], j["N"]
    Lx, Ly, Mx, My = j["L_x"], j["L_y"], j["M_x"], j["M_y"]
    return (
        x * y * (
            pot.phi_xxx(x, y) * L * L
            + 2.0 * pot.phi_xxy(x, y) * M * L
            + pot.phi_xyy(x, y) * M * M
        )
        + (x * y * L * Lx + x * y * M * Ly + 2.0 * x * L * M + 3.0 * y * L * L)
        * pot.phi_xx(x, y)
        + (x * y * L * Mx + M * (x * y * My + 2.0 * x * M + 3.0 * y * L))
        * pot.phi_xy(x, y)
        + (2.0 * y * L * Lx + 2.0 * y * M * Ly + x * L * Mx + M * (x * My + 3.0 * L))
        * pot.phi_x(x, y)
    )


def quotient_residual(
    f: TresseField,
    gas: GasParams,
    pot: PlanckPotential,
    x: float,
    y: float,
) -> tuple[float, float, float, float]:
    """Residuals of the four reduced equations at ``(x, y)``.

    All four vanish on solutions. The first couples the temperature
    gradients, the second is the conduction balance, and the last two
    carry the third-order potential bracket.

    Raises
    ------
    DomainError
        Outside the thermodynamic domain or the field's own domain.
    NondegeneracyViolated
        Where the reduced chart degenerates (see module docstring).
    """
    if not f.in_domain(x, y):
        raise DomainError(f"({x!r}, {y!r}) outside the field's domain")
    if not (x > 0.0 and y > 0.0):
        raise DomainError("reduced equations need x > 0 and y > 0")
    j = f.jet(x, y)
    _check_nondegenerate(x, j)
    K, L, M, N = j["K"], j["L"], j["M"], j["N"]
    Kx, Ky = j["K_x"], j["K_y"]
    Lx, Ly = j["L_x"], j["L_y"]
    Mx, My = j["M_x"], j["M_y"]
    Nx, Ny = j["N_x"], j["N_y"]
    w2 = gas.omega ** 2
    q1 = x * K * Mx - N * My + L * Nx + M * (Ny - K)
    q2 = (
        gas.R * x * y * (
            x * K * (pot.phi_x(x, y) + y * pot.phi_xy(x, y))
            - N * (2.0 * pot.phi_y(x, y) + y * pot.phi_yy(x, y))
        )
        + gas.k * (L * Mx + M * My)
    )
    w = _bracket_w(pot, x, y, j)
    q3 = (
        gas.R * L * w
        + x * K * K * Lx
        - K * N * Ly
        - (x * K * M + L * N) * Ky
        - 3.0 * L * K * K
        - w2 * L
    )
    q4 = (
        gas.R * M * x * w
        + N * N * Ly
        - x * K * N * Lx
        + (x * K * M + L * N) * x * Kx
        + 2.0 * L * K * N
        - (K * K + w2) * x * M
    )
    return q1, q2, q3, q4


def quotient_residual_alt4(f: TresseField, x: float, y: float) -> float:
    """Rewritten fourth equation, valid where L is bounded away from 0.

    Evaluates ``x (M K_y - K L_x + L K_x) + N L_y + 2 K L``; on
    solutions with nonvanishing L this vanishes together with the four
    printed residuals.

    Raises
    ------
    AltFormUnavailable
        When |L| <= 1e-10 times the local component scale.
    """
    j = f.jet(x, y)
    K, L, M, N = j["K"], j["L"], j["M"], j["N"]
    scale = 1.0 + abs(K) + abs(M) + abs(N)
    if abs(L) <= 1e-10 * scale:
        raise AltFormUnavailable(f"|L| = {abs(L)!r} too small at ({x!r}, {y!r})")
    return (
        x * (M * j["K_y"] - K * j["L_x"] + L * j["K_x"])
        + N * j["L_y"]
        + 2.0 * K * L
    )


@dataclass(frozen=True)
class QuotientJet:
    """Point data feeding the principal symbol: coordinates, component
    values, and the potential partials the matrix entries contain."""

    x: float
    y: float
    K: float
    L: float
    M: float
    N: float
    phi_x: float
    phi_xx: float
    phi_xy: float

    @classmethod
    def of_field(
        cls, f: TresseField, pot: PlanckPotential, x: float, y: float
    ) -> "QuotientJet":
        return cls(
            x=x, y=y,
            K=f.component("K", x, y), L=f.component("L", x, y),
            M=f.component("M", x, y), N=f.component("N", x, y),
            phi_x=pot.phi_x(x, y), phi_xx=pot.phi_xx(x, y),
            phi_xy=pot.phi_xy(x, y),
        )


def quotient_symbol(
    jet: QuotientJet, gas: GasParams, xi: tuple[float, float]
) -> tuple[np.ndarray, float, float]:
    """Principal symbol of the reduced system at a jet point.

    Rows follow the equation order (conduction, gradient coupling,
    third, fourth); columns are the unknowns (K, L, M, N). Returns the
    matrix, its direct determinant, and the factored determinant

        -k (KMx + LN) c^2 (R x y c^2 (x phi_xx + 2 phi_x) + b^2)

    with ``c = L xi1 + M xi2`` and ``b = x K xi1 - N xi2``. The two
    determinant routes agree identically; the factored form shows that
    characteristic covectors either annihilate ``c`` (a double root) or
    solve a quadratic whose reality is governed by admissibility.
    """
    x, y = jet.x, jet.y
    K, L, M, N = jet.K, jet.L, jet.M, jet.N
    xi1, xi2 = xi
    c = L * xi1 + M * xi2
    b = x * K * xi1 - N * xi2
    s = x * jet.phi_xx + 2.0 * jet.phi_x
    grad = y * jet.phi_xy + jet.phi_x
    a_entry = gas.R * y * L * c * s + K * b
    b_entry = gas.R * y * x * M * c * s - N * b
    m = np.array([
        [0.0, 0.0, gas.k * c, 0.0],
        [0.0, 0.0, b, c],
        [-(x * K * M + L * N) * xi2, a_entry, gas.R * x * L * c * grad, 0.0],
        [x * (x * K * M + L * N) * xi1, b_entry, gas.R * x * x * M * c * grad, 0.0],
    ])
    det_direct = float(np.linalg.det(m))
    det_factored = (
        -gas.k * (K * M * x + L * N) * c * c
        * (gas.R * x * y * c * c * s + b * b)
    )
    return m, det_direct, det_factored


def characteristic_fields(
    f: TresseField,
    pot: PlanckPotential,
    gas: GasParams,
    x: float,
    y: float,
) -> list[CharacteristicField]:
    """Characteristic directions of the reduced system at ``(x, y)``.

    Z1 = (L, M) always exists. Z2 and Z3 add and subtract
    ``sqrt(-R x y (x phi_xx + 2 phi_x))`` times Z1 to the transverse
    direction ``(x K, -N)``; they are returned exactly when the
    admissibility combination is nonpositive and are otherwise absent
    (never complex).
    """
    K = f.component("K", x, y)
    L = f.component("L", x, y)
    M = f.component("M", x, y)
    N = f.component("N", x, y)
    fields = [CharacteristicField(x, y, (L, M), "Z1")]
    adm = admissibility(pot, x, y)
    rad = -gas.R * x * y * adm
    if rad >= 0.0:
        root = math.sqrt(rad)
        fields.append(
            CharacteristicField(x, y, (x * K + root * L, -N + root * M), "Z2")
        )
        fields.append(
            CharacteristicField(x, y, (x * K - root * L, -N - root * M), "Z3")
        )
    return fields


def first_integral_residual(
    z: CharacteristicField, h: Callable[[float, float], float]
) -> float:
    """Directional derivative of the scalar field ``h`` along ``z``.

    Vanishes when ``h`` is a first integral of the characteristic
    direction. Derivatives of ``h`` are taken by central differences at
    the field's base point.
    """
    hx = fd_derivative(lambda s: h(s, z.y), z.x, order=1)
    hy = fd_derivative(lambda s: h(z.x, s), z.y, order=1)
    return z.vector[0] * hx + z.vector[1] * hy


def _pospow(base: float, expo: float) -> float:
    # fractional powers only on positive bases; the physical domain
    # guarantees positivity, so a nonpositive base is a caller bug
    if base <= 0.0:
        raise DomainError(f"fractional power of nonpositive base {base!r}")
    return math.exp(expo * math.log(base))


def quotsol1(c1: float, c2: float, n: int, omega: float) -> TresseField:
    """First constant-type solution: L = 0, M a power of x.

    Defined where ``c2 x^2 > omega^2`` (strictly, so the root in K stays
    differentiable) and x, y > 0. All partials are exact.

    Raises
    ------
    EmptyDomain
        When c2 <= 0, which leaves no admissible x at all.
    DomainError
        When c1 = 0 (the field would violate M != 0 everywhere).
    """
    if c1 == 0.0:
        raise DomainError("c1 must be nonzero")
    if c2 <= 0.0:
        raise EmptyDomain("c2 <= 0 leaves no x with c2 x^2 > omega^2")
    ex = 1.0 + 2.0 / n
    w2 = omega * omega

    def root(x: float) -> float:
        return math.sqrt(c2 * x * x - w2)

    def kf(x: float, y: float) -> float:
        return root(x)

    def mf(x: float, y: float) -> float:
        return c1 * _pospow(x, ex)

    def nf(x: float, y: float) -> float:
        return -(2.0 * y / n) * root(x)

    def domain(x: float, y: float) -> bool:
        return x > 0.0 and y > 0.0 and c2 * x * x > w2

    return TresseField(
        K=kf,
        L=lambda x, y: 0.0,
        M=mf,
        N=nf,
        partials={
            "K_x": lambda x, y: c2 * x / root(x),
            "K_y": lambda x, y: 0.0,
            "L_x": lambda x, y: 0.0,
            "L_y": lambda x, y: 0.0,
            "M_x": lambda x, y: c1 * ex * _pospow(x, ex - 1.0),
            "M_y": lambda x, y: 0.0,
            "N_x": lambda x, y: -(2.0 * y / n) * c2 * x / root(x),
            "N_y": lambda x, y: -(2.0 / n) * root(x),
        },
        domain=domain,
        label="quotsol1",
    )


def quotsol2(c1: float, c2: float, n: int, omega: float) -> TresseField:
    """Second constant-type solution: L and M proportional through y/x.

    Built on the ratio power ``(x/y)^(2n/(n-2))``; n = 2 is rejected.
    Defined where ``c2 (x/y)^m > omega^2`` with x, y > 0.
    """
    if c1 == 0.0:
        raise DomainError("c1 must be nonzero")
    if n == 2:
        raise DomainError("n = 2 degenerates the exponent 2n/(n-2)")
    if c2 <= 0.0:
        raise EmptyDomain("c2 <= 0 leaves no (x, y) with c2 (x/y)^m > omega^2")
    m_ex = 2.0 * n / (n - 2.0)
    w2 = omega * omega

    def ratio(x: float, y: float) -> float:
        return _pospow(x / y, m_ex)

    def lf(x: float, y: float) -> float:
        return c1 * ratio(x, y)

    def mf(x: float, y: float) -> float:
        return (y / x) * lf(x, y)

    def kf(x: float, y: float) -> float:
        return math.sqrt(c2 * ratio(x, y) - w2)

    def nf(x: float, y: float) -> float:
        return -(2.0 * y / n) * kf(x, y)

    def domain(x: float, y: float) -> bool:
        return x > 0.0 and y > 0.0 and c2 * ratio(x, y) > w2

    # d ratio/dx = m ratio / x, d ratio/dy = -m ratio / y
    def k_x(x: float, y: float) -> float:
        return 0.5 * c2 * m_ex * ratio(x, y) / (x * kf(x, y))

    def k_y(x: float, y: float) -> float:
        return -0.5 * c2 * m_ex * ratio(x, y) / (y * kf(x, y))

    return TresseField(
        K=kf,
        L=lf,
        M=mf,
        N=nf,
        partials={
            "K_x": k_x,
            "K_y": k_y,
            "L_x": lambda x, y: c1 * m_ex * ratio(x, y) / x,
            "L_y": lambda x, y: -c1 * m_ex * ratio(x, y) / y,
            "M_x": lambda x, y: c1 * (m_ex - 1.0) * y * ratio(x, y) / (x * x),
            "M_y": lambda x, y: c1 * (1.0 - m_ex) * ratio(x, y) / x,
            "N_x": lambda x, y: -(2.0 * y / n) * k_x(x, y),
            "N_y": lambda x, y: -(2.0 / n) * (kf(x, y) + y * k_y(x, y)),
        },
        domain=domain,
        label="quotsol2",
    )
