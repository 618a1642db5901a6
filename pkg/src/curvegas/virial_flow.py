"""Series solutions of the invariant flow equations in powers of density.

Expanding the four unknown gradient functions in powers of x (with the
slope component carrying one extra factor of x) decouples the flow
equations order by order. The zeroth order collapses to a single scalar
ODE for the flow-temperature profile N0(y); its closed-form companions
are M0 = c1, K0 = N0', L0 = (c2 - c1 N0')/N0. After an affine rescaling
the profile equation depends on just two parameters (A, B), and its
direction field is studied here as the polynomial planar system

    dy/ds = y - N0**2,      dN0/ds = A*y*N0 + B*N0 + y,

whose equilibria, linearizations, and trajectories this module computes.
The first order is a linear 4x4 ODE system driven by the zeroth-order
profile and the leading virial coefficient; it is solved in triangular
order.

All fixed points lie on the parabola y = N0**2, where the graph form
dN0/dy breaks down; the planar parametrization keeps them regular at
the cost of reversing orientation where y < N0**2.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .numerics import (
    EigenClass,
    Grid1D,
    Grid2D,
    OdeResult,
    classify_2x2,
    cubic_real_roots,
    ode_solve,
)
from .thermo import DomainError, GasParams, VirialCoefficient

__all__ = [
    "OffTrajectory",
    "OnBreakingParabola",
    "SingularLeadingCoefficient",
    "DegenerateScaling",
    "ExpansionOrders",
    "ReducedParams",
    "FixedPoint",
    "ZerothTerm",
    "StopReason",
    "Trajectory",
    "Portrait",
    "zeroth_residual",
    "flow_temperature_rhs",
    "as_planar_system",
    "fixed_points",
    "integrate_trajectory",
    "portrait",
    "default_portrait_window",
    "rescale_to_reduced",
    "first_order_rhs",
    "first_order_residual",
    "integrate_first_order",
]


class OffTrajectory(ValueError):
    """Queried point lies outside the sampled profile, or on a zero of N0."""


class OnBreakingParabola(ValueError):
    """Evaluation requested on or too close to the breaking set y = N0**2."""


class SingularLeadingCoefficient(ArithmeticError):
    """A leading coefficient of the triangular first-order solve vanished.

    Carries ``name``, the coefficient expression, and ``y``, where it
    degenerated.
    """

    def __init__(self, name: str, y: float):
        super().__init__(f"leading coefficient {name} vanishes at y={y!r}")
        self.name = name
        self.y = y


class DegenerateScaling(ValueError):
    """The affine reduction to (A, B) form is not invertible."""


@dataclass(frozen=True)
class ExpansionOrders:
    """Powers of x assigned to the four unknowns in the series ansatz.

    The default (0, 1, 0, 0) gives the slope component one extra factor
    of x and is the only choice used elsewhere in this package; it is
    what makes the zeroth-order system nontrivial.
    """

    d_K: int = 0
    d_L: int = 1
    d_M: int = 0
    d_N: int = 0


@dataclass(frozen=True)
class ReducedParams:
    """The two parameters (A, B) of the rescaled flow-temperature ODE."""

    A: float
    B: float

    def __post_init__(self):
        if not (math.isfinite(self.A) and math.isfinite(self.B)):
            raise ValueError("reduced parameters must be finite")


@dataclass(frozen=True)
class FixedPoint:
    """Equilibrium of the planar system with its linearization.

    Every equilibrium satisfies y = n0**2 and n0*(A*n0**2 + n0 + B) = 0,
    so all of them sit on the breaking parabola.
    """

    y: float
    n0: float
    jacobian: tuple[tuple[float, float], tuple[float, float]]
    klass: EigenClass

    @property
    def trace(self) -> float:
        return self.jacobian[0][0] + self.jacobian[1][1]

    @property
    def det(self) -> float:
        j = self.jacobian
        return j[0][0] * j[1][1] - j[0][1] * j[1][0]


class StopReason(str, enum.Enum):
    """Why a planar trajectory integration ended."""

    REACHED_S_MAX = "ReachedSMax"
    NEAR_FIXED_POINT = "NearFixedPoint"
    LEFT_WINDOW = "LeftWindow"


# Bounds (y, then N0) used when no explicit window is given; they cover
# every equilibrium arising from the parameter sets studied here.
DEFAULT_WINDOW_BOUNDS = ((-1.0, 3.0), (-2.0, 2.0))

# Relative stand-off of a stored profile from the set where its slope
# denominator vanishes, and from zeros of the profile itself.
_PARABOLA_COLLAR = 5e-2
_ZERO_COLLAR = 1e-2


def default_portrait_window(count_y: int = 25, count_n: int = 21) -> Grid2D:
    """Sampling grid over the default (y, N0) window."""
    (ylo, yhi), (nlo, nhi) = DEFAULT_WINDOW_BOUNDS
    return Grid2D(Grid1D(ylo, yhi, count_y), Grid1D(nlo, nhi, count_n))


def _profile_rhs(c1: float, c2: float, c3: float, R: float, omega: float,
                 y: float, n0: float) -> float:
    """dN0/dy of the flow-temperature profile before rescaling."""
    den = c1 * c1 * R * y - n0 * n0
    scale = max(1.0, abs(c1 * c1 * R * y), n0 * n0)
    if abs(den) < 1e-12 * scale:
        raise OnBreakingParabola(
            f"profile slope undefined near c1^2*R*y = N0^2 at y={y!r}"
        )
    num = c1 * c2 * R * y + (omega * omega * y - c3) * n0
    return num / den


def _profile_rhs_partials(c1, c2, c3, R, omega, y, n0):
    """Slope of the profile ODE together with its (y, N0) partials."""
    w2 = omega * omega
    p = c1 * c2 * R * y + (w2 * y - c3) * n0
    q = c1 * c1 * R * y - n0 * n0
    scale = max(1.0, abs(c1 * c1 * R * y), n0 * n0)
    if abs(q) < 1e-12 * scale:
        raise OnBreakingParabola(
            f"profile slope undefined near c1^2*R*y = N0^2 at y={y!r}"
        )
    p_y = c1 * c2 * R + w2 * n0
    p_n = w2 * y - c3
    q_y = c1 * c1 * R
    q_n = -2.0 * n0
    rhs = p / q
    rhs_y = (p_y * q - p * q_y) / (q * q)
    rhs_n = (p_n * q - p * q_n) / (q * q)
    return rhs, rhs_y, rhs_n


def _zeroth_jet(c1, c2, c3, R, omega, y, n0):
    """Closed-form series companions and their y-derivatives.

    Returns (M0, M0', K0, K0', L0, L0') with every derivative taken
    through the profile ODE, so the jet is a pointwise function of
    (y, n0) and never differentiates sampled data.
    """
    if abs(n0) < 1e-12 * max(1.0, abs(c2)):
        raise OffTrajectory(f"companions undefined where N0 vanishes, y={y!r}")
    rhs, rhs_y, rhs_n = _profile_rhs_partials(c1, c2, c3, R, omega, y, n0)
    n0p = rhs
    n0pp = rhs_y + rhs_n * rhs
    k0 = n0p
    k0p = n0pp
    l0 = (c2 - c1 * n0p) / n0
    l0p = (-c1 * n0pp * n0 - (c2 - c1 * n0p) * n0p) / (n0 * n0)
    return c1, 0.0, k0, k0p, l0, l0p


@dataclass(frozen=True)
class ZerothTerm:
    """Zeroth-order series term: a sampled flow-temperature profile.

    The profile N0(y) is integrated once and stored; the companion
    functions M0, K0, L0 are evaluated on demand from the closed forms,
    with all derivatives taken through the profile ODE itself. ``r_gas``
    and ``omega`` record the constants the profile was built with; the
    residual routine accepts its own values so the two can be compared
    independently.
    """

    c1: float
    c2: float
    c3: float
    r_gas: float
    omega: float
    profile: OdeResult
    y_lo: float
    y_hi: float

    @classmethod
    def solve(
        cls,
        c1: float,
        c2: float,
        c3: float,
        R: float,
        omega: float,
        y_span: tuple[float, float],
        n0_init: float,
        tol: float = 1e-10,
    ) -> "ZerothTerm":
        """Integrate the profile ODE over ``y_span`` from ``n0_init``.

        Integration stops early if the trajectory approaches the
        breaking set c1^2*R*y = N0^2 or a zero of N0; the stored span
        then covers only the part where the series companions are
        well conditioned.

        Raises
        ------
        DomainError
            For c1 = 0, R <= 0, or a start point already on a guard set.
        """
        if c1 == 0.0:
            raise DomainError("zeroth term needs c1 != 0")
        if R <= 0.0:
            raise DomainError("gas constant must be positive")
        y0, y1 = float(y_span[0]), float(y_span[1])
        if y0 == y1:
            raise DomainError("empty integration span")

        # Companion second derivatives grow like den^-3 toward the
        # breaking set and like n0^-2 toward a zero of the profile, so
        # float cancellation in the series equations would swamp the
        # 1e-10 residual scale long before the stepper itself fails.
        # The collars below cut those slivers off the stored span; the
        # parabola is approached with a vertical tangent, so the lost
        # y-interval is only O(collar^2).
        def guard(y: float, state: np.ndarray) -> float:
            n0 = float(state[0])
            den = c1 * c1 * R * y - n0 * n0
            dscale = max(1.0, abs(c1 * c1 * R * y), n0 * n0)
            margin_parab = abs(den) - _PARABOLA_COLLAR * dscale
            margin_zero = abs(n0) - _ZERO_COLLAR * max(1.0, abs(c2))
            return min(margin_parab, margin_zero)

        if guard(y0, np.array([n0_init])) <= 0.0:
            raise DomainError(
                "profile start lies on the breaking parabola or on N0 = 0"
            )

        def rhs(y: float, state: np.ndarray) -> Sequence[float]:
            return (_profile_rhs(c1, c2, c3, R, omega, y, float(state[0])),)

        res = ode_solve(rhs, y0, [float(n0_init)], y1, tol=tol, stop=guard)
        lo = float(min(res.ts[0], res.ts[-1]))
        hi = float(max(res.ts[0], res.ts[-1]))
        return cls(float(c1), float(c2), float(c3), float(R), float(omega),
                   res, lo, hi)

    def n0(self, y: float) -> float:
        """Profile value at ``y``; interpolated between accepted steps."""
        if not (self.y_lo <= y <= self.y_hi):
            raise OffTrajectory(
                f"y={y!r} outside profile span [{self.y_lo}, {self.y_hi}]"
            )
        return float(self.profile.at(y)[0])

    @property
    def m0(self) -> float:
        return self.c1

    def k0(self, y: float) -> float:
        jet = _zeroth_jet(self.c1, self.c2, self.c3, self.r_gas, self.omega,
                          y, self.n0(y))
        return jet[2]

    def l0(self, y: float) -> float:
        jet = _zeroth_jet(self.c1, self.c2, self.c3, self.r_gas, self.omega,
                          y, self.n0(y))
        return jet[4]


def zeroth_residual(
    term: ZerothTerm, R: float, omega: float, y: float
) -> tuple[float, float, float, float]:
    """Residuals of the four zeroth-order equations at ``y``.

    The closed-form companions satisfy the system identically once the
    profile slope is substituted, so these residuals measure only
    floating-point cancellation, independent of how accurately the
    profile itself was integrated.

    Returns
    -------
    (e1, e2, e3, e4) : tuple of float
        e1 = M0*M0'
        e2 = M0*N0' - N0*M0' - K0*M0
        e3 = (L0*N0 + M0*K0) * (N0*L0' + M0*K0' + K0*L0)
        e4 = R*M0^2*(y*L0' + M0' + L0) - L0'*N0^2 + M0*(K0^2 + w^2)
             - L0*K0*N0

    Raises
    ------
    OffTrajectory
        ``y`` outside the sampled span, or N0(y) = 0.
    """
    n0 = term.n0(y)
    m0, m0p, k0, k0p, l0, l0p = _zeroth_jet(
        term.c1, term.c2, term.c3, R, omega, y, n0
    )
    n0p = k0
    w2 = omega * omega
    e1 = m0 * m0p
    e2 = m0 * n0p - n0 * m0p - k0 * m0
    e3 = (l0 * n0 + m0 * k0) * (n0 * l0p + m0 * k0p + k0 * l0)
    e4 = (R * m0 * m0 * (y * l0p + m0p + l0) - l0p * n0 * n0
          + m0 * (k0 * k0 + w2) - l0 * k0 * n0)
    return e1, e2, e3, e4


def flow_temperature_rhs(p: ReducedParams, y: float, n0: float) -> float:
    """Slope dN0/dy of the rescaled profile ODE at (y, n0).

    Raises
    ------
    OnBreakingParabola
        Within 1e-12 (relative) of the parabola y = n0**2, where the
        graph representation of solutions breaks.
    """
    den = y - n0 * n0
    scale = max(1.0, abs(y), n0 * n0)
    if abs(den) < 1e-12 * scale:
        raise OnBreakingParabola(f"y = N0^2 breaking set at y={y!r}")
    return (p.A * y * n0 + p.B * n0 + y) / den


def as_planar_system(
    p: ReducedParams,
) -> Callable[[float, np.ndarray], tuple[float, float]]:
    """Polynomial vector field whose orbits carry the profile graphs.

    Multiplying the graph ODE through by its denominator gives

        dy/ds = y - N0**2,      dN0/ds = A*y*N0 + B*N0 + y,

    smooth on all of R^2. Off the parabola its orbits coincide with
    solution graphs; where y < N0**2 the traversal direction is
    reversed relative to increasing y. The returned callable matches the
    right-hand-side signature of :func:`curvegas.numerics.ode_solve`.
    """

    def field(s: float, state: np.ndarray) -> tuple[float, float]:
        y, n0 = float(state[0]), float(state[1])
        return (y - n0 * n0, p.A * y * n0 + p.B * n0 + y)

    return field


def fixed_points(p: ReducedParams) -> list[FixedPoint]:
    """All equilibria of the planar system, classified and sorted.

    Equilibria solve N0*(A*N0^2 + N0 + B) = 0 with y = N0^2. The cubic
    degenerates gracefully for A = 0. A repeated root (A = B = 0 leaves
    only the double root N0 = 0) appears once in the list; the
    multiplicity surfaces through the linearization class, not through
    duplicate entries. Points come back sorted by (y, n0).
    """
    roots = cubic_real_roots(p.A, 1.0, p.B, 0.0)
    points = []
    for n0, _mult in roots:
        n0 += 0.0  # scrub IEEE negative zero out of reports
        y = n0 * n0
        jac = (
            (1.0, -2.0 * n0),
            (p.A * n0 + 1.0, p.A * y + p.B),
        )
        points.append(FixedPoint(y, n0, jac, classify_2x2(jac)))
    points.sort(key=lambda fp: (fp.y, fp.n0))
    return points


@dataclass(frozen=True)
class Trajectory:
    """One integrated orbit of the planar system.

    ``crossings`` lists every point where the orbit met the parabola
    y = N0**2, i.e. where a graph-over-y representation of the same
    solution would break or turn.
    """

    seed: tuple[float, float]
    ode: OdeResult
    reason: StopReason
    crossings: tuple[tuple[float, float, float], ...]

    @property
    def ss(self) -> np.ndarray:
        return self.ode.ts

    @property
    def states(self) -> np.ndarray:
        return self.ode.ys


def _window_bounds(window) -> tuple[tuple[float, float], tuple[float, float]]:
    if window is None:
        return DEFAULT_WINDOW_BOUNDS
    if isinstance(window, Grid2D):
        return ((window.x.lo, window.x.hi), (window.y.lo, window.y.hi))
    (ylo, yhi), (nlo, nhi) = window
    return ((float(ylo), float(yhi)), (float(nlo), float(nhi)))


def integrate_trajectory(
    p: ReducedParams,
    start: tuple[float, float],
    s_max: float,
    tol: float = 1e-8,
    window=None,
    fp_radius: float = 1e-6,
) -> Trajectory:
    """Integrate the planar system from ``start`` for parameter time s.

    Stops at ``s_max``, on leaving ``window`` (a Grid2D, a bounds pair
    ((y_lo, y_hi), (n_lo, n_hi)), or None for the default bounds), or on
    entering a ball of radius ``fp_radius`` around an equilibrium;
    the :class:`Trajectory` records which. Crossings of the parabola
    y = N0**2 are located by bisection on the dense output and reported
    as (s, y, n0) triples.

    Raises
    ------
    ValueError
        ``start`` coincides with a fixed point (within 1e-10), or lies
        outside the window / inside the stopping ball already.
    """
    if s_max <= 0.0:
        raise ValueError("s_max must be positive")
    y0, n0 = float(start[0]), float(start[1])
    fps = fixed_points(p)
    for fp in fps:
        if math.hypot(y0 - fp.y, n0 - fp.n0) <= 1e-10:
            raise ValueError(
                f"start {start!r} coincides with fixed point "
                f"({fp.y}, {fp.n0})"
            )
    (ylo, yhi), (nlo, nhi) = _window_bounds(window)

    def margins(state: np.ndarray) -> tuple[float, float]:
        y, n = float(state[0]), float(state[1])
        win = min(y - ylo, yhi - y, n - nlo, nhi - n)
        near = min(
            (math.hypot(y - fp.y, n - fp.n0) - fp_radius for fp in fps),
            default=math.inf,
        )
        return win, near

    def guard(s: float, state: np.ndarray) -> float:
        win, near = margins(state)
        return min(win, near)

    first = np.array([y0, n0])
    if guard(0.0, first) <= 0.0:
        raise ValueError(
            f"start {start!r} outside the window or within fp_radius "
            "of a fixed point"
        )
    res = ode_solve(as_planar_system(p), 0.0, [y0, n0], float(s_max),
                    tol=tol, stop=guard)
    if res.status == "reached":
        reason = StopReason.REACHED_S_MAX
    else:
        win, near = margins(res.ys[-1])
        reason = (StopReason.NEAR_FIXED_POINT if near <= win
                  else StopReason.LEFT_WINDOW)
    return Trajectory((y0, n0), res, reason, _parabola_crossings(res))


def _parabola_crossings(res: OdeResult) -> tuple[tuple[float, float, float], ...]:
    """Sign changes of y - N0^2 along accepted steps, refined by bisection."""
    phi = res.ys[:, 0] - res.ys[:, 1] ** 2
    out = []
    for i in range(len(phi) - 1):
        a, b = float(phi[i]), float(phi[i + 1])
        if a == 0.0:
            s = float(res.ts[i])
            out.append((s, float(res.ys[i, 0]), float(res.ys[i, 1])))
            continue
        if a * b >= 0.0:
            continue
        lo, hi = float(res.ts[i]), float(res.ts[i + 1])
        ref = math.copysign(1.0, a)
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            ym = res.at(mid)
            v = float(ym[0]) - float(ym[1]) ** 2
            if v != 0.0 and math.copysign(1.0, v) == ref:
                lo = mid
            else:
                hi = mid
            if abs(hi - lo) <= 1e-13 * max(1.0, abs(hi)):
                break
        ym = res.at(hi)
        out.append((hi, float(ym[0]), float(ym[1])))
    if phi[-1] == 0.0:
        out.append((float(res.ts[-1]),
                    float(res.ys[-1, 0]), float(res.ys[-1, 1])))
    return tuple(out)


@dataclass(frozen=True)
class Portrait:
    """Phase-portrait bundle ready for CSV or SVG emission.

    ``field`` holds one row (y, n0, uy, un) per grid node with (uy, un)
    the unit direction of the planar system there, or zeros at an
    equilibrium. ``parabola`` is a polyline along y = N0**2. Seeds that
    violate the trajectory preconditions are collected in
    ``skipped_seeds`` instead of raising.
    """

    params: ReducedParams
    window: Grid2D
    field: np.ndarray
    fixed_points: tuple[FixedPoint, ...]
    trajectories: tuple[Trajectory, ...]
    parabola: np.ndarray
    skipped_seeds: tuple[tuple[float, float], ...]


def portrait(
    p: ReducedParams,
    window: Grid2D,
    seeds: Sequence[tuple[float, float]],
    s_max: float = 30.0,
    tol: float = 1e-8,
) -> Portrait:
    """Direction field, equilibria, and seed orbits over ``window``."""
    vf = as_planar_system(p)
    rows = []
    for yv in window.x.points:
        for nv in window.y.points:
            dy, dn = vf(0.0, np.array([yv, nv]))
            norm = math.hypot(dy, dn)
            if norm == 0.0:
                rows.append((float(yv), float(nv), 0.0, 0.0))
            else:
                rows.append((float(yv), float(nv), dy / norm, dn / norm))
    trajectories = []
    skipped = []
    for seed in seeds:
        try:
            trajectories.append(
                integrate_trajectory(p, seed, s_max, tol=tol, window=window)
            )
        except ValueError:
            skipped.append((float(seed[0]), float(seed[1])))
    ns = np.linspace(window.y.lo, window.y.hi, 401)
    parabola = np.column_stack([ns * ns, ns])
    return Portrait(
        params=p,
        window=window,
        field=np.array(rows),
        fixed_points=tuple(fixed_points(p)),
        trajectories=tuple(trajectories),
        parabola=parabola,
        skipped_seeds=tuple(skipped),
    )


def rescale_to_reduced(
    c1: float, c2: float, c3: float, R: float, omega: float
) -> tuple[ReducedParams, Callable, Callable]:
    """Two-parameter form of the profile ODE plus the point maps.

    The substitution y -> (R*c1^4/c2^2)*y, N0 -> (R*c1^3/c2)*N0 turns
    the five-constant profile ODE into the (A, B) form with
    A = c1^2*w^2/c2^2 and B = -c3/(c1^2*R).

    Returns
    -------
    (params, to_reduced, to_physical)
        ``to_reduced`` maps a physical (y, n0) pair to reduced
        coordinates; ``to_physical`` is its inverse.

    Raises
    ------
    DegenerateScaling
        If c1 = 0, c2 = 0, or R <= 0, where the maps fail to be
        bijective.
    """
    if c1 == 0.0 or c2 == 0.0:
        raise DegenerateScaling("rescaling needs c1 != 0 and c2 != 0")
    if R <= 0.0:
        raise DegenerateScaling("rescaling needs R > 0")
    alpha = R * c1 ** 4 / (c2 * c2)
    beta = R * c1 ** 3 / c2
    params = ReducedParams(
        A=c1 * c1 * omega * omega / (c2 * c2),
        B=-c3 / (c1 * c1 * R),
    )

    def to_reduced(point: tuple[float, float]) -> tuple[float, float]:
        return (point[0] / alpha, point[1] / beta)

    def to_physical(point: tuple[float, float]) -> tuple[float, float]:
        return (alpha * point[0], beta * point[1])

    return params, to_reduced, to_physical


def _first_order_coeffs(z: ZerothTerm, gas: GasParams,
                        a1: VirialCoefficient, y: float):
    """Zeroth-order data and the A1 source term entering the linear system."""
    n0 = z.n0(y)
    m0, m0p, k0, k0p, l0, l0p = _zeroth_jet(
        z.c1, z.c2, z.c3, gas.R, gas.omega, y, n0
    )
    a1v = a1.value(y)
    a1p = a1.deriv(y, 1)
    a1pp = a1.deriv(y, 2)
    ya1_p = a1v + y * a1p
    ya1_pp = 2.0 * a1p + y * a1pp
    qa = (m0 * (m0 * ya1_pp + ya1_p * (3.0 * l0 + m0p))
          + 2.0 * y * a1v * (l0 * l0 + m0 * l0p))
    return n0, m0, m0p, k0, k0p, l0, l0p, qa


def first_order_rhs(
    z: ZerothTerm,
    gas: GasParams,
    a1: VirialCoefficient,
    y: float,
    state: Sequence[float],
) -> tuple[float, float, float, float]:
    """Derivatives (M1', N1', L1', K1') of the first-order system.

    The four linear equations are solved for the four derivatives in
    triangular order: the heat-flux equation yields M1', the mass
    equation then N1', the first momentum equation L1', and the second
    momentum equation K1'. ``state`` is (M1, N1, L1, K1). Pass ``gas``
    consistent with the constants ``z`` was built from.

    Raises
    ------
    SingularLeadingCoefficient
        Naming whichever pivot vanished: k*M0, M0, R*M0^2*y - N0^2, or
        L0*N0 + M0*K0 (the last is the constant c2).
    OffTrajectory
        ``y`` outside the zeroth-order profile span.
    """
    m1, n1, l1, k1 = (float(v) for v in state)
    R, w2, kk, n = gas.R, gas.omega * gas.omega, gas.k, gas.n
    n0, m0, m0p, k0, k0p, l0, l0p, qa = _first_order_coeffs(z, gas, a1, y)
    n0p = k0

    if kk * m0 == 0.0:
        raise SingularLeadingCoefficient("k*M0", y)
    m1p = (R * (y * k0 + n * n0 / 2.0) - kk * (m0p + l0) * m1) / (kk * m0)

    if m0 == 0.0:
        raise SingularLeadingCoefficient("M0", y)
    n1p = (n0 * m1p + n1 * (m0p - l0) + k1 * m0 - m1 * n0p) / m0

    lead3 = R * m0 * m0 * y - n0 * n0
    if abs(lead3) <= 1e-12 * max(1.0, abs(R * m0 * m0 * y), n0 * n0):
        raise SingularLeadingCoefficient("R*M0^2*y - N0^2", y)
    l1p = -(R * m0 * m0 * m1p
            + (m0 * k0 - 2.0 * l0 * n0) * k1
            - (k0 * l0 + 2.0 * l0p * n0) * n1
            + ((2.0 * y * l0p + 3.0 * l0 + 2.0 * m0p) * R * m0
               + k0 * k0 + w2) * m1
            + R * m0 * (y * l0 + m0) * l1
            + R * m0 * qa) / lead3

    lead4 = l0 * n0 + m0 * k0
    if abs(lead4) <= 1e-12 * max(1.0, abs(l0 * n0), abs(m0 * k0)):
        raise SingularLeadingCoefficient("L0*N0 + M0*K0", y)
    k1p = -((R * y * l0 * m0 + n0 * k0) * l1p
            + R * l0 * m0 * m1p
            + n1 * (k0p * l0 + l0p * k0)
            + l1 * (R * m0 * (y * l0p + 2.0 * l0 + m0p)
                    + y * R * l0 * l0 + k0p * n0 + k0 * k0 + w2)
            + m1 * (R * l0 * (y * l0p + 2.0 * l0 + m0p) + k0p * k0)
            + k1 * (m0 * k0p + 4.0 * k0 * l0 + l0p * n0)
            + R * l0 * qa) / lead4

    return m1p, n1p, l1p, k1p


def first_order_residual(
    z: ZerothTerm,
    gas: GasParams,
    a1: VirialCoefficient,
    y: float,
    state: Sequence[float],
    state_prime: Sequence[float],
) -> tuple[float, float, float, float]:
    """Residuals of the four first-order equations at ``y``.

    ``state`` is (M1, N1, L1, K1) and ``state_prime`` its y-derivative,
    typically estimated independently of :func:`first_order_rhs` when
    used as a check on an integrated solution.
    """
    m1, n1, l1, k1 = (float(v) for v in state)
    m1p, n1p, l1p, k1p = (float(v) for v in state_prime)
    R, w2, kk, n = gas.R, gas.omega * gas.omega, gas.k, gas.n
    n0, m0, m0p, k0, k0p, l0, l0p, qa = _first_order_coeffs(z, gas, a1, y)
    n0p = k0
    f1 = kk * m0 * m1p + kk * (m0p + l0) * m1 - R * (y * k0 + n * n0 / 2.0)
    f2 = n0 * m1p - m0 * n1p + n1 * (m0p - l0) + k1 * m0 - m1 * n0p
    f3 = ((R * m0 * m0 * y - n0 * n0) * l1p
          + R * m0 * m0 * m1p
          + (m0 * k0 - 2.0 * l0 * n0) * k1
          - (k0 * l0 + 2.0 * l0p * n0) * n1
          + ((2.0 * y * l0p + 3.0 * l0 + 2.0 * m0p) * R * m0
             + k0 * k0 + w2) * m1
          + R * m0 * (y * l0 + m0) * l1
          + R * m0 * qa)
    f4 = ((l0 * n0 + m0 * k0) * k1p
          + (R * y * l0 * m0 + n0 * k0) * l1p
          + R * l0 * m0 * m1p
          + n1 * (k0p * l0 + l0p * k0)
          + l1 * (R * m0 * (y * l0p + 2.0 * l0 + m0p)
                  + y * R * l0 * l0 + k0p * n0 + k0 * k0 + w2)
          + m1 * (R * l0 * (y * l0p + 2.0 * l0 + m0p) + k0p * k0)
          + k1 * (m0 * k0p + 4.0 * k0 * l0 + l0p * n0)
          + R * l0 * qa)
    return f1, f2, f3, f4


def integrate_first_order(
    z: ZerothTerm,
    gas: GasParams,
    a1: VirialCoefficient,
    y_range: tuple[float, float],
    init: Sequence[float],
    tol: float = 1e-8,
) -> OdeResult:
    """Integrate the first-order linear system over ``y_range``.

    ``init`` is the starting (M1, N1, L1, K1); the result's state
    columns keep that order. ``y_range`` must stay inside the sampled
    zeroth-order profile and clear of the pivot zeros of
    :func:`first_order_rhs`; violations raise mid-integration with the
    offending location attached.

    The step is capped at 1/400 of the range so the dense output stays
    differentiable to high accuracy: residual checks take finite
    differences of it, and the cubic interpolant's derivative error
    grows with the cube of the step.
    """
    init = [float(v) for v in init]
    if len(init) != 4:
        raise ValueError("initial state must have 4 components")

    def rhs(y: float, state: np.ndarray) -> Sequence[float]:
        return first_order_rhs(z, gas, a1, y, state)

    y0, y1 = float(y_range[0]), float(y_range[1])
    return ode_solve(rhs, y0, init, y1, tol=tol,
                     max_step=abs(y1 - y0) / 400.0)
