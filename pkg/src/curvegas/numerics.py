"""Shared numerical kernels: differentiation, quadrature, ODE stepping,
cubic root finding, and linear stability classification.

Everything here is deterministic: no global RNG, no adaptive behaviour
that depends on dict ordering or platform clocks. The ODE stepper and
the quadrature routine are hand-rolled so their step-size decisions are
reproducible bit for bit across runs.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "NonFiniteSample",
    "ToleranceNotMet",
    "SingularityEncountered",
    "NoRoots",
    "UnsupportedOrder",
    "EigenClass",
    "Grid1D",
    "Grid2D",
    "fd_derivative",
    "quadrature",
    "OdeResult",
    "ode_solve",
    "cubic_real_roots",
    "classify_2x2",
]


class NonFiniteSample(ArithmeticError):
    """A sampled function value was NaN or infinite."""


class ToleranceNotMet(ArithmeticError):
    """An adaptive routine exhausted its budget before reaching tolerance."""


class SingularityEncountered(RuntimeError):
    """The ODE stepper drove the step size below the representable floor.

    Carries ``t`` and ``state``, the last accepted point before the blow-up.
    """

    def __init__(self, t: float, state: np.ndarray):
        super().__init__(f"step size underflow near t={t!r}")
        self.t = t
        self.state = state


class NoRoots(ValueError):
    """The polynomial has no real roots."""


class UnsupportedOrder(ValueError):
    """Requested derivative order outside the implemented range."""


class EigenClass(str, enum.Enum):
    """Linearization type of a planar fixed point."""

    STABLE_NODE = "StableNode"
    UNSTABLE_NODE = "UnstableNode"
    SADDLE = "Saddle"
    CENTRE = "Centre"
    STABLE_SPIRAL = "StableSpiral"
    UNSTABLE_SPIRAL = "UnstableSpiral"
    DEGENERATE = "Degenerate"


@dataclass(frozen=True)
class Grid1D:
    """Uniform closed-interval grid.

    Parameters
    ----------
    lo, hi : float
        Interval endpoints, ``lo < hi``.
    count : int
        Number of sample points, at least 2; endpoints included.
    """

    lo: float
    hi: float
    count: int

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise ValueError("grid endpoints must be finite")
        if self.hi <= self.lo:
            raise ValueError("grid needs hi > lo")
        if self.count < 2:
            raise ValueError("grid needs at least 2 points")

    @property
    def points(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.count)

    @property
    def step(self) -> float:
        return (self.hi - self.lo) / (self.count - 1)


@dataclass(frozen=True)
class Grid2D:
    """Tensor product of two 1-d grids; ``x`` varies along axis 0."""

    x: Grid1D
    y: Grid1D

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.x.points, self.y.points, indexing="ij")


# Central-difference steps per derivative order. Higher orders divide by
# h^order, so roundoff forces a larger step than the textbook 1e-6.
_FD_DEFAULT_STEP = {1: 1e-5, 2: 1e-3, 3: 5e-3}


def _central(f: Callable[[float], float], x: float, order: int, h: float) -> float:
    if order == 1:
        return (f(x + h) - f(x - h)) / (2.0 * h)
    if order == 2:
        return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h)
    # order == 3
    return (f(x + 2 * h) - 2.0 * f(x + h) + 2.0 * f(x - h) - f(x - 2 * h)) / (
        2.0 * h ** 3
    )


def fd_derivative(
    f: Callable[[float], float],
    x: float,
    order: int = 1,
    step: float | None = None,
) -> float:
    """Numerical derivative of ``f`` at ``x`` by central differences.

    Uses the second-order central stencil for the requested order plus one
    Richardson extrapolation level, giving O(h^4) truncation error. The
    default step is order-dependent and scaled by ``max(1, |x|)``; pass
    ``step`` to override.

    Parameters
    ----------
    f : callable
        Scalar function of one real variable.
    x : float
        Evaluation point.
    order : int
        Derivative order, 1 through 3.
    step : float, optional
        Base step h before Richardson halving.

    Returns
    -------
    float

    Raises
    ------
    UnsupportedOrder
        For ``order`` outside 1..3.
    NonFiniteSample
        If any stencil sample is NaN or infinite.
    """
    if order not in _FD_DEFAULT_STEP:
        raise UnsupportedOrder(f"derivative order {order} not in 1..3")
    h = step if step is not None else _FD_DEFAULT_STEP[order] * max(1.0, abs(x))
    coarse = _central(f, x, order, h)
    fine = _central(f, x, order, h / 2.0)
    val = (4.0 * fine - coarse) / 3.0
    if not math.isfinite(val):
        raise NonFiniteSample(f"non-finite stencil near x={x!r}")
    return val


def _simpson(fa: float, fm: float, fb: float, width: float) -> float:
    return width * (fa + 4.0 * fm + fb) / 6.0


def quadrature(
    f: Callable[[float], float],
    a: float,
    b: float,
    tol: float = 1e-10,
    max_depth: int = 48,
) -> float:
    """Adaptive Simpson integral of ``f`` over ``[a, b]``.

    Bisects intervals until the usual (S_left + S_right - S_whole)/15
    error estimate is below the locally apportioned tolerance.

    Raises
    ------
    NonFiniteSample
        If ``f`` returns NaN or infinity anywhere it is sampled.
    ToleranceNotMet
        If recursion depth ``max_depth`` is exhausted on some subinterval.
    """
    if a == b:
        return 0.0
    sign = 1.0
    if b < a:
        a, b = b, a
        sign = -1.0

    def sample(x: float) -> float:
        v = f(x)
        if not math.isfinite(v):
            raise NonFiniteSample(f"integrand non-finite at x={x!r}")
        return v

    def recurse(lo: float, hi: float, flo: float, fmid: float, fhi: float,
                whole: float, eps: float, depth: int) -> float:
        mid = 0.5 * (lo + hi)
        lmid = 0.5 * (lo + mid)
        rmid = 0.5 * (mid + hi)
        fl = sample(lmid)
        fr = sample(rmid)
        left = _simpson(flo, fl, fmid, mid - lo)
        right = _simpson(fmid, fr, fhi, hi - mid)
        err = left + right - whole
        if abs(err) <= 15.0 * eps:
            return left + right + err / 15.0
        if depth <= 0:
            raise ToleranceNotMet(
                f"quadrature depth exhausted on [{lo!r}, {hi!r}]"
            )
        half = 0.5 * eps
        return (
            recurse(lo, mid, flo, fl, fmid, left, half, depth - 1)
            + recurse(mid, hi, fmid, fr, fhi, right, half, depth - 1)
        )

    fa, fm, fb = sample(a), sample(0.5 * (a + b)), sample(b)
    whole = _simpson(fa, fm, fb, b - a)
    return sign * recurse(a, b, fa, fm, fb, whole, tol, max_depth)


# Dormand-Prince 5(4) tableau. Seventh stage is FSAL.
_DP_C = (0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0)
_DP_A = (
    (),
    (1.0 / 5.0,),
    (3.0 / 40.0, 9.0 / 40.0),
    (44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0),
    (19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0),
    (9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0,
     -5103.0 / 18656.0),
    (35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0,
     11.0 / 84.0),
)
_DP_B5 = (35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0,
          11.0 / 84.0, 0.0)
_DP_B4 = (5179.0 / 57600.0, 0.0, 7571.0 / 16695.0, 393.0 / 640.0,
          -92097.0 / 339200.0, 187.0 / 2100.0, 1.0 / 40.0)


@dataclass
class OdeResult:
    """Accepted-step trajectory from :func:`ode_solve`.

    ``ts`` is strictly monotone (increasing or decreasing with the
    integration direction); ``ys`` has one row per entry of ``ts`` and
    ``derivs`` the matching right-hand-side values, kept so that ``at``
    can interpolate with cubic Hermite accuracy between steps.
    ``status`` is ``"reached"`` when integration hit the endpoint and
    ``"event"`` when the stop function changed sign first, in which case
    ``event_t`` holds the refined crossing time.
    """

    ts: np.ndarray
    ys: np.ndarray
    derivs: np.ndarray
    status: str
    event_t: float | None = None

    def at(self, t: float) -> np.ndarray:
        """Cubic Hermite interpolation of the state at time ``t``."""
        ts = self.ts
        lo, hi = (ts[0], ts[-1]) if ts[0] <= ts[-1] else (ts[-1], ts[0])
        if not (lo <= t <= hi):
            raise ValueError(f"t={t!r} outside integrated span [{lo}, {hi}]")
        side = "right" if ts[0] <= ts[-1] else "left"
        if side == "right":
            i = int(np.searchsorted(ts, t, side="right")) - 1
        else:
            i = len(ts) - int(np.searchsorted(ts[::-1], t, side="left")) - 1
        i = max(0, min(i, len(ts) - 2))
        return _hermite(
            ts[i], self.ys[i], self.derivs[i],
            ts[i + 1], self.ys[i + 1], self.derivs[i + 1], t,
        )


def _hermite(t0, y0, f0, t1, y1, f1, t):
    h = t1 - t0
    if h == 0.0:
        return np.array(y0, dtype=float)
    s = (t - t0) / h
    h00 = (1 + 2 * s) * (1 - s) ** 2
    h10 = s * (1 - s) ** 2
    h01 = s * s * (3 - 2 * s)
    h11 = s * s * (s - 1)
    return h00 * y0 + h10 * h * f0 + h01 * y1 + h11 * h * f1


def ode_solve(
    rhs: Callable[[float, np.ndarray], Sequence[float]],
    t0: float,
    y0: Sequence[float],
    t1: float,
    tol: float = 1e-8,
    stop: Callable[[float, np.ndarray], float] | None = None,
    max_steps: int = 200_000,
    max_step: float | None = None,
) -> OdeResult:
    """Integrate ``y' = rhs(t, y)`` from ``t0`` to ``t1``.

    Embedded Dormand-Prince 5(4) pair with proportional step control.
    The local error is measured in a mixed norm with absolute floor
    ``tol * 1e-2`` and relative weight ``tol``, so ``tol`` behaves like a
    relative tolerance away from zero.

    Parameters
    ----------
    rhs : callable
        Right-hand side ``(t, y) -> dy/dt``; must return finite values.
    t0, t1 : float
        Integration span; ``t1 < t0`` integrates backwards.
    y0 : sequence of float
        Initial state.
    tol : float
        Error-control tolerance.
    stop : callable, optional
        Scalar event function. Integration halts the first time its sign
        differs from the sign at ``t0``; the crossing is refined by
        bisection on the dense interpolant and reported in ``event_t``.
    max_steps : int
        Accepted-step budget.
    max_step : float, optional
        Upper bound on the step magnitude. The error estimator does not
        see interpolation quality between accepted steps, so callers
        that differentiate the dense output should cap the step.

    Raises
    ------
    ToleranceNotMet
        Step budget exhausted.
    SingularityEncountered
        Step size underflow, typically a finite-time blow-up.
    NonFiniteSample
        Right-hand side returned NaN or infinity.
    """
    y = np.asarray(y0, dtype=float)
    if y.ndim != 1:
        raise ValueError("y0 must be one-dimensional")
    if t1 == t0:
        k = _rhs_checked(rhs, t0, y)
        one = np.array([t0])
        return OdeResult(one, y[None, :], k[None, :], "reached")
    direction = 1.0 if t1 > t0 else -1.0
    span = abs(t1 - t0)
    atol = tol * 1e-2

    ts = [t0]
    ys = [y.copy()]
    k1 = _rhs_checked(rhs, t0, y)
    ks = [k1.copy()]
    stop_ref = None
    if stop is not None:
        stop_ref = math.copysign(1.0, stop(t0, y))

    # Initial step from the usual |y|/|y'| heuristic, capped by the span.
    scale = atol + tol * np.abs(y)
    d0 = float(np.sqrt(np.mean((y / scale) ** 2)))
    d1 = float(np.sqrt(np.mean((k1 / scale) ** 2)))
    h = 0.01 * d0 / d1 if d0 > 1e-5 and d1 > 1e-5 else 1e-6 * span
    h_cap = abs(max_step) if max_step else math.inf
    h = direction * min(h, 0.1 * span, h_cap)

    t = t0
    for _ in range(max_steps):
        if abs(h) > h_cap:
            h = direction * h_cap
        if direction * (t + h - t1) > 0.0:
            h = t1 - t
        if abs(h) < 1e-14 * max(1.0, abs(t)):
            raise SingularityEncountered(t, ys[-1])
        stages = [k1]
        for i in range(1, 7):
            acc = np.zeros_like(y)
            for j, a in enumerate(_DP_A[i]):
                acc += a * stages[j]
            stages.append(_rhs_checked(rhs, t + _DP_C[i] * h, y + h * acc))
        y5 = y + h * sum(b * k for b, k in zip(_DP_B5, stages))
        y4 = y + h * sum(b * k for b, k in zip(_DP_B4, stages))
        scale = atol + tol * np.maximum(np.abs(y), np.abs(y5))
        err = float(np.sqrt(np.mean(((y5 - y4) / scale) ** 2)))
        if err <= 1.0:
            t_new = t + h
            k_new = stages[6]  # FSAL: stage 7 is rhs at (t+h, y5)
            if stop is not None:
                val = stop(t_new, y5)
                if val == 0.0 or math.copysign(1.0, val) != stop_ref:
                    t_ev, y_ev = _refine_event(
                        stop, t, y, k1, t_new, y5, k_new, stop_ref
                    )
                    ts.append(t_ev)
                    ys.append(y_ev)
                    ks.append(_rhs_checked(rhs, t_ev, y_ev))
                    return OdeResult(
                        np.array(ts), np.array(ys), np.array(ks),
                        "event", event_t=t_ev,
                    )
            t, y, k1 = t_new, y5, k_new
            ts.append(t)
            ys.append(y.copy())
            ks.append(k1.copy())
            if t == t1:
                return OdeResult(np.array(ts), np.array(ys), np.array(ks),
                                 "reached")
        factor = 0.9 * err ** -0.2 if err > 0.0 else 5.0
        h *= min(5.0, max(0.2, factor))
    raise ToleranceNotMet(f"step budget {max_steps} exhausted at t={t!r}")


def _rhs_checked(rhs, t, y) -> np.ndarray:
    k = np.asarray(rhs(t, y), dtype=float)
    if not np.all(np.isfinite(k)):
        raise NonFiniteSample(f"rhs non-finite at t={t!r}")
    return k


def _refine_event(stop, t0, y0, f0, t1, y1, f1, ref_sign):
    """Bisect the Hermite interpolant until the event bracket collapses."""
    a, b = t0, t1
    for _ in range(80):
        m = 0.5 * (a + b)
        ym = _hermite(t0, y0, f0, t1, y1, f1, m)
        if math.copysign(1.0, stop(m, ym)) == ref_sign:
            a = m
        else:
            b = m
        if abs(b - a) <= 1e-13 * max(1.0, abs(b)):
            break
    yb = _hermite(t0, y0, f0, t1, y1, f1, b)
    return b, yb


def cubic_real_roots(
    c3: float, c2: float, c1: float, c0: float, tol: float = 1e-12
) -> list[tuple[float, int]]:
    """Real roots of ``c3 x^3 + c2 x^2 + c1 x + c0`` with multiplicities.

    Leading coefficients within ``tol`` (relative to the largest
    coefficient) are treated as zero, so quadratics and linears are
    handled too. Roots from the closed-form solve are polished with a few
    Newton steps and then clustered to detect multiplicity.

    Returns
    -------
    list of (root, multiplicity)
        Sorted ascending by root. Multiplicities sum to the effective
        degree.

    Raises
    ------
    ValueError
        If all four coefficients vanish (identically zero polynomial).
    NoRoots
        If the polynomial is a nonzero constant or a quadratic with
        negative discriminant.
    """
    coeffs = [float(c3), float(c2), float(c1), float(c0)]
    top = max(abs(c) for c in coeffs)
    if top == 0.0:
        raise ValueError("identically zero polynomial")
    cut = tol * top
    cs = [0.0 if abs(c) < cut else c for c in coeffs]
    while cs and cs[0] == 0.0:
        cs.pop(0)
    degree = len(cs) - 1
    if degree <= 0:
        raise NoRoots("nonzero constant polynomial")
    if degree == 1:
        return [(-cs[1] / cs[0], 1)]
    if degree == 2:
        a, b, c = cs
        disc = b * b - 4.0 * a * c
        if disc < -cut * cut:
            raise NoRoots("complex quadratic pair")
        if disc <= cut * max(1.0, b * b):
            return [(-b / (2.0 * a), 2)]
        sq = math.sqrt(disc)
        # Numerically stable split: avoid cancellation in the small root.
        q = -0.5 * (b + math.copysign(sq, b))
        roots = sorted([q / a, c / q]) if q != 0.0 else sorted(
            [(-b + sq) / (2 * a), (-b - sq) / (2 * a)]
        )
        return [(roots[0], 1), (roots[1], 1)]

    a, b, c, d = cs
    # Depressed form t^3 + p t + q with x = t - b/(3a).
    shift = b / (3.0 * a)
    p = (3.0 * a * c - b * b) / (3.0 * a * a)
    q = (2.0 * b ** 3 - 9.0 * a * b * c + 27.0 * a * a * d) / (27.0 * a ** 3)
    disc = -4.0 * p ** 3 - 27.0 * q * q
    scale3 = max(1.0, abs(p)) ** 3 + q * q
    if disc > tol * scale3:
        # Three distinct real roots: trigonometric method.
        m = 2.0 * math.sqrt(-p / 3.0)
        arg = 3.0 * q / (p * m)
        arg = min(1.0, max(-1.0, arg))
        theta = math.acos(arg) / 3.0
        raw = [m * math.cos(theta - 2.0 * math.pi * k / 3.0) for k in range(3)]
        roots = sorted(_newton_polish(a, b, c, d, r - shift) for r in raw)
        return [(r, 1) for r in roots]
    if disc >= -tol * scale3:
        # A multiple root is also a root of the derivative, and the
        # derivative's quadratic stays well conditioned even when p and
        # q are both tiny (the near-triple regime, where the textbook
        # -1.5 q/p split is a 0/0 ratio).
        dd = b * b - 3.0 * a * c
        if dd <= 0.0:
            return [(-shift + 0.0, 3)]  # + 0.0 scrubs -0.0
        sq = math.sqrt(dd)
        cand = [(-b + sq) / (3.0 * a), (-b - sq) / (3.0 * a)]
        double = min(
            cand, key=lambda r: abs(((a * r + b) * r + c) * r + d)
        )
        single = -b / a - 2.0 * double  # root sum of the cubic
        double = _newton_polish(a, b, c, d, double)
        single = _newton_polish(a, b, c, d, single)
        pairs = sorted([(double, 2), (single, 1)])
        return pairs
    # One real root: Cardano with cube roots of real quantities.
    half_q = -q / 2.0
    root_term = math.sqrt(q * q / 4.0 + p ** 3 / 27.0)
    u = _cbrt(half_q + root_term)
    v = _cbrt(half_q - root_term)
    r = _newton_polish(a, b, c, d, u + v - shift)
    return [(r, 1)]


def _cbrt(x: float) -> float:
    return math.copysign(abs(x) ** (1.0 / 3.0), x)


def _newton_polish(a, b, c, d, x, rounds: int = 3) -> float:
    # Plain Newton diverges where the derivative nearly vanishes, which
    # is exactly the near-multiple-root regime this polish gets handed;
    # each step must shrink |p| or get halved, and the best iterate wins.
    def val(t: float) -> float:
        return ((a * t + b) * t + c) * t + d

    best, best_f = x, abs(val(x))
    for _ in range(rounds):
        f = val(x)
        df = (3.0 * a * x + 2.0 * b) * x + c
        if df == 0.0:
            break
        step = f / df
        trial = x - step
        for _ in range(20):
            if abs(val(trial)) <= abs(f):
                break
            step *= 0.5
            trial = x - step
        else:
            break  # no admissible step left; keep the best seen
        x = trial
        fx = abs(val(x))
        if fx < best_f:
            best, best_f = x, fx
        if abs(step) <= 1e-16 * max(1.0, abs(x)):
            break
    return best


def classify_2x2(jac, tol: float = 1e-12) -> EigenClass:
    """Classify a planar linearization by trace and determinant.

    Standard taxonomy with explicit tie-breaking, thresholds scaled by
    the largest matrix entry: a determinant within ``tol * scale**2`` of
    zero is Degenerate, never silently a node; a strictly negative
    determinant is always Saddle (a zero trace does not soften a
    hyperbolic saddle); a vanishing trace with positive determinant is
    Centre; a vanishing discriminant is reported as a node of the
    trace's sign (the repeated-eigenvalue "improper" case).
    """
    m = np.asarray(jac, dtype=float)
    if m.shape != (2, 2):
        raise ValueError("expected a 2x2 matrix")
    if not np.all(np.isfinite(m)):
        raise NonFiniteSample("matrix has non-finite entries")
    scale = float(np.max(np.abs(m)))
    if scale == 0.0:
        return EigenClass.DEGENERATE
    tr = float(m[0, 0] + m[1, 1])
    det = float(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])
    if abs(det) <= tol * scale * scale:
        return EigenClass.DEGENERATE
    if det < 0.0:
        return EigenClass.SADDLE
    if abs(tr) <= tol * scale:
        return EigenClass.CENTRE
    disc = tr * tr - 4.0 * det
    if disc >= -tol * scale * scale:
        return EigenClass.UNSTABLE_NODE if tr > 0 else EigenClass.STABLE_NODE
    return EigenClass.UNSTABLE_SPIRAL if tr > 0 else EigenClass.STABLE_SPIRAL
