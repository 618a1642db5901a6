"""Command line for the package: cross-verification and data emission.

Five subcommands::

    curvegas verify        [--config F] [--format json] [--out F]
    curvegas fixed-points  -A a -B b [--out F]
    curvegas portrait      -A a -B b [--window y0,y1,n0,n1] [--seeds F]
                           [--format csv|svg] [--out F] [--tol T]
    curvegas solution      [--family 1|2] [--config F] [--constants c1..c5]
                           [--grid t0,t1,nt,a0,a1,na] [--out F] [--tol T]
    curvegas expand        [--order 0|1] [--config F] [--constants c1,c2,c3]
                           [--yrange y0,y1] [--n0 v] [--init m,n,l,k]
                           [--out F] [--tol T]

Every command is deterministic: identical inputs produce byte-identical
outputs (fixed random seeds, no timestamps, shortest-round-trip float
formatting). Config problems exit 2, I/O problems exit 3, and every
error path prints a single diagnostic line to stderr.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .euler import (
    FlowField,
    SolutionConstants,
    correspondence_window,
    euler_residual,
    euler_symbol,
    invariants_of_flow,
    solution_family_1,
    solution_family_2,
)
from .numerics import (
    EigenClass,
    Grid1D,
    Grid2D,
    UnsupportedOrder,
    fd_derivative,
    ode_solve,
)
from .quotient import (
    QuotientJet,
    TresseField,
    quotient_residual,
    quotient_residual_alt4,
    quotient_symbol,
    quotsol1,
    quotsol2,
)
from .thermo import (
    ConfigError,
    DomainError,
    GasParams,
    PlanckPotential,
    VirialCoefficient,
    default_config,
    entropy,
    entropy_partials,
    ideal_gas_potential,
    parse_config,
    pressure,
    pressure_partials,
)
from .virial_flow import (
    ReducedParams,
    ZerothTerm,
    as_planar_system,
    first_order_residual,
    fixed_points,
    integrate_first_order,
    integrate_trajectory,
    portrait,
    zeroth_residual,
)

__all__ = ["main", "run_checks", "CheckOutcome", "quotient_csv"]


# ---------------------------------------------------------------- output

def _fmt(v: float) -> str:
    """Shortest round-trip decimal form; stable across runs."""
    return repr(float(v))


def _csv(header: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    lines = [",".join(header)]
    lines.extend(",".join(row) for row in rows)
    return "\n".join(lines) + "\n"


def _write_out(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _fail(category: str, message: str, code: int) -> int:
    sys.stderr.write(f"error: {category}: {message}\n")
    return code


# ---------------------------------------------------------------- config

def _load_config_arg(path: str | None) -> tuple[GasParams, PlanckPotential, dict]:
    """Config triple (gas, potential, raw mapping) from a file or defaults."""
    if path is None:
        raw = default_config()
    else:
        # unreadable file is an I/O failure (exit 3); bad content is a
        # config failure (exit 2)
        try:
            with open(path, "r", encoding="utf-8") as fh:
                raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
    gas, pot = parse_config(raw)
    return gas, pot, raw


def _leading_virial(raw: dict) -> VirialCoefficient:
    """First density-correction coefficient from a raw config mapping."""
    spec = raw.get("potential", {})
    coeffs = spec.get("coeffs") if isinstance(spec, dict) else None
    if coeffs:
        return VirialCoefficient(tuple(float(c) for c in coeffs[0]))
    return VirialCoefficient((0.0,))


def _floats_arg(text: str, count: int, flag: str) -> list[float]:
    parts = text.split(",")
    if len(parts) != count:
        raise ConfigError(f"{flag} needs {count} comma-separated values")
    try:
        return [float(p) for p in parts]
    except ValueError as exc:
        raise ConfigError(f"{flag}: {exc}") from exc


# ---------------------------------------------------- verification suite

@dataclass(frozen=True)
class CheckOutcome:
    """One line of the cross-verification report."""

    name: str
    status: str  # PASS | FAIL | SKIP
    worst: float
    bound: float
    note: str = ""


def _outcome(name: str, worst: float, bound: float) -> CheckOutcome:
    ok = math.isfinite(worst) and worst <= bound
    return CheckOutcome(name, "PASS" if ok else "FAIL", worst, bound)


def _skip(name: str, note: str) -> CheckOutcome:
    return CheckOutcome(name, "SKIP", 0.0, 0.0, note)


def _rel_gap(exact: float, approx: float) -> float:
    return abs(exact - approx) / max(1.0, abs(exact))


def _check_thermo_partials(gas: GasParams, pot: PlanckPotential) -> CheckOutcome:
    rng = np.random.default_rng(101)
    worst = 0.0
    for _ in range(40):
        x = 0.4 + 2.2 * rng.random()
        y = 0.5 + 2.5 * rng.random()
        _, p_x, p_y = pressure_partials(pot, gas.R, x, y)
        _, s_x, s_y = entropy_partials(pot, gas.R, x, y)
        fd = [
            fd_derivative(lambda v: pressure(pot, gas.R, v, y), x),
            fd_derivative(lambda v: pressure(pot, gas.R, x, v), y),
            fd_derivative(lambda v: entropy(pot, gas.R, v, y), x),
            fd_derivative(lambda v: entropy(pot, gas.R, x, v), y),
        ]
        for exact, approx in zip((p_x, p_y, s_x, s_y), fd):
            worst = max(worst, _rel_gap(exact, approx))
        for name, exact in (("x", pot.phi_xx(x, y)), ("y", pot.phi_xy(x, y))):
            approx = fd_derivative(
                lambda v: pot.phi_x(v, y) if name == "x" else pot.phi_x(x, v),
                x if name == "x" else y,
            )
            worst = max(worst, _rel_gap(exact, approx))
    return _outcome("thermo-partials-vs-fd", worst, 1e-6)


def _check_euler_symbol(gas: GasParams, pot: PlanckPotential) -> CheckOutcome:
    rng = np.random.default_rng(102)
    worst = 0.0
    for _ in range(40):
        state = (
            -2.0 + 4.0 * rng.random(),
            0.4 + 2.0 * rng.random(),
            0.5 + 2.0 * rng.random(),
        )
        xi = (-1.0 + 2.0 * rng.random(), -1.0 + 2.0 * rng.random())
        _, direct, factored = euler_symbol(gas, pot, state, xi)
        scale = max(1.0, abs(direct), abs(factored))
        worst = max(worst, abs(direct - factored) / scale)
    return _outcome("euler-symbol-det-identity", worst, 1e-12)


def _check_quotient_symbol(gas: GasParams, pot: PlanckPotential) -> CheckOutcome:
    rng = np.random.default_rng(103)
    worst = 0.0
    for _ in range(40):
        x = 0.4 + 2.0 * rng.random()
        y = 0.5 + 2.0 * rng.random()
        jet = QuotientJet(
            x=x, y=y,
            K=-2.0 + 4.0 * rng.random(), L=-2.0 + 4.0 * rng.random(),
            M=-2.0 + 4.0 * rng.random(), N=-2.0 + 4.0 * rng.random(),
            phi_x=pot.phi_x(x, y), phi_xx=pot.phi_xx(x, y),
            phi_xy=pot.phi_xy(x, y),
        )
        xi = (-1.0 + 2.0 * rng.random(), -1.0 + 2.0 * rng.random())
        _, direct, factored = quotient_symbol(jet, gas, xi)
        scale = max(1.0, abs(direct), abs(factored))
        worst = max(worst, abs(direct - factored) / scale)
    return _outcome("quotient-symbol-det-identity", worst, 1e-12)


def _sample_domain(field: TresseField, rng, count: int,
                   box=((0.4, 3.0), (0.4, 3.0)), cap: int = 4000,
                   scale_cap: float = 12.0):
    """Random in-domain points with all four components of modest size.

    The residual identities hold everywhere, but their float evaluation
    cancels catastrophically where a component like (x/y)^(2n/(n-2))
    explodes; an absolute residual bound is only meaningful on points
    whose jets stay O(10).
    """
    (xlo, xhi), (ylo, yhi) = box
    pts = []
    for _ in range(cap):
        if len(pts) == count:
            break
        x = xlo + (xhi - xlo) * rng.random()
        y = ylo + (yhi - ylo) * rng.random()
        if not field.in_domain(x, y):
            continue
        if max(abs(field.component(c, x, y)) for c in "KLMN") <= scale_cap:
            pts.append((x, y))
    return pts


def _check_quotsol(gas: GasParams, which: int) -> CheckOutcome:
    name = f"quotsol{which}-residual"
    if which == 2 and gas.n == 2:
        return _skip(name, "needs n != 2: family 2 exponent degenerates")
    pot = ideal_gas_potential(gas.n)
    maker = quotsol1 if which == 1 else quotsol2
    rng = np.random.default_rng(104 + which)
    worst = 0.0
    field = maker(1.0, 4.0 * gas.omega ** 2, gas.n, gas.omega)
    pts = _sample_domain(field, rng, 30)
    if len(pts) < 30:
        return CheckOutcome(name, "FAIL", math.inf, 1e-8,
                            "domain sampling starved")
    for x, y in pts:
        qs = quotient_residual(field, gas, pot, x, y)
        worst = max(worst, max(abs(q) for q in qs))
        if which == 2:
            worst = max(worst, abs(quotient_residual_alt4(field, x, y)))
    return _outcome(name, worst, 1e-8)


def _family_flow(gas: GasParams, family: int, tol: float = 1e-10):
    consts = SolutionConstants(c1=1.0, c2=2.0, c3=0.0, c4=0.0, c5=0.0,
                               family=family)
    flow = (solution_family_1 if family == 1 else solution_family_2)(
        consts, gas, tol=tol
    )
    return consts, flow


def _sample_flow_points(flow: FlowField, consts, gas, rng, count: int,
                        cap: int = 4000):
    lo, hi = correspondence_window(consts, gas)
    width = hi - lo
    pts = []
    for _ in range(cap):
        if len(pts) == count:
            break
        t = lo + width * (0.06 + 0.88 * rng.random())
        a = -1.0 + 2.0 * rng.random()
        if flow.is_valid(t, a):
            pts.append((t, a))
    return pts


def _check_family_residual(gas: GasParams, family: int) -> CheckOutcome:
    name = f"euler-family{family}-residual"
    if family == 2 and gas.n == 2:
        return _skip(name, "needs n != 2: family 2 exponent degenerates")
    pot = ideal_gas_potential(gas.n)
    consts, flow = _family_flow(gas, family)
    rng = np.random.default_rng(106 + family)
    pts = _sample_flow_points(flow, consts, gas, rng, 36)
    if len(pts) < 36:
        return CheckOutcome(name, "FAIL", math.inf, 1e-6,
                            "validity sampling starved")
    worst = 0.0
    for t, a in pts:
        rs = euler_residual(flow, gas, pot, t, a)
        worst = max(worst, max(abs(r) for r in rs))
    return _outcome(name, worst, 1e-6)


def _check_correspondence(gas: GasParams, family: int) -> CheckOutcome:
    name = f"invariants-match-quotsol{family}"
    if family == 2 and gas.n == 2:
        return _skip(name, "needs n != 2: family 2 exponent degenerates")
    consts, flow = _family_flow(gas, family)
    maker = quotsol1 if family == 1 else quotsol2
    field = maker(consts.c1, consts.c2, gas.n, gas.omega)
    rng = np.random.default_rng(108 + family)
    pts = _sample_flow_points(flow, consts, gas, rng, 12)
    if len(pts) < 12:
        return CheckOutcome(name, "FAIL", math.inf, 1e-6,
                            "validity sampling starved")
    worst = 0.0
    for t, a in pts:
        x, y, big_k, big_l, big_m, big_n = invariants_of_flow(flow, t, a)
        if not field.in_domain(x, y):
            return CheckOutcome(name, "FAIL", math.inf, 1e-6,
                                "invariant point left the field domain")
        for comp, val in zip("KLMN", (big_k, big_l, big_m, big_n)):
            worst = max(worst, abs(val - field.component(comp, x, y)))
    return _outcome(name, worst, 1e-6)


def _check_flow_partials(gas: GasParams, family: int) -> CheckOutcome:
    name = f"family{family}-partials-vs-fd"
    if family == 2 and gas.n == 2:
        return _skip(name, "needs n != 2: family 2 exponent degenerates")
    consts, flow = _family_flow(gas, family)
    rng = np.random.default_rng(110 + family)
    pts = _sample_flow_points(flow, consts, gas, rng, 8)
    if len(pts) < 8:
        return CheckOutcome(name, "FAIL", math.inf, 1e-6,
                            "validity sampling starved")
    base = {"u": flow.u, "rho": flow.rho, "theta": flow.theta}
    worst = 0.0
    for t, a in pts:
        for pname in ("u_t", "u_a", "rho_t", "rho_a", "theta_t", "theta_a",
                      "theta_aa"):
            fn = base[pname.split("_")[0]]
            wrt = pname.split("_")[1]
            if wrt == "t":
                approx = fd_derivative(lambda s: fn(s, a), t)
            elif wrt == "a":
                approx = fd_derivative(lambda b: fn(t, b), a)
            else:
                approx = fd_derivative(lambda b: fn(t, b), a, order=2)
            worst = max(worst, _rel_gap(flow.partial(pname, t, a), approx))
    return _outcome(name, worst, 1e-6)


def _check_quotsol_partials(gas: GasParams, which: int) -> CheckOutcome:
    name = f"quotsol{which}-partials-vs-fd"
    if which == 2 and gas.n == 2:
        return _skip(name, "needs n != 2: family 2 exponent degenerates")
    field = (quotsol1 if which == 1 else quotsol2)(
        1.0, 4.0 * gas.omega ** 2, gas.n, gas.omega
    )
    rng = np.random.default_rng(112 + which)
    pts = _sample_domain(field, rng, 10, box=((0.4, 2.5), (0.4, 2.5)))
    if len(pts) < 10:
        return CheckOutcome(name, "FAIL", math.inf, 1e-6,
                            "domain sampling starved")
    worst = 0.0
    for x, y in pts:
        for comp in "KLMN":
            for wrt in "xy":
                exact = field.partial(f"{comp}_{wrt}", x, y)
                if wrt == "x":
                    approx = fd_derivative(
                        lambda v: field.component(comp, v, y), x
                    )
                else:
                    approx = fd_derivative(
                        lambda v: field.component(comp, x, v), y
                    )
                worst = max(worst, _rel_gap(exact, approx))
    return _outcome(name, worst, 1e-6)


def _check_fixed_point_table() -> CheckOutcome:
    expected = {
        (-2.0, 1.0): [
            (0.0, 0.0, EigenClass.UNSTABLE_NODE),
            (0.25, -0.5, EigenClass.SADDLE),
            (1.0, 1.0, EigenClass.SADDLE),
        ],
        (1.0, 2.0): [(0.0, 0.0, EigenClass.UNSTABLE_NODE)],
        (2.0, -3.0): [
            (0.0, 0.0, EigenClass.SADDLE),
            (1.0, 1.0, EigenClass.CENTRE),
            (2.25, -1.5, EigenClass.UNSTABLE_SPIRAL),
        ],
        (-2.0, -1.0): [(0.0, 0.0, EigenClass.SADDLE)],
    }
    worst = 0.0
    for (a, b), table in expected.items():
        got = fixed_points(ReducedParams(a, b))
        if len(got) != len(table):
            return CheckOutcome("fixed-point-inventories", "FAIL", math.inf,
                                1e-12, f"count mismatch at A={a}, B={b}")
        for fp, (ey, en, klass) in zip(got, table):
            worst = max(worst, abs(fp.y - ey), abs(fp.n0 - en))
            if fp.klass is not klass:
                return CheckOutcome("fixed-point-inventories", "FAIL",
                                    math.inf, 1e-12,
                                    f"class mismatch at ({ey}, {en})")
    return _outcome("fixed-point-inventories", worst, 1e-12)


def _check_centre_annulus() -> CheckOutcome:
    traj = integrate_trajectory(ReducedParams(2.0, -3.0), (1.05, 1.05),
                                50.0, tol=1e-8)
    if traj.reason.value != "ReachedSMax":
        return CheckOutcome("centre-orbit-annulus", "FAIL", math.inf, 0.5,
                            f"stopped early: {traj.reason.value}")
    lo, hi = math.inf, 0.0
    res = traj.ode
    for i in range(len(res.ts)):
        d = math.hypot(res.ys[i, 0] - 1.0, res.ys[i, 1] - 1.0)
        lo, hi = min(lo, d), max(hi, d)
        if i + 1 < len(res.ts):
            mid = res.at(0.5 * (res.ts[i] + res.ts[i + 1]))
            d = math.hypot(mid[0] - 1.0, mid[1] - 1.0)
            lo, hi = min(lo, d), max(hi, d)
    if lo < 0.001:
        return CheckOutcome("centre-orbit-annulus", "FAIL", lo, 0.001,
                            "fell inside the annulus")
    return _outcome("centre-orbit-annulus", hi, 0.5)


def _check_ode_convergence() -> CheckOutcome:
    # Short arc near the centre: per-step control means global error
    # grows with step count, so the probe keeps the count small.
    field = as_planar_system(ReducedParams(2.0, -3.0))
    coarse = ode_solve(field, 0.0, [1.2, 0.9], 1.0, tol=1e-6)
    fine = ode_solve(field, 0.0, [1.2, 0.9], 1.0, tol=1e-9)
    gap = float(np.max(np.abs(coarse.ys[-1] - fine.ys[-1])))
    return _outcome("ode-self-convergence", gap, 1e-6)


def _zeroth_case(gas: GasParams) -> ZerothTerm:
    # Profile crossing (1, 3) with wide margins from the breaking
    # parabola and from N0 = 0; see the expand command's defaults.
    return ZerothTerm.solve(2.0, 1.0, 3.0, gas.R, gas.omega, (1.0, 3.0),
                            0.5, tol=1e-10)


def _check_zeroth(gas: GasParams) -> CheckOutcome:
    z = _zeroth_case(gas)
    worst = 0.0
    for y in np.linspace(z.y_lo, z.y_hi, 40):
        es = zeroth_residual(z, gas.R, gas.omega, float(y))
        worst = max(worst, max(abs(e) for e in es))
    return _outcome("expansion-zeroth-residual", worst, 1e-10)


def _check_telescoping(gas: GasParams) -> CheckOutcome:
    z = _zeroth_case(gas)
    worst = 0.0
    for y in np.linspace(z.y_lo, z.y_hi, 40):
        yv = float(y)
        worst = max(worst, abs(z.l0(yv) * z.n0(yv) + z.m0 * z.k0(yv) - z.c2))
    return _outcome("expansion-telescoping-identity", worst, 1e-12)


def _first_order_worst(z: ZerothTerm, gas: GasParams,
                       a1: VirialCoefficient, tol: float) -> float:
    """Integrate from zero state and measure printed-equation residuals.

    Derivatives for the residual check come from Richardson finite
    differences of the dense output at cell midpoints, independent of
    the triangular solve that produced the trajectory.
    """
    res = integrate_first_order(z, gas, a1, (z.y_lo, z.y_hi),
                                (0.0, 0.0, 0.0, 0.0), tol=tol)
    y0, y1 = float(res.ts[0]), float(res.ts[-1])
    cells = 100
    width = (y1 - y0) / cells
    worst = 0.0
    for i in range(cells):
        y = y0 + (i + 0.5) * width
        state = res.at(y)
        h = 0.4 * width
        prime = [
            fd_derivative(lambda v, j=j: float(res.at(v)[j]), y, step=h)
            for j in range(4)
        ]
        fs = first_order_residual(z, gas, a1, y, state, prime)
        worst = max(worst, max(abs(f) for f in fs))
    return worst


def _check_first_order(gas: GasParams) -> CheckOutcome:
    z = _zeroth_case(gas)
    worst = 0.0
    for coeffs in ((0.0,), (1.0,), (0.0, 1.0)):
        worst = max(
            worst,
            _first_order_worst(z, gas, VirialCoefficient(coeffs), 1e-10),
        )
    return _outcome("expansion-first-order-residual", worst, 1e-6)


def run_checks(gas: GasParams, pot: PlanckPotential) -> list[CheckOutcome]:
    """The cross-verification suite behind ``curvegas verify``.

    Closed-form solution checks always use the ideal-gas potential of
    the configured ``n`` (the families presuppose it); symbol and
    derivative checks run against the configured potential.
    """
    return [
        _check_thermo_partials(gas, pot),
        _check_euler_symbol(gas, pot),
        _check_quotient_symbol(gas, pot),
        _check_quotsol(gas, 1),
        _check_quotsol(gas, 2),
        _check_quotsol_partials(gas, 1),
        _check_quotsol_partials(gas, 2),
        _check_family_residual(gas, 1),
        _check_family_residual(gas, 2),
        _check_flow_partials(gas, 1),
        _check_flow_partials(gas, 2),
        _check_correspondence(gas, 1),
        _check_correspondence(gas, 2),
        _check_fixed_point_table(),
        _check_centre_annulus(),
        _check_ode_convergence(),
        _check_zeroth(gas),
        _check_telescoping(gas),
        _check_first_order(gas),
    ]


# ------------------------------------------------------------- emitters

def quotient_csv(field: TresseField, gas: GasParams, pot: PlanckPotential,
                 points: Sequence[tuple[float, float]]) -> str:
    """Residual dump for a reduced-equation field at given (x, y) points."""
    rows = []
    for x, y in points:
        j = field.jet(x, y)
        qs = quotient_residual(field, gas, pot, x, y)
        rows.append([_fmt(x), _fmt(y), _fmt(j["K"]), _fmt(j["L"]),
                     _fmt(j["M"]), _fmt(j["N"])] + [_fmt(q) for q in qs])
    return _csv(["x", "y", "K", "L", "M", "N", "q1", "q2", "q3", "q4"], rows)


def _report_text(outcomes: Sequence[CheckOutcome]) -> str:
    lines = []
    for o in outcomes:
        if o.status == "SKIP":
            lines.append(f"SKIP {o.name} ({o.note})")
        else:
            extra = f" ({o.note})" if o.note else ""
            lines.append(
                f"{o.status} {o.name} max={o.worst:.3e} tol={o.bound:.1e}"
                f"{extra}"
            )
    failed = sum(1 for o in outcomes if o.status == "FAIL")
    ran = sum(1 for o in outcomes if o.status != "SKIP")
    lines.append(f"{'FAIL' if failed else 'OK'} {ran - failed}/{ran} checks"
                 f" passed")
    return "\n".join(lines) + "\n"


def _report_json(outcomes: Sequence[CheckOutcome]) -> str:
    payload = [
        {"name": o.name, "status": o.status, "max": o.worst,
         "tol": o.bound, "note": o.note}
        for o in outcomes
    ]
    return json.dumps(payload, indent=2) + "\n"


def _fixed_points_json(points) -> str:
    payload = [
        {"y": fp.y, "N0": fp.n0, "class": fp.klass.value,
         "trace": fp.trace, "det": fp.det}
        for fp in points
    ]
    return json.dumps(payload, indent=2) + "\n"


def _portrait_csv(port) -> str:
    header = ["record", "y", "n0", "uy", "un", "s", "seed"]
    rows = []
    for y, n0, uy, un in port.field:
        rows.append(["field", _fmt(y), _fmt(n0), _fmt(uy), _fmt(un), "", ""])
    for idx, traj in enumerate(port.trajectories):
        for s, (y, n0) in zip(traj.ss, traj.states):
            rows.append(["trajectory", _fmt(y), _fmt(n0), "", "",
                         _fmt(s), str(idx)])
    return _csv(header, rows)


_CLASS_FILL = {
    EigenClass.STABLE_NODE: "#2c7fb8",
    EigenClass.UNSTABLE_NODE: "#e6550d",
    EigenClass.SADDLE: "#d62728",
    EigenClass.CENTRE: "#31a354",
    EigenClass.STABLE_SPIRAL: "#6a51a3",
    EigenClass.UNSTABLE_SPIRAL: "#c051a3",
    EigenClass.DEGENERATE: "#777777",
}


def _portrait_svg(port) -> str:
    width, height, margin = 640.0, 480.0, 42.0
    ylo, yhi = port.window.x.lo, port.window.x.hi
    nlo, nhi = port.window.y.lo, port.window.y.hi
    sx = (width - 2 * margin) / (yhi - ylo)
    sy = (height - 2 * margin) / (nhi - nlo)

    def px(y: float) -> float:
        return margin + (y - ylo) * sx

    def py(n: float) -> float:
        return height - margin - (n - nlo) * sy

    def c(v: float) -> str:
        return f"{v:.2f}"

    half = 0.33 * min((width - 2 * margin) / (port.window.x.count - 1),
                      (height - 2 * margin) / (port.window.y.count - 1))
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0f}"'
        f' height="{height:.0f}" viewBox="0 0 {width:.0f} {height:.0f}">',
        f'<defs><clipPath id="win"><rect x="{c(margin)}" y="{c(margin)}"'
        f' width="{c(width - 2 * margin)}" height="{c(height - 2 * margin)}"/>'
        f"</clipPath></defs>",
        f'<rect x="{c(margin)}" y="{c(margin)}"'
        f' width="{c(width - 2 * margin)}" height="{c(height - 2 * margin)}"'
        f' fill="none" stroke="#333333" stroke-width="1"/>',
        f'<text x="{c(width / 2)}" y="{c(height - 8)}" font-size="13"'
        f' text-anchor="middle" font-family="sans-serif">y</text>',
        f'<text x="14" y="{c(height / 2)}" font-size="13"'
        f' text-anchor="middle" font-family="sans-serif"'
        f' transform="rotate(-90 14 {c(height / 2)})">N0</text>',
        f'<text x="{c(width / 2)}" y="24" font-size="13"'
        f' text-anchor="middle" font-family="sans-serif">A={_fmt(port.params.A)}'
        f" B={_fmt(port.params.B)}</text>",
        '<g clip-path="url(#win)">',
    ]
    for y, n0, uy, un in port.field:
        dx, dy = uy * sx, -un * sy
        norm = math.hypot(dx, dy)
        if norm == 0.0:
            continue
        dx, dy = dx / norm * half, dy / norm * half
        x0, y0 = px(y), py(n0)
        parts.append(
            f'<line x1="{c(x0 - dx)}" y1="{c(y0 - dy)}" x2="{c(x0 + dx)}"'
            f' y2="{c(y0 + dy)}" stroke="#9a9a9a" stroke-width="1"/>'
        )
    pts = " ".join(f"{c(px(y))},{c(py(n))}" for y, n in port.parabola)
    parts.append(
        f'<polyline class="parabola" points="{pts}" fill="none"'
        f' stroke="#cc2222" stroke-width="1.5"/>'
    )
    for traj in port.trajectories:
        coords = " ".join(
            f"{'M' if i == 0 else 'L'} {c(px(row[0]))} {c(py(row[1]))}"
            for i, row in enumerate(traj.states)
        )
        parts.append(
            f'<path class="trajectory" d="{coords}" fill="none"'
            f' stroke="#1a7a4a" stroke-width="1.2"/>'
        )
    parts.append("</g>")
    for fp in port.fixed_points:
        fill = _CLASS_FILL[fp.klass]
        parts.append(
            f'<circle class="fixed-point" cx="{c(px(fp.y))}"'
            f' cy="{c(py(fp.n0))}" r="4" fill="{fill}" stroke="#222222"'
            f' stroke-width="0.8"><title>{fp.klass.value}</title></circle>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


# ------------------------------------------------------------- commands

def _cmd_verify(args) -> int:
    gas, pot, _ = _load_config_arg(args.config)
    outcomes = run_checks(gas, pot)
    text = (_report_json(outcomes) if args.format == "json"
            else _report_text(outcomes))
    _write_out(args.out, text)
    return 0 if all(o.status != "FAIL" for o in outcomes) else 1


def _cmd_fixed_points(args) -> int:
    if args.format not in (None, "json"):
        raise ConfigError("fixed-points emits JSON only")
    pts = fixed_points(ReducedParams(args.A, args.B))
    _write_out(args.out, _fixed_points_json(pts))
    return 0


_DEFAULT_SEEDS = (
    (-0.5, -1.5), (-0.5, 1.5), (0.5, 0.5), (0.5, -0.5),
    (1.05, 1.05), (2.5, 0.1), (2.0, -1.8), (2.0, 1.8),
)


def _cmd_portrait(args) -> int:
    fmt = args.format or "svg"
    if fmt not in ("csv", "svg"):
        raise ConfigError("portrait emits csv or svg")
    if args.window:
        y0, y1, n0, n1 = _floats_arg(args.window, 4, "--window")
    else:
        (y0, y1), (n0, n1) = (-1.0, 3.0), (-2.0, 2.0)
    try:
        window = Grid2D(Grid1D(y0, y1, 25), Grid1D(n0, n1, 21))
    except ValueError as exc:
        raise ConfigError(f"--window: {exc}") from exc
    if args.seeds:
        try:
            with open(args.seeds, "r", encoding="utf-8") as fh:
                raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"seeds file is not valid JSON: {exc}") from exc
        try:
            seeds = [(float(p[0]), float(p[1])) for p in raw]
        except (TypeError, ValueError, IndexError) as exc:
            raise ConfigError(
                "seeds file must hold a JSON list of [y, n0] pairs"
            ) from exc
    else:
        seeds = list(_DEFAULT_SEEDS)
    port = portrait(ReducedParams(args.A, args.B), window, seeds,
                    tol=args.tol if args.tol else 1e-8)
    text = _portrait_csv(port) if fmt == "csv" else _portrait_svg(port)
    _write_out(args.out, text)
    return 0


def _cmd_solution(args) -> int:
    if args.format not in (None, "csv"):
        raise ConfigError("solution emits CSV only")
    gas, pot, raw = _load_config_arg(args.config)
    if raw.get("potential", {}).get("type", "ideal") != "ideal":
        raise ConfigError(
            "the closed-form families presuppose the ideal potential;"
            " use an ideal config for the solution command"
        )
    cs = _floats_arg(args.constants, 5, "--constants")
    consts = SolutionConstants(*cs, family=args.family)
    tol = args.tol if args.tol else 1e-10
    flow = (solution_family_1 if args.family == 1
            else solution_family_2)(consts, gas, tol=tol)
    if args.grid:
        t0, t1, nt, a0, a1, na = _floats_arg(args.grid, 6, "--grid")
        nt, na = int(nt), int(na)
    else:
        lo, hi = correspondence_window(consts, gas)
        width = hi - lo
        t0, t1 = lo + 0.10 * width, hi - 0.05 * width
        nt, na = 15, 15
        a0, a1 = -1.0, 1.0
    if nt < 2 or na < 2:
        raise ConfigError("--grid needs at least 2 points per axis")
    rows = []
    for t in np.linspace(t0, t1, nt):
        for a in np.linspace(a0, a1, na):
            tv, av = float(t), float(a)
            if flow.is_valid(tv, av):
                rs = euler_residual(flow, gas, pot, tv, av)
                rows.append([
                    _fmt(tv), _fmt(av), _fmt(flow.u(tv, av)),
                    _fmt(flow.rho(tv, av)), _fmt(flow.theta(tv, av)),
                    _fmt(rs[0]), _fmt(rs[1]), _fmt(rs[2]), "1",
                ])
            else:
                rows.append([_fmt(tv), _fmt(av), "", "", "", "", "", "", "0"])
    text = _csv(["t", "a", "u", "rho", "theta", "r1", "r2", "r3", "valid"],
                rows)
    _write_out(args.out, text)
    return 0


def _cmd_expand(args) -> int:
    if args.format not in (None, "csv"):
        raise ConfigError("expand emits CSV only")
    if args.order not in (0, 1):
        raise UnsupportedOrder(
            f"expansion order {args.order} unsupported (only 0 and 1)"
        )
    gas, pot, raw = _load_config_arg(args.config)
    c1, c2, c3 = _floats_arg(args.constants, 3, "--constants")
    y0, y1 = _floats_arg(args.yrange, 2, "--yrange")
    tol = args.tol if args.tol else 1e-10
    z = ZerothTerm.solve(c1, c2, c3, gas.R, gas.omega, (y0, y1), args.n0,
                         tol=tol)
    cells = 100
    width = (z.y_hi - z.y_lo) / cells
    rows = []
    if args.order == 0:
        for i in range(cells):
            y = z.y_lo + (i + 0.5) * width
            es = zeroth_residual(z, gas.R, gas.omega, y)
            rows.append([_fmt(y), _fmt(y), _fmt(z.n0(y))]
                        + [_fmt(e) for e in es])
        header = ["s", "y", "N0", "e1", "e2", "e3", "e4"]
    else:
        a1 = _leading_virial(raw)
        init = _floats_arg(args.init, 4, "--init")
        res = integrate_first_order(z, gas, a1, (z.y_lo, z.y_hi), init,
                                    tol=tol)
        for i in range(cells):
            y = z.y_lo + (i + 0.5) * width
            state = res.at(y)
            h = 0.4 * width
            prime = [
                fd_derivative(lambda v, j=j: float(res.at(v)[j]), y, step=h)
                for j in range(4)
            ]
            fs = first_order_residual(z, gas, a1, y, state, prime)
            rows.append([_fmt(y), _fmt(y), _fmt(z.n0(y))]
                        + [_fmt(v) for v in state] + [_fmt(f) for f in fs])
        header = ["s", "y", "N0", "M1", "N1", "L1", "K1",
                  "f1", "f2", "f3", "f4"]
    _write_out(args.out, _csv(header, rows))
    return 0


# --------------------------------------------------------------- parser

class _Parser(argparse.ArgumentParser):
    """Single-line diagnostics instead of argparse's usage dump."""

    def error(self, message):
        sys.stderr.write(f"error: usage: {message}\n")
        sys.exit(2)


def _build_parser() -> _Parser:
    parser = _Parser(prog="curvegas", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config=False):
        p.add_argument("--out", default=None, metavar="FILE")
        p.add_argument("--format", default=None,
                       choices=("csv", "json", "svg"))
        p.add_argument("--tol", type=float, default=None, metavar="REAL")
        if config:
            p.add_argument("--config", default=None, metavar="FILE")

    p = sub.add_parser("verify", help="run the cross-verification suite")
    common(p, config=True)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("fixed-points",
                       help="equilibria of the reduced planar system")
    p.add_argument("-A", type=float, required=True)
    p.add_argument("-B", type=float, required=True)
    common(p)
    p.set_defaults(func=_cmd_fixed_points)

    p = sub.add_parser("portrait", help="phase portrait data or drawing")
    p.add_argument("-A", type=float, required=True)
    p.add_argument("-B", type=float, required=True)
    p.add_argument("--window", default=None, metavar="y0,y1,n0,n1")
    p.add_argument("--seeds", default=None, metavar="FILE")
    common(p)
    p.set_defaults(func=_cmd_portrait)

    p = sub.add_parser("solution",
                       help="closed-form flow on a grid with residuals")
    p.add_argument("--family", type=int, default=1, choices=(1, 2))
    p.add_argument("--constants", default="1,2,0,0,0",
                   metavar="c1,c2,c3,c4,c5")
    p.add_argument("--grid", default=None, metavar="t0,t1,nt,a0,a1,na")
    common(p, config=True)
    p.set_defaults(func=_cmd_solution)

    p = sub.add_parser("expand", help="series terms with residual columns")
    p.add_argument("--order", type=int, default=0, metavar="0|1")
    p.add_argument("--constants", default="2,1,3", metavar="c1,c2,c3")
    p.add_argument("--yrange", default="1,3", metavar="y0,y1")
    p.add_argument("--n0", type=float, default=0.5, metavar="REAL")
    p.add_argument("--init", default="0,0,0,0", metavar="m1,n1,l1,k1")
    common(p, config=True)
    p.set_defaults(func=_cmd_expand)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, DomainError, UnsupportedOrder, ValueError) as exc:
        return _fail("config", str(exc), 2)
    except OSError as exc:
        return _fail("io", str(exc), 3)
    except (ArithmeticError, RuntimeError) as exc:
        return _fail("compute", str(exc), 4)


if __name__ == "__main__":
    sys.exit(main())
