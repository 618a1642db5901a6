"""Acceptance suite: one test per published guarantee of this package.

Each test prints a single PASS line (visible under ``pytest -s`` or in
captured output) naming the guarantee it just enforced; a failure stops
before the print, so the line doubles as a machine-greppable verdict.
"""
import json
import time

import numpy as np
import pytest

from curvegas import cli
from curvegas.euler import (
    SolutionConstants,
    correspondence_window,
    euler_residual_grid,
    euler_symbol,
    invariants_of_flow,
    solution_family_1,
    solution_family_2,
)
from curvegas.numerics import fd_derivative, ode_solve
from curvegas.quotient import (
    QuotientJet,
    quotient_residual,
    quotient_symbol,
    quotsol1,
    quotsol2,
)
from curvegas.thermo import (
    GasParams,
    entropy_partials,
    ideal_gas_potential,
    pressure_partials,
    virial_potential,
)
from curvegas.virial_flow import (
    ReducedParams,
    ZerothTerm,
    as_planar_system,
    first_order_residual,
    integrate_first_order,
    integrate_trajectory,
    zeroth_residual,
)
from curvegas.thermo import VirialCoefficient

GAS = GasParams()  # R = k = 1, n = 3, omega = 1


def _sample_field_domain(field, rng, count, box=((0.4, 3.0), (0.4, 3.0)),
                         cap=12.0):
    # keep the components O(10): the 1e-8 bound is an absolute residual,
    # so points where huge terms cancel would measure roundoff, not math
    (x0, x1), (y0, y1) = box
    pts = []
    tries = 0
    while len(pts) < count and tries < 20000:
        tries += 1
        x = x0 + (x1 - x0) * rng.random()
        y = y0 + (y1 - y0) * rng.random()
        if not field.in_domain(x, y):
            continue
        if max(abs(field.component(c, x, y)) for c in "KLMN") > cap:
            continue
        pts.append((x, y))
    assert len(pts) == count
    return pts


def _valid_flow_points(flow, consts, gas, rng, count):
    lo, hi = correspondence_window(consts, gas)
    pts = []
    while len(pts) < count:
        t = lo + (hi - lo) * (0.06 + 0.88 * rng.random())
        a = -1.0 + 2.0 * rng.random()
        if flow.is_valid(t, a):
            pts.append((t, a))
    return pts


def test_criterion_1_fixed_point_inventory(capsys):
    cases = {
        (-2.0, 1.0): ([(0.0, 0.0), (0.25, -0.5), (1.0, 1.0)],
                      ["UnstableNode", "Saddle", "Saddle"]),
        (1.0, 2.0): ([(0.0, 0.0)], ["UnstableNode"]),
        (2.0, -3.0): ([(0.0, 0.0), (1.0, 1.0), (2.25, -1.5)],
                      ["Saddle", "Centre", "UnstableSpiral"]),
        (-2.0, -1.0): ([(0.0, 0.0)], ["Saddle"]),
    }
    start = time.monotonic()
    for (a, b), (locs, classes) in cases.items():
        code = cli.main(["fixed-points", "-A", repr(a), "-B", repr(b)])
        out = capsys.readouterr().out
        assert code == 0
        rows = json.loads(out)
        assert len(rows) == len(locs)
        for row, (ey, en), klass in zip(rows, locs, classes):
            assert abs(row["y"] - ey) <= 1e-12
            assert abs(row["N0"] - en) <= 1e-12
            assert row["class"] == klass
    elapsed = time.monotonic() - start
    assert elapsed < 1.0
    print(f"PASS fixed-point inventory: 4 parameter cases exact to 1e-12 "
          f"in {elapsed:.3f}s")


def test_criterion_2_quotient_exactness():
    triples = [(1.0, 4.0, 1.0), (2.0, 9.0, 2.0), (0.5, 2.25, 0.5)]
    start = time.monotonic()
    worst = 0.0
    for n in (3, 4, 5):
        pot = ideal_gas_potential(n)
        for c1, c2, omega in triples:
            gas = GasParams(n=n, g=omega * omega / 2.0, lam=1.0)
            for which, maker in enumerate((quotsol1, quotsol2)):
                field = maker(c1, c2, n, omega)
                rng = np.random.default_rng(1000 * n + 10 * int(c2) + which)
                for x, y in _sample_field_domain(field, rng, 100):
                    rs = quotient_residual(field, gas, pot, x, y)
                    worst = max(worst, max(abs(r) for r in rs))
    elapsed = time.monotonic() - start
    assert worst <= 1e-8
    assert elapsed < 5.0
    print(f"PASS quotient exactness: both exact fields, n in (3,4,5), "
          f"3 constant triples, 100 points each, worst {worst:.2e} <= 1e-8 "
          f"in {elapsed:.2f}s")


def test_criterion_3_euler_exactness():
    start = time.monotonic()
    worst = 0.0
    ts = np.linspace(-1.4, -0.1, 20)
    activities = np.linspace(0.5, 2.0, 20)
    pot = ideal_gas_potential(3)
    for consts, maker in (
        (SolutionConstants(1.0, 2.0, 0.0, 0.0, 0.0, family=1),
         solution_family_1),
        (SolutionConstants(1.0, 2.0, 0.0, 0.0, 0.0, family=2),
         solution_family_2),
    ):
        flow = maker(consts, GAS, tol=1e-10)
        grid = euler_residual_grid(flow, GAS, pot, ts, activities)
        assert grid.shape == (20, 20, 3)
        assert not np.any(np.isnan(grid)), "grid window must be fully valid"
        worst = max(worst, float(np.abs(grid).max()))
    elapsed = time.monotonic() - start
    assert worst <= 1e-6
    assert elapsed < 30.0
    print(f"PASS euler exactness: 20x20 grids, both families, worst "
          f"residual {worst:.2e} <= 1e-6 in {elapsed:.2f}s")


def test_criterion_4_correspondence():
    c1v, c2v = 1.0, 2.0
    worst = 0.0
    for family, flow_maker, field_maker in (
        (1, solution_family_1, quotsol1),
        (2, solution_family_2, quotsol2),
    ):
        consts = SolutionConstants(c1v, c2v, 0.0, 0.0, 0.0, family=family)
        flow = flow_maker(consts, GAS, tol=1e-10)
        field = field_maker(c1v, c2v, GAS.n, GAS.omega)
        rng = np.random.default_rng(40 + family)
        for t, a in _valid_flow_points(flow, consts, GAS, rng, 50):
            x, y, K, L, M, N = invariants_of_flow(flow, t, a)
            assert field.in_domain(x, y)
            for name, val in (("K", K), ("L", L), ("M", M), ("N", N)):
                gap = abs(val - field.component(name, x, y))
                worst = max(worst, gap)
    assert worst <= 1e-6
    print(f"PASS correspondence: invariants of both flows satisfy their "
          f"quotient fields' defining relations, worst {worst:.2e} <= 1e-6 "
          f"at 50 points each")


def test_criterion_5_symbol_identities():
    rng = np.random.default_rng(55)
    pot = virial_potential(3, [(0.1, 0.05), (0.02,)])
    worst_euler = 0.0
    for _ in range(100):
        state = (-2.0 + 4.0 * rng.random(), 0.3 + 2.0 * rng.random(),
                 0.4 + 2.0 * rng.random())
        xi = (-1.0 + 2.0 * rng.random(), -1.0 + 2.0 * rng.random())
        _, direct, factored = euler_symbol(GAS, pot, state, xi)
        scale = max(1.0, abs(direct), abs(factored))
        worst_euler = max(worst_euler, abs(direct - factored) / scale)
    worst_quot = 0.0
    for _ in range(100):
        jet = QuotientJet(
            x=0.3 + 2.0 * rng.random(), y=0.3 + 2.0 * rng.random(),
            K=-2.0 + 4.0 * rng.random(), L=-2.0 + 4.0 * rng.random(),
            M=-2.0 + 4.0 * rng.random(), N=-2.0 + 4.0 * rng.random(),
            phi_x=-2.0 + 4.0 * rng.random(),
            phi_xx=-2.0 + 4.0 * rng.random(),
            phi_xy=-2.0 + 4.0 * rng.random(),
        )
        xi = (-1.0 + 2.0 * rng.random(), -1.0 + 2.0 * rng.random())
        _, direct, factored = quotient_symbol(jet, GAS, xi)
        scale = max(1.0, abs(direct), abs(factored))
        worst_quot = max(worst_quot, abs(direct - factored) / scale)
    assert worst_euler <= 1e-12
    assert worst_quot <= 1e-12
    print(f"PASS symbol identities: direct vs factored determinants agree, "
          f"100 draws each, worst {max(worst_euler, worst_quot):.2e} "
          f"<= 1e-12 relative")


def test_criterion_6_expansion_consistency():
    # two profiles: one crossing the full span, one cut by the parabola
    terms = [
        ZerothTerm.solve(2.0, 1.0, 3.0, 1.0, 1.0, (1.0, 3.0), 0.5,
                         tol=1e-10),
        ZerothTerm.solve(1.0, 2.0, 1.0, 1.0, 1.0, (1.0, 3.0), 0.5,
                         tol=1e-10),
    ]
    worst0 = 0.0
    worst_tel = 0.0
    for term in terms:
        for y in np.linspace(term.y_lo, term.y_hi, 60):
            y = float(y)
            es = zeroth_residual(term, 1.0, 1.0, y)
            worst0 = max(worst0, max(abs(e) for e in es))
            combo = term.l0(y) * term.n0(y) + term.m0 * term.k0(y)
            worst_tel = max(worst_tel, abs(combo - term.c2))
    assert worst0 <= 1e-10
    assert worst_tel <= 1e-12

    term = terms[0]  # full span, clear of every pivot zero
    worst1 = 0.0
    for coeffs in ((), (1.0,), (0.0, 1.0)):  # A1 = 0, 1, y
        a1 = VirialCoefficient(coeffs)
        res = integrate_first_order(term, GAS, a1, (term.y_lo, term.y_hi),
                                    (0.0,) * 4, tol=1e-10)
        cells = 100
        width = (term.y_hi - term.y_lo) / cells
        h = 0.4 * width
        for i in range(cells):
            y = term.y_lo + (i + 0.5) * width
            state = res.at(y)
            prime = [
                fd_derivative(lambda v, j=j: float(res.at(v)[j]), y, step=h)
                for j in range(4)
            ]
            fs = first_order_residual(term, GAS, a1, y, state, prime)
            worst1 = max(worst1, max(abs(f) for f in fs))
    assert worst1 <= 1e-6
    print(f"PASS expansion consistency: zeroth residuals {worst0:.2e} "
          f"<= 1e-10, telescoping {worst_tel:.2e} <= 1e-12, first order "
          f"{worst1:.2e} <= 1e-6 for three density corrections")


def test_criterion_7_numerical_hygiene():
    rng = np.random.default_rng(7)
    worst = 0.0

    def check(exact, approx):
        nonlocal worst
        worst = max(worst, abs(exact - approx) / max(1.0, abs(exact)))

    # thermodynamic potentials: first, second, and third derivatives,
    # plus the closed-form pressure and entropy gradients
    pots = [ideal_gas_potential(3),
            virial_potential(4, [(0.2, -0.1), (0.05,)])]
    chains = [
        ("phi_x", "value", "x"), ("phi_y", "value", "y"),
        ("phi_xx", "phi_x", "x"), ("phi_xy", "phi_x", "y"),
        ("phi_yy", "phi_y", "y"), ("phi_xxx", "phi_xx", "x"),
        ("phi_xxy", "phi_xx", "y"), ("phi_xyy", "phi_xy", "y"),
        ("phi_yyy", "phi_yy", "y"),
    ]
    for pot in pots:
        for _ in range(10):
            x = 0.5 + 2.0 * rng.random()
            y = 0.5 + 2.0 * rng.random()
            for name, parent, wrt in chains:
                fn = getattr(pot, parent)
                if wrt == "x":
                    approx = fd_derivative(lambda s: fn(s, y), x)
                else:
                    approx = fd_derivative(lambda s: fn(x, s), y)
                check(getattr(pot, name)(x, y), approx)
            for partials in (pressure_partials, entropy_partials):
                _, px, py = partials(pot, GAS.R, x, y)
                fx = fd_derivative(lambda s: partials(pot, GAS.R, s, y)[0], x)
                fy = fd_derivative(lambda s: partials(pot, GAS.R, x, s)[0], y)
                check(px, fx)
                check(py, fy)

    # quotient fields: all eight supplied partials
    for maker in (quotsol1, quotsol2):
        field = maker(1.5, 4.0, 3, 1.0)
        for x, y in _sample_field_domain(field, rng, 8):
            for comp in "KLMN":
                base = getattr(field, comp)
                for wrt in "xy":
                    exact = field.partial(f"{comp}_{wrt}", x, y)
                    if wrt == "x":
                        approx = fd_derivative(lambda s: base(s, y), x)
                    else:
                        approx = fd_derivative(lambda s: base(x, s), y)
                    check(exact, approx)

    # flow families: every exact partial carried by the field objects
    for family, maker in ((1, solution_family_1), (2, solution_family_2)):
        consts = SolutionConstants(1.0, 2.0, 0.0, 0.0, 0.0, family=family)
        flow = maker(consts, GAS, tol=1e-10)
        base = {"u": flow.u, "rho": flow.rho, "theta": flow.theta}
        for t, a in _valid_flow_points(flow, consts, GAS, rng, 8):
            for name in ("u_t", "u_a", "rho_t", "rho_a",
                         "theta_t", "theta_a"):
                comp, wrt = name.split("_")
                fn = base[comp]
                if wrt == "t":
                    approx = fd_derivative(lambda s: fn(s, a), t)
                else:
                    approx = fd_derivative(lambda b: fn(t, b), a)
                check(flow.partial(name, t, a), approx)
    assert worst <= 1e-6

    # integrator self-convergence on the planar system
    field = as_planar_system(ReducedParams(2.0, -3.0))
    coarse = ode_solve(field, 0.0, [1.2, 0.9], 1.0, tol=1e-6)
    fine = ode_solve(field, 0.0, [1.2, 0.9], 1.0, tol=1e-9)
    gap = float(np.abs(coarse.ys[-1] - fine.ys[-1]).max())
    assert gap <= 1e-6
    print(f"PASS numerical hygiene: every exact derivative within "
          f"{worst:.2e} <= 1e-6 of finite differences; integrator "
          f"self-convergence gap {gap:.2e} <= 1e-6")


def test_criterion_8_centre_annulus():
    traj = integrate_trajectory(ReducedParams(2.0, -3.0), (1.05, 1.05),
                                50.0, tol=1e-10)
    assert traj.ss[-1] == pytest.approx(50.0)
    # sample the dense output as well as the accepted steps
    ss = np.linspace(0.0, 50.0, 2001)
    pts = np.array([traj.ode.at(float(s)) for s in ss])
    d = np.hypot(pts[:, 0] - 1.0, pts[:, 1] - 1.0)
    lo, hi = float(d.min()), float(d.max())
    assert 0.001 <= lo
    assert hi <= 0.5
    print(f"PASS centre behavior: orbit seeded at (1.05, 1.05) stays in "
          f"the annulus [0.001, 0.5] around (1, 1): distances span "
          f"[{lo:.3f}, {hi:.3f}] over s in [0, 50]")


def test_criterion_9_determinism(capsys):
    cli.main(["verify"])
    first_verify = capsys.readouterr().out
    cli.main(["verify"])
    second_verify = capsys.readouterr().out
    assert first_verify.encode() == second_verify.encode()
    args = ["portrait", "-A", "2", "-B", "-3"]
    cli.main(args)
    first_portrait = capsys.readouterr().out
    cli.main(args)
    second_portrait = capsys.readouterr().out
    assert first_portrait.encode() == second_portrait.encode()
    cli.main(args + ["--format", "csv"])
    first_csv = capsys.readouterr().out
    cli.main(args + ["--format", "csv"])
    second_csv = capsys.readouterr().out
    assert first_csv.encode() == second_csv.encode()
    print("PASS determinism: verify report, portrait SVG, and portrait CSV "
          "byte-identical across repeated runs")
