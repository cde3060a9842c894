import io
import math

import numpy as np
import pytest

from zcurv.connection import PdeResidual
from zcurv.errors import ExcludedNodeError, NumericError, TransportOverflowError
from zcurv.jetchart import JetChart
from zcurv.numeric import (Grid, GridField, KnownSolution, compile_expr, evaluate_array, integrate_backlund,
                           integrate_lax, residual_scan)
from zcurv.symexpr import evaluate, parse
from zcurv.transforms import LaxPair, lax_pair

EXACT = "-2*log(4 - (x+y)/sqrt2)"
U0 = -2 * math.log(4)
UNIT = Grid.square(0, 0, 1, 1, 0.01)


def known(**fields):
    require = fields.pop("require", None)
    return KnownSolution(("x", "y"), fields, require)


def closed_form(X, Y):
    return -2 * np.log(4 - (X + Y) / math.sqrt(2))


# grids -------------------------------------------------------------------------------

def test_grid_validation():
    with pytest.raises(NumericError):
        Grid(0, 0, 1, 1, 1, 5)
    g = Grid.square(0, 0, 1, 1, 0.25)
    assert (g.nx, g.ny, g.hx) == (5, 5, 0.25)
    xs, ys = g.axes(half=True)
    assert len(xs) == 9 and xs[-1] == 1.0


def test_grid_field_rejects_nonfinite():
    g = Grid(0, 0, 1, 1, 2, 2)
    with pytest.raises(NumericError):
        GridField(g, [[0.0, np.nan], [1.0, 2.0]])
    f = GridField(g, [[0.0, 1.0], [2.0, 3.0]])
    with pytest.raises(ValueError):
        f.values[0, 0] = 5.0
    rows = f.to_csv().splitlines()
    assert rows[0] == "x,y,value" and rows[2] == "0.0,1.0,1.0"
    buf = io.StringIO()
    f.to_csv(buf)
    assert buf.getvalue().splitlines() == rows


# compiled programs ---------------------------------------------------------------------

def test_program_matches_scalar_evaluation(rng):
    e = parse("sqrt2*exp(u/2 - v/2)*u_x^2 - 3/7*x*v + exp(-u)")
    atoms = sorted(e.atoms() - {"v"})
    prog = compile_expr(e, "v", atoms)
    F = np.array([[rng.uniform(-1, 1) for _ in range(6)] for _ in atoms])
    state = np.array([rng.uniform(-1, 1) for _ in range(6)])
    got = evaluate_array(prog, F, state)
    for k in range(6):
        env = dict(zip(atoms, F[:, k]))
        env["v"] = state[k]
        assert got[k] == pytest.approx(evaluate(e, env), rel=1e-13)


# residual scans ----------------------------------------------------------------------

def test_scan_linear_wave_solution():
    r = residual_scan(PdeResidual("wave", parse("v_xy")), known(v="x - y"), UNIT)
    assert r.max_abs == 0.0


def test_scan_exact_liouville():
    r = residual_scan(PdeResidual("liouville", parse("u_xy - exp(u)")), known(u=EXACT), UNIT)
    assert r.max_abs <= 1e-12


def test_scan_not_a_solution():
    r = residual_scan(PdeResidual("liouville", parse("u_xy - exp(u)")), known(u="x*y"), UNIT)
    assert r.max_abs > 0.5
    assert r.location == (1.0, 1.0)
    assert r.max_abs == pytest.approx(math.e - 1, rel=1e-12)


def test_scan_excluded_node():
    g = Grid.square(0, 0, 4, 4, 0.5)
    with pytest.raises(ExcludedNodeError):
        residual_scan(PdeResidual("liouville", parse("u_xy - exp(u)")), known(u=EXACT, require="4 - (x+y)/sqrt2"), g)


# Backlund transport --------------------------------------------------------------------

def test_transport_reproduces_closed_form(lw):
    res = integrate_backlund(lw.backlund["bt_u"], known(v="0"), U0, UNIT)
    X, Y = UNIT.mesh()
    assert np.max(np.abs(res.field.values - closed_form(X, Y))) <= 1e-8
    assert res.defect <= 1e-8


def test_transport_negative_control(lw):
    res = integrate_backlund(lw.backlund["bt_u"], known(v="x*y"), U0, UNIT)
    assert res.defect > 1e-3
    # floor measured once by a brute-force run and frozen as a regression bound
    assert res.defect == pytest.approx(2.62907, rel=1e-4)


def test_transport_order(lw):
    errs = []
    for h in (0.1, 0.05):
        g = Grid.square(0, 0, 1, 1, h)
        res = integrate_backlund(lw.backlund["bt_u"], known(v="0"), U0, g)
        X, Y = g.mesh()
        errs.append(np.max(np.abs(res.field.values - closed_form(X, Y))))
    assert errs[0] / errs[1] >= 8


def test_defect_tracks_residual(lw):
    defects, residuals = [], []
    for eps in (0, 0.1, 1):
        k = known(v=f"{eps}*x*y")
        defects.append(integrate_backlund(lw.backlund["bt_u"], k, U0, UNIT).defect)
        residuals.append(residual_scan(PdeResidual("wave", parse("v_xy")), k, UNIT).max_abs)
    assert defects[0] <= 1e-8 and residuals[0] == 0.0
    assert defects[0] < defects[1] < defects[2]
    assert residuals[0] < residuals[1] < residuals[2]


def test_parallel_columns_bit_identical(lw):
    a = integrate_backlund(lw.backlund["bt_u"], known(v="x*y"), U0, UNIT, workers=1)
    b = integrate_backlund(lw.backlund["bt_u"], known(v="x*y"), U0, UNIT, workers=4)
    assert np.array_equal(a.field.values, b.field.values)
    assert a.defect == b.defect


def test_transport_overflow(lw):
    # v = 0 gives the closed form, which blows up on x + y = 4 sqrt2
    g = Grid.square(0, 0, 4, 4, 0.05)
    with pytest.raises(TransportOverflowError):
        integrate_backlund(lw.backlund["bt_u"], known(v="0"), U0, g)


def test_transport_excluded_region(lw):
    g = Grid.square(0, 0, 1, 1, 0.1, exclude=lambda X, Y: (X > 0.5) & (Y > 0.5))
    with pytest.raises(ExcludedNodeError):
        integrate_backlund(lw.backlund["bt_u"], known(v="0"), U0, g)


# Lax transport -------------------------------------------------------------------------

def test_lax_transport_exact(lw):
    r = integrate_lax(lax_pair(lw.gamma["Gamma"]), known(u=EXACT, require="4 - (x+y)/sqrt2"), (0, 0, 1, 1), 1000)
    assert r.defect <= 1e-8


def test_lax_transport_not_a_solution(lw):
    r = integrate_lax(lax_pair(lw.gamma["Gamma"]), known(u="x*y"), (0, 0, 1, 1), 1000)
    assert r.defect >= 1e-2
    assert r.defect == pytest.approx(0.163875, rel=1e-4)


def test_lax_transport_zero_pair():
    ch = JetChart(("x", "y"), {"u": "l"})
    z = parse("0")
    r = integrate_lax(LaxPair([[z, z], [z, z]], [[z, z], [z, z]], ch), None, (0, 0, 1, 1), 50)
    assert r.defect == 0.0
    assert np.array_equal(r.x_then_y, np.eye(2))


def test_lax_defect_monotone_in_perturbation(lw):
    p = lax_pair(lw.gamma["Gamma"])
    out = []
    for eps in (0, 0.01, 0.05, 0.1):
        k = known(u=f"{EXACT} + {eps}*x*y", require="4 - (x+y)/sqrt2")
        out.append(integrate_lax(p, k, (0, 0, 1, 1), 200).defect)
    assert out == sorted(out) and out[0] < out[1]
