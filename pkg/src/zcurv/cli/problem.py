"""Problem files: JSON declarations of charts, systems, tables and tasks."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path

import jsonschema

from ..connection import ConnectionSystem, GammaTable, PdeResidual, StructureConstants, XiTable
from ..errors import ProblemFileError, ZcurvError
from ..exterior import Chart, DifferentialForm
from ..jetchart import JetChart
from ..numeric import Grid, KnownSolution
from ..symexpr import Expr, parse
from ..transforms import BacklundSystem, PfaffEquation, maurer_cartan, riccati_form, riccati_slots
from .schema import SCHEMA


@dataclass
class FrameSetup:
    """A chart of frame forms and the Pfaff equation to close on it."""

    chart: Chart
    constants: StructureConstants
    tau: PfaffEquation
    zero: tuple = ()

    @property
    def structure(self) -> dict:
        return maurer_cartan(self.chart, self.constants)

    @property
    def mod(self) -> dict:
        return {z: self.chart.zero(1) for z in self.zero}


@dataclass
class Task:
    name: str
    kind: str
    params: dict


@dataclass
class ProblemFile:
    name: str
    path: str | None
    charts: dict = field(default_factory=dict)
    constants: dict = field(default_factory=dict)
    systems: dict = field(default_factory=dict)
    gamma: dict = field(default_factory=dict)
    xi: dict = field(default_factory=dict)
    pdes: dict = field(default_factory=dict)
    patterns: dict = field(default_factory=dict)
    backlund: dict = field(default_factory=dict)
    frames: dict = field(default_factory=dict)
    grids: dict = field(default_factory=dict)
    solutions: dict = field(default_factory=dict)
    tasks: list = field(default_factory=list)


def shipped(name: str) -> Path:
    """Path of a problem file bundled with the package."""
    return Path(str(resources.files("zcurv") / "problems" / name))


def load(path) -> ProblemFile:
    path = str(path)
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ProblemFileError(f"cannot read problem file: {exc}", path) from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemFileError(f"malformed JSON: {exc}", path) from None
    return load_data(data, path)


def load_data(data, path: str | None = None) -> ProblemFile:
    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(data), key=lambda e: list(e.absolute_path))
    if errors:
        e = errors[0]
        where = "/".join(str(p) for p in e.absolute_path) or "<root>"
        raise ProblemFileError(f"schema violation at {where}: {e.message}", path)
    try:
        return _Builder(data, path).build()
    except ProblemFileError:
        raise
    except (ZcurvError, KeyError, ValueError, IndexError) as exc:
        raise ProblemFileError(str(exc), path) from None


class _Builder:
    def __init__(self, data, path):
        self.data = data
        self.pf = ProblemFile(data["name"], path)
        self.where = ""

    def fail(self, msg):
        raise ProblemFileError(f"{self.where}: {msg}", self.pf.path)

    def ref(self, table: dict, name: str, what: str):
        if name not in table:
            self.fail(f"unknown {what} {name!r}")
        return table[name]

    def expr(self, text, chart: JetChart | None = None) -> Expr:
        try:
            e = parse(str(text))
        except ZcurvError as exc:
            self.fail(f"cannot parse {text!r}: {exc}")
        return chart.jet_context.canonicalize(e) if chart is not None else e

    def build(self) -> ProblemFile:
        d, pf = self.data, self.pf
        for name, c in d["charts"].items():
            self.where = f"charts/{name}"
            pf.charts[name] = JetChart(tuple(c["base"]), c["fibers"], c.get("order", 1),
                                       tuple(c.get("extras", ())), c.get("max_order", 3))
        for name, c in d.get("constants", {}).items():
            self.where = f"constants/{name}"
            names = tuple(c["names"])
            entries = {}
            for a, b, cc, v in c["entries"]:
                for n in (a, b, cc):
                    if n not in names:
                        self.fail(f"unknown algebra index {n!r}")
                key = (names.index(a) + 1, names.index(b) + 1, names.index(cc) + 1)
                if key in entries:
                    self.fail(f"duplicate entry for C^{a}_{b}{cc}")
                entries[key] = Fraction(str(v))
            pf.constants[name] = StructureConstants.from_entries(len(names), entries, names)
        tables = d.get("tables", {})
        for name, g in tables.get("gamma", {}).items():
            self.where = f"tables/gamma/{name}"
            chart = self.ref(pf.charts, g["chart"], "chart")
            entries = {}
            for k, row in g["entries"].items():
                self.where = f"tables/gamma/{name}/entries/{k}"
                entries[k] = tuple(self.expr(e, chart) for e in row)
            matrix = {k: tuple(v) for k, v in g.get("matrix", {}).items()}
            pf.gamma[name] = GammaTable(chart, entries, matrix)
        for name, s in d.get("systems", {}).items():
            self.where = f"systems/{name}"
            pf.systems[name] = self.system(name, s)
        for name, x in tables.get("xi", {}).items():
            self.where = f"tables/xi/{name}"
            forms = x["forms"]
            if isinstance(forms, str):
                forms = self.ref(pf.systems, forms, "system").names
            entries = {}
            for fiber, row in x["entries"].items():
                for form, v in row.items():
                    entries[(fiber, form)] = self.expr(v)
            pf.xi[name] = XiTable(tuple(x["fibers"]), tuple(forms), entries)
        for name, p in d.get("pdes", {}).items():
            self.where = f"pdes/{name}"
            chart = self.ref(pf.charts, p["chart"], "chart")
            pf.pdes[name] = PdeResidual(name, self.expr(p["F"], chart))
        for name, p in d.get("patterns", {}).items():
            self.where = f"patterns/{name}"
            if "xi" in p:
                pf.patterns[name] = self.ref(pf.xi, p["xi"], "xi table")
            elif "coefficients" in p:
                pf.patterns[name] = {k: self.expr(v) for k, v in p["coefficients"].items()}
            else:
                pf.patterns[name] = riccati_slots(*p["slots"], p["variable"])
        for name, b in d.get("backlund", {}).items():
            self.where = f"backlund/{name}"
            chart = self.ref(pf.charts, b["chart"], "chart")
            if "rhs" in b:
                rhs = tuple(self.expr(e, chart) for e in b["rhs"])
                prov = {}
            else:
                src = self.ref(pf.systems, b["from"]["system"], "system")
                pat = self.ref(pf.patterns, b["from"]["pattern"], "pattern")
                _, derived = riccati_form(src, pat)
                if derived.unknown != b["unknown"]:
                    self.fail(f"pattern produces an equation for {derived.unknown!r}, not {b['unknown']!r}")
                rhs = derived.rhs
                prov = dict(b["from"])
            pf.backlund[name] = BacklundSystem(b["unknown"], rhs, chart, provenance=prov)
        for name, f in d.get("frames", {}).items():
            self.where = f"frames/{name}"
            chart = Chart(tuple(f["coordinates"]), tuple(f["frames"]))
            consts = self.ref(pf.constants, f["constants"], "constants")
            if consts.g != len(chart.frames):
                self.fail("one frame per algebra index is required")
            tau = DifferentialForm.from_mapping(chart, {k: self.expr(v) for k, v in f["tau"].items()})
            for z in f.get("zero", ()):
                if z not in chart.frames:
                    self.fail(f"unknown frame {z!r}")
            pf.frames[name] = FrameSetup(chart, consts, PfaffEquation(tau, f["variable"]), tuple(f.get("zero", ())))
        num = d.get("numeric", {})
        for name, g in num.get("grids", {}).items():
            self.where = f"numeric/grids/{name}"
            if "h" in g:
                pf.grids[name] = Grid.square(g["x0"], g["y0"], g["x1"], g["y1"], g["h"])
            else:
                pf.grids[name] = Grid(g["x0"], g["y0"], g["x1"], g["y1"], g["nx"], g["ny"])
        for name, s in num.get("solutions", {}).items():
            self.where = f"numeric/solutions/{name}"
            pf.solutions[name] = KnownSolution(tuple(s["base"]), s["fields"], s.get("require"))
        seen = set()
        for i, t in enumerate(d["tasks"]):
            self.where = f"tasks/{i}"
            if t["name"] in seen:
                self.fail(f"duplicate task name {t['name']!r}")
            seen.add(t["name"])
            self.check_task(t)
            pf.tasks.append(Task(t["name"], t["kind"], {k: v for k, v in t.items() if k not in ("name", "kind")}))
        return pf

    def system(self, name, s) -> ConnectionSystem:
        pf = self.pf
        chart = self.ref(pf.charts, s["chart"], "chart")
        consts = self.ref(pf.constants, s["constants"], "constants")
        base = None
        forms = {}
        for fname, spec in s["forms"].items():
            self.where = f"systems/{name}/forms/{fname}"
            if "combine" in spec:
                if base is None:
                    if "of" not in s:
                        self.fail("combined forms need an 'of' system")
                    base = self.ref(pf.systems, s["of"], "system")
                f = chart.chart.zero(1)
                for src, coef in spec["combine"].items():
                    if src not in base.forms:
                        self.fail(f"unknown form {src!r} in system {s['of']!r}")
                    f = f + base.forms[src] * self.expr(coef)
                forms[fname] = f
            else:
                forms[fname] = DifferentialForm.from_mapping(
                    chart.chart, {k: self.expr(v, chart) for k, v in spec.items()})
        # forms named after the constants are matched by name, otherwise by position
        self.where = f"systems/{name}"
        missing = set(consts.names) - set(forms)
        if missing and len(forms) != len(consts.names):
            self.fail(f"forms {sorted(missing)} are missing")
        gamma = self.ref(pf.gamma, s["gamma"], "gamma table") if "gamma" in s else None
        try:
            return ConnectionSystem(chart, consts, forms, gamma)
        except ValueError as exc:
            self.fail(str(exc))

    _NEEDS = {
        "jacobi": {"constants": "constants"},
        "lie": {"xi": "xi", "constants": "constants"},
        "zero-curvature": {"system": "systems", "pde": "pdes"},
        "lax": {"gamma": "gamma", "pde": "pdes"},
        "lax-numeric": {"gamma": "gamma", "solution": "solutions"},
        "riccati": {"system": "systems", "pattern": "patterns"},
        "backlund": {"systems": "backlund", "targets": "pdes"},
        "backlund-numeric": {"system": "backlund", "solution": "solutions", "grid": "grids"},
        "closure": {"frame": "frames"},
        "residual-scan": {"pde": "pdes", "solution": "solutions", "grid": "grids"},
    }
    _OPTIONAL = {"system": "systems", "pde": "pdes", "compare": "solutions", "grid": "grids"}

    def check_task(self, t):
        pf = self.pf
        needs = self._NEEDS[t["kind"]]
        for key, table in needs.items():
            if key not in t:
                self.fail(f"task {t['name']!r} of kind {t['kind']} needs {key!r}")
        for key, value in t.items():
            table = needs.get(key) or self._OPTIONAL.get(key)
            if table is None:
                continue
            values = value.values() if isinstance(value, dict) else value if isinstance(value, list) else [value]
            for v in values:
                self.ref(getattr(pf, table), v, table.rstrip("s") if table != "gamma" else "gamma table")
