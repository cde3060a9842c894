"""Differential forms over a declared chart.

A :class:`Chart` fixes an ordered basis of one-forms: the differentials of
its coordinates followed by any named frame forms (one-forms that are not
exact, whose exterior derivatives are supplied by structure equations).
Wedge monomials are stored as strictly increasing tuples of basis indices,
so permutation signs are resolved at construction time.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .errors import ChartError, DegreeError
from .symexpr import Expr, JetContext, parse
from .symexpr.expr import ZERO_EXPR


@dataclass(frozen=True)
class Chart:
    """Ordered coordinates (and optional frame forms) of a local chart.

    ``jet`` marks a section chart: coefficients may contain derivative atoms
    such as ``u_x`` and ``d`` differentiates them with total derivatives.
    ``parameters`` are atoms treated as constants.
    """

    coordinates: tuple
    frames: tuple = ()
    jet: JetContext | None = None
    parameters: tuple = ()
    _index: dict = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "coordinates", tuple(self.coordinates))
        object.__setattr__(self, "frames", tuple(self.frames))
        object.__setattr__(self, "parameters", tuple(self.parameters))
        names = self.coordinates + self.frames
        if len(set(names)) != len(names):
            raise ChartError(f"duplicate basis names in {names}")
        object.__setattr__(self, "_index", {n: i for i, n in enumerate(names)})
        if self.jet is not None:
            missing = [b for b in self.jet.base if b not in self.coordinates]
            if missing:
                raise ChartError(f"jet base coordinates {missing} are not chart coordinates")

    @property
    def basis(self) -> tuple:
        return self.coordinates + self.frames

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise ChartError(f"{name!r} is not a basis element of the chart {self.basis}") from None

    def is_frame(self, i: int) -> bool:
        return i >= len(self.coordinates)

    def d(self, name: str) -> "DifferentialForm":
        """Basis one-form: ``d name`` for a coordinate, the frame form itself otherwise."""
        return DifferentialForm(self, 1, {(self.index(name),): Expr.const(1)})

    def scalar(self, e) -> "DifferentialForm":
        e = parse(e) if isinstance(e, str) else Expr.coerce(e)
        return DifferentialForm(self, 0, {(): e} if e else {})

    def zero(self, degree: int) -> "DifferentialForm":
        return DifferentialForm(self, degree, {})

    def label(self, i: int) -> str:
        name = self.basis[i]
        return name if self.is_frame(i) else f"d {name}"

    def known_atoms(self) -> set:
        return set(self.coordinates) | set(self.parameters)

    def check_atoms(self, e: Expr):
        for a in e.atoms():
            if a in self._index or a in self.parameters:
                continue
            if self.jet is not None and self.jet.is_derivative(a):
                continue
            raise ChartError(f"atom {a!r} does not belong to the chart {self.coordinates}")


def _sort_with_sign(idx: tuple):
    """Sort basis indices; return ``(sorted, sign)`` or ``(None, 0)`` on a repeat."""
    arr = list(idx)
    sign = 1
    for i in range(1, len(arr)):
        j = i
        while j > 0 and arr[j - 1] > arr[j]:
            arr[j - 1], arr[j] = arr[j], arr[j - 1]
            sign = -sign
            j -= 1
        if j > 0 and arr[j - 1] == arr[j]:
            return None, 0
    return tuple(arr), sign


class DifferentialForm:
    """Homogeneous form ``sum coef_I * e_I`` on a chart. Immutable."""

    __slots__ = ("chart", "degree", "_terms")

    def __init__(self, chart: Chart, degree: int, terms: Mapping | None = None):
        object.__setattr__(self, "chart", chart)
        object.__setattr__(self, "degree", degree)
        object.__setattr__(self, "_terms", {k: v for k, v in (terms or {}).items() if v})

    def __setattr__(self, name, value):
        raise AttributeError("DifferentialForm is immutable")

    @classmethod
    def from_mapping(cls, chart: Chart, mapping: Mapping) -> "DifferentialForm":
        """Build from ``{"dx^dy": "coef", ...}``; keys use ``d<coord>`` or frame names joined by ``^``."""
        degree = None
        acc = chart.zero(0)
        for key, value in mapping.items():
            coef = parse(value) if isinstance(value, str) else Expr.coerce(value)
            idx = tuple(chart.index(_basis_name(chart, part)) for part in key.split("^")) if key.strip() else ()
            if degree is None:
                degree = len(idx)
                acc = chart.zero(degree)
            elif degree != len(idx):
                raise DegreeError(f"mixed degrees in form mapping {dict(mapping)}")
            srt, sign = _sort_with_sign(idx)
            if srt is None:
                continue
            acc = acc + DifferentialForm(chart, degree, {srt: coef.scale(sign)})
        return acc

    @property
    def terms(self) -> Mapping:
        return self._terms

    def items(self):
        return sorted(self._terms.items())

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def coefficient(self, *names: str) -> Expr:
        """Coefficient of the wedge of the named basis elements (sign applied)."""
        idx = tuple(self.chart.index(_basis_name(self.chart, n)) for n in names)
        if len(idx) != self.degree:
            raise DegreeError(f"asked for a degree-{len(idx)} coefficient of a degree-{self.degree} form")
        srt, sign = _sort_with_sign(idx)
        if srt is None:
            return ZERO_EXPR
        return self._terms.get(srt, ZERO_EXPR).scale(sign)

    def as_expr(self) -> Expr:
        if self.degree != 0:
            raise DegreeError("only degree-0 forms are scalars")
        return self._terms.get((), ZERO_EXPR)

    def atoms(self) -> frozenset:
        out = set()
        for c in self._terms.values():
            out |= c.atoms()
        return frozenset(out)

    def basis_used(self) -> set:
        return {self.chart.basis[i] for k in self._terms for i in k}

    # arithmetic -----------------------------------------------------------

    def _check(self, other: "DifferentialForm"):
        if not isinstance(other, DifferentialForm):
            raise TypeError(f"expected a DifferentialForm, got {type(other).__name__}")
        if other.chart != self.chart:
            raise ChartError("forms live on different charts")

    def __add__(self, other):
        if isinstance(other, (Expr, int)) and self.degree == 0:
            other = self.chart.scalar(other)
        self._check(other)
        if other.degree != self.degree and self._terms and other._terms:
            raise DegreeError(f"cannot add degree {self.degree} and degree {other.degree} forms")
        degree = self.degree if self._terms else other.degree
        out = dict(self._terms)
        for k, c in other._terms.items():
            s = out.get(k, ZERO_EXPR) + c
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return DifferentialForm(self.chart, degree, out)

    def __neg__(self):
        return DifferentialForm(self.chart, self.degree, {k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, scalar):
        """Multiply by a scalar expression (degree-0 factor)."""
        if isinstance(scalar, DifferentialForm):
            return wedge(self, scalar)
        s = Expr.coerce(parse(scalar) if isinstance(scalar, str) else scalar)
        return DifferentialForm(self.chart, self.degree, {k: c * s for k, c in self._terms.items()})

    __rmul__ = __mul__

    def __xor__(self, other):
        return wedge(self, other)

    def __eq__(self, other):
        if not isinstance(other, DifferentialForm):
            return NotImplemented
        if self.chart != other.chart:
            return False
        if not self._terms and not other._terms:
            return True
        return self.degree == other.degree and self._terms == other._terms

    def __hash__(self):
        return hash((self.degree, frozenset(self._terms.items())))

    def __str__(self):
        return format_form(self)

    def __repr__(self):
        return f"DifferentialForm({str(self)!r}, degree={self.degree})"


def _basis_name(chart: Chart, part: str) -> str:
    part = part.strip()
    if part in chart.frames:
        return part
    if part.startswith("d"):
        name = part[1:].strip()
        if name in chart.coordinates:
            return name
    raise ChartError(f"{part!r} is not a basis one-form of the chart {chart.basis}")


def format_form(f: DifferentialForm) -> str:
    """``coef * d a ^ d b`` monomials in basis order, joined by `` + ``."""
    if not f.terms:
        return "0"
    out = []
    for idx, c in f.items():
        cs = str(c)
        if not idx:
            out.append(cs if len(c) == 1 else f"({cs})")
            continue
        mono = " ^ ".join(f.chart.label(i) for i in idx)
        if len(c) > 1:
            cs = f"({cs})"
        out.append(f"{cs} * {mono}")
    return " + ".join(out)


def wedge(f: DifferentialForm, g: DifferentialForm) -> DifferentialForm:
    f._check(g)
    degree = f.degree + g.degree
    out: dict = {}
    for i1, c1 in f._terms.items():
        for i2, c2 in g._terms.items():
            srt, sign = _sort_with_sign(i1 + i2)
            if srt is None:
                continue
            c = (c1 * c2).scale(sign) if sign < 0 else c1 * c2
            s = out.get(srt, ZERO_EXPR) + c
            if s:
                out[srt] = s
            else:
                out.pop(srt, None)
    return DifferentialForm(f.chart, degree, out)


def _d_scalar(chart: Chart, c: Expr) -> DifferentialForm:
    chart.check_atoms(c)
    out: dict = {}
    jet = chart.jet
    for a in c.atoms():
        if a in chart.coordinates and (jet is None or a not in jet.base):
            dc = c.diff(a)
            if dc:
                i = chart.index(a)
                out[(i,)] = out.get((i,), ZERO_EXPR) + dc
    if jet is not None:
        for b in jet.base:
            dc = jet.total_derivative(c, b)
            if dc:
                i = chart.index(b)
                out[(i,)] = out.get((i,), ZERO_EXPR) + dc
    return DifferentialForm(chart, 1, out)


def d(f: DifferentialForm, structure: Mapping[str, DifferentialForm] | None = None) -> DifferentialForm:
    """Exterior derivative.

    Coordinate differentials are closed. A frame form ``theta`` is replaced
    by ``structure[theta]``, which must be a 2-form on the same chart.
    """
    chart = f.chart
    result = chart.zero(f.degree + 1)
    for idx, c in f._terms.items():
        basis = DifferentialForm(chart, f.degree, {idx: Expr.const(1)})
        result = result + wedge(_d_scalar(chart, c), basis)
        for pos, i in enumerate(idx):
            if not chart.is_frame(i):
                continue
            name = chart.basis[i]
            if structure is None or name not in structure:
                raise ChartError(f"no structure equation supplied for frame form {name!r}")
            dtheta = structure[name]
            if dtheta.degree != 2 and dtheta:
                raise DegreeError(f"structure equation for {name!r} must be a 2-form")
            left = DifferentialForm(chart, pos, {idx[:pos]: Expr.const(1)})
            right = DifferentialForm(chart, len(idx) - pos - 1, {idx[pos + 1:]: Expr.const(1)})
            piece = wedge(wedge(left, dtheta), right) * c
            result = result + (piece if pos % 2 == 0 else -piece)
    return result


def substitute(f: DifferentialForm,
               rules: Mapping[str, DifferentialForm] | None = None,
               atom_rules: Mapping[str, Expr] | None = None,
               target: Chart | None = None) -> DifferentialForm:
    """Simultaneously replace basis one-forms and atoms, then renormalize.

    Basis elements without a rule map to the same-named element of
    ``target`` (which defaults to the source chart).
    """
    rules = rules or {}
    atom_rules = atom_rules or {}
    target = target or f.chart
    images = {}
    for name, form in rules.items():
        if form.degree != 1 and form:
            raise DegreeError(f"rule for {name!r} has degree {form.degree}, expected 1")
        if form.chart != target:
            raise ChartError(f"rule for {name!r} does not live on the target chart")
    result = target.zero(f.degree)
    for idx, c in f._terms.items():
        piece = target.scalar(c.subs(atom_rules))
        if not piece:
            continue
        for i in idx:
            name = f.chart.basis[i]
            img = images.get(name)
            if img is None:
                img = rules[name] if name in rules else target.d(name)
                images[name] = img
            piece = wedge(piece, img)
            if not piece:
                break
        result = result + piece
    return DifferentialForm(target, f.degree, result.terms)
