"""Jet charts, contact forms and pullback along sections."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations_with_replacement
from typing import Mapping

from .errors import ChartError, JetOrderError, UnboundAtomError
from .exterior import Chart, DifferentialForm, substitute
from .symexpr import Expr, JetContext, parse

DEFAULT_MAX_ORDER = 3


@dataclass(frozen=True)
class JetChart:
    """Coordinates ``x^i, u, lambda_I`` of ``J^r E`` with one or more fibers.

    ``fibers`` maps each unknown function to the prefix of its jet atoms:
    with base ``(x, y)`` and ``{"u": "l"}`` the jet atoms are ``l1, l2,
    l11, l12, l22, ...`` (1-based base indices, sorted). ``extras`` are
    additional fiber coordinates without jets, such as pseudopotentials.
    """

    base: tuple
    fibers: tuple  # ((name, jet_prefix), ...)
    order: int = 1
    extras: tuple = ()
    max_order: int = DEFAULT_MAX_ORDER

    def __post_init__(self):
        object.__setattr__(self, "base", tuple(self.base))
        fibers = self.fibers.items() if isinstance(self.fibers, Mapping) else self.fibers
        object.__setattr__(self, "fibers", tuple((str(a), str(b)) for a, b in fibers))
        object.__setattr__(self, "extras", tuple(self.extras))
        if self.order < 0:
            raise ChartError("jet order must be non-negative")
        if len(self.base) > 9:
            raise ChartError("at most 9 base coordinates are supported")
        object.__setattr__(self, "max_order", max(self.max_order, self.order + 1))
        names = self.atoms
        if len(set(names)) != len(names):
            raise ChartError(f"base, fiber and jet atom names must be pairwise distinct: {names}")

    @property
    def fiber_names(self) -> tuple:
        return tuple(f for f, _ in self.fibers)

    def multi_indices(self, k: int):
        return list(combinations_with_replacement(range(len(self.base)), k))

    def jet_name(self, fiber: str, multi_index) -> str:
        if not multi_index:
            return fiber
        prefix = dict(self.fibers)[fiber]
        return prefix + "".join(str(i + 1) for i in sorted(multi_index))

    def jet_atoms(self, fiber: str) -> list:
        return [self.jet_name(fiber, I) for k in range(1, self.order + 1) for I in self.multi_indices(k)]

    @property
    def atoms(self) -> tuple:
        out = list(self.base)
        for f, _ in self.fibers:
            out.append(f)
        out.extend(self.extras)
        for f, _ in self.fibers:
            out.extend(self.jet_atoms(f))
        return tuple(out)

    def split_jet(self, name: str):
        """``(fiber, multi_index)`` for a jet atom or a fiber, else ``None``."""
        for f, prefix in self.fibers:
            if name == f:
                return f, ()
            if name.startswith(prefix) and name[len(prefix):].isdigit():
                digits = name[len(prefix):]
                idx = tuple(int(ch) - 1 for ch in digits)
                if list(idx) != sorted(idx) or any(i < 0 or i >= len(self.base) for i in idx):
                    return None
                if len(idx) > self.order:
                    return None
                return f, idx
        return None

    @property
    def chart(self) -> Chart:
        return Chart(self.atoms)

    @property
    def jet_context(self) -> JetContext:
        return JetContext(self.base, self.fiber_names + self.extras, self.max_order)

    @property
    def section_chart(self) -> Chart:
        """Base chart whose coefficients may carry derivative atoms."""
        return Chart(self.base, jet=self.jet_context)

    def extend(self, *extras: str) -> "JetChart":
        return JetChart(self.base, self.fibers, self.order, self.extras + tuple(extras), self.max_order)

    def derivative_atom(self, fiber: str, multi_index) -> str:
        return self.jet_context.name(fiber, multi_index)

    def parse(self, text: str) -> Expr:
        """Parse an expression and canonicalize any derivative atoms it mentions."""
        return self.jet_context.canonicalize(parse(text))


def contact_forms(chart: JetChart) -> list:
    """``du - sum lambda_i dx^i`` and its prolongations up to order ``r - 1``."""
    c = chart.chart
    out = []
    n = len(chart.base)
    for fiber, _ in chart.fibers:
        for k in range(0, chart.order):
            for I in chart.multi_indices(k):
                form = c.d(chart.jet_name(fiber, I))
                for j in range(n):
                    form = form - c.d(chart.base[j]) * Expr.atom(chart.jet_name(fiber, I + (j,)))
                out.append(form)
    return out


class Section:
    """A section of the jet bundle, either symbolic or explicit.

    Symbolic mode maps ``lambda_I -> u_I`` (derivative atoms); explicit mode
    binds each fiber to a closed-form expression in the base coordinates.
    """

    def __init__(self, chart: JetChart, solution: Mapping[str, Expr] | None = None):
        self.chart = chart
        self.solution = None
        if solution is not None:
            self.solution = {k: (parse(v) if isinstance(v, str) else v) for k, v in solution.items()}

    @classmethod
    def symbolic(cls, chart: JetChart) -> "Section":
        return cls(chart)

    @classmethod
    def explicit(cls, chart: JetChart, solution: Mapping) -> "Section":
        return cls(chart, solution)

    @property
    def mode(self) -> str:
        return "symbolic" if self.solution is None else "explicit"

    @property
    def target(self) -> Chart:
        if self.solution is None:
            return self.chart.section_chart
        return Chart(self.chart.base)

    def _value(self, fiber: str, idx: tuple) -> Expr:
        if self.solution is None:
            if len(idx) > self.chart.max_order:
                raise JetOrderError(f"derivative of order {len(idx)} exceeds {self.chart.max_order}")
            return Expr.atom(self.chart.derivative_atom(fiber, idx))
        if fiber not in self.solution:
            raise UnboundAtomError(f"fiber {fiber!r} is not bound in the explicit section")
        e = self.solution[fiber]
        for i in idx:
            e = e.diff(self.chart.base[i])
        return e

    def _atom_rules(self) -> dict:
        rules = {}
        all_fibers = list(self.chart.fibers) + [(x, None) for x in self.chart.extras]
        for fiber, _ in all_fibers:
            if self.solution is not None:
                if fiber in self.solution:
                    rules[fiber] = self.solution[fiber]
            if fiber in dict(self.chart.fibers):
                for k in range(1, self.chart.order + 1):
                    for I in self.chart.multi_indices(k):
                        rules[self.chart.jet_name(fiber, I)] = self._value(fiber, I)
        return rules

    def _basis_rules(self, target: Chart) -> dict:
        rules = {}
        base = self.chart.base
        fibers = list(self.chart.fibers) + [(x, None) for x in self.chart.extras]
        for fiber, prefix in fibers:
            orders = range(0, self.chart.order + 1) if prefix is not None else [0]
            for k in orders:
                for I in self.chart.multi_indices(k):
                    if self.solution is not None and fiber not in self.solution:
                        continue
                    name = self.chart.jet_name(fiber, I) if prefix is not None else fiber
                    form = target.zero(1)
                    for j, b in enumerate(base):
                        form = form + target.d(b) * self._value(fiber, I + (j,))
                    rules[name] = form
        return rules

    def apply(self, e: Expr) -> Expr:
        """Restrict a scalar on the jet chart to the section."""
        return e.subs(self._atom_rules())

    def pullback(self, f: DifferentialForm) -> DifferentialForm:
        return pullback(f, self)


def pullback(f: DifferentialForm, s: Section) -> DifferentialForm:
    """Restrict a form on the jet chart to the base along the section ``s``."""
    target = s.target
    chart_atoms = set(s.chart.atoms)
    for name in f.chart.basis:
        if name not in chart_atoms:
            raise ChartError(f"basis element {name!r} is not on the jet chart")
    result = substitute(f, s._basis_rules(target), s._atom_rules(), target)
    if s.solution is not None:
        leftover = result.atoms() - set(s.chart.base) - set(target.parameters)
        unbound = leftover & (set(s.chart.fiber_names) | set(s.chart.extras))
        if unbound:
            raise UnboundAtomError(f"fibers {sorted(unbound)} are not bound in the explicit section")
    return result
