"""Iterated generalized divided differences on a chart, and the classical
corank-one divided differences used as an independent oracle.

The chain for a map f on a chart starts from the exact quotient
(f(x + nu_1) - f(x)) / lambda_1 and iterates: each level substitutes
gamma^(j-1) -> gamma^(j-1) + nu_j into the previous level, subtracts, and
divides by lambda_j.  Unfolding parameters ride along unchanged and their
coordinate functions are omitted from the output.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .atlas import Chart, build_chart
from .polyring import (
    Poly,
    PolyError,
    Scalar,
    VarTable,
    divide_by_variable,
    parse_poly,
    substitute,
    transplant,
)


class MapFormError(PolyError):
    """A polynomial map does not satisfy a required normal form."""


class PolyMap:
    """A polynomial map C^n -> C^p with s leading unfolding parameters.

    The first s coordinate functions must be exactly the first s variables.
    With s="auto" the longest such identity prefix is used, except that a
    full identity prefix means the map is an embedding and s falls back to 0
    (a map needs at least one genuine fiber variable).
    """

    def __init__(self, table: VarTable, coords: Sequence[Poly], s="auto"):
        coords = tuple(coords)
        if not coords:
            raise MapFormError("a map needs at least one coordinate function")
        for c in coords:
            if c.table != table:
                raise MapFormError("coordinate functions must share the map's table")
        n = len(table)
        prefix = 0
        while (prefix < min(n, len(coords))
               and coords[prefix] == Poly.variable(table, table.names[prefix])):
            prefix += 1
        if s == "auto":
            s = prefix if prefix < n else 0
        else:
            s = int(s)
            if s < 0 or s > n:
                raise MapFormError(f"parameter count {s} out of range 0..{n}")
            if s == n:
                raise MapFormError(
                    "all source variables marked as parameters; no fiber remains")
            if s > prefix:
                raise MapFormError(
                    f"the first {s} coordinate functions must equal the first "
                    f"{s} variables (identity prefix has length {prefix})")
        self.table = table
        self.coords = coords
        self.s = s

    @classmethod
    def from_strings(cls, var_names: Sequence[str], coord_srcs: Sequence[str],
                     s="auto", mode: str = "strict") -> "PolyMap":
        table = VarTable(list(var_names))
        coords = [parse_poly(src, table, mode) for src in coord_srcs]
        return cls(table, coords, s)

    @property
    def n(self) -> int:
        return len(self.table)

    @property
    def p(self) -> int:
        return len(self.coords)

    @property
    def fiber_dim(self) -> int:
        return self.n - self.s

    @property
    def param_names(self) -> tuple[str, ...]:
        return self.table.names[:self.s]

    @property
    def fiber_names(self) -> tuple[str, ...]:
        return self.table.names[self.s:]

    @property
    def fiber_coords(self) -> tuple[Poly, ...]:
        """Coordinate functions past the parameter block."""
        return self.coords[self.s:]

    def chart_for(self, cc, alpha, r: int) -> Chart:
        return build_chart(cc, alpha, self.fiber_dim, r, self.s,
                           param_names=self.param_names,
                           base_names=self.fiber_names)

    def specialize(self, values: Sequence[Scalar]) -> "PolyMap":
        """Fix the parameters to rational values, yielding a member of the family."""
        if len(values) != self.s:
            raise ValueError(f"need {self.s} parameter values, got {len(values)}")
        fiber_table = VarTable(list(self.fiber_names))
        assignment = {nm: Fraction(v) if not isinstance(v, Fraction) else v
                      for nm, v in zip(self.param_names, values)}
        coords = [transplant(c, fiber_table, assignment) for c in self.fiber_coords]
        return PolyMap(fiber_table, coords, s=0)

    def __repr__(self):
        funcs = "; ".join(str(c) for c in self.coords)
        return f"PolyMap({', '.join(self.table.names)} -> {funcs}; s={self.s})"


@dataclass(frozen=True)
class DifferenceChain:
    """The generalized divided differences of one map on one chart."""

    f: PolyMap
    chart: Chart
    levels: tuple[tuple[Poly, ...], ...]

    @property
    def depth(self) -> int:
        return len(self.levels)


def _check_compatible(f: PolyMap, chart: Chart):
    if chart.n != f.fiber_dim:
        raise MapFormError(
            f"chart is for fiber dimension {chart.n}, map has {f.fiber_dim}")
    if chart.param_names != f.param_names or chart.base_names != f.fiber_names:
        raise MapFormError(
            "chart variable names do not match the map's parameter/fiber names")


def difference_chain(f: PolyMap, chart: Chart, depth: int | None = None) -> DifferenceChain:
    """Compute difference levels 1..depth of f on the chart."""
    _check_compatible(f, chart)
    if depth is None:
        depth = chart.r - 1
    if not 1 <= depth <= chart.r - 1:
        raise ValueError(f"depth {depth} out of range 1..{chart.r - 1}")

    lifted = [transplant(c, chart.table) for c in f.fiber_coords]
    shift1 = {nm: Poly.variable(chart.table, nm) + d
              for nm, d in zip(chart.base_names, chart.nu[0])}
    level = tuple(
        divide_by_variable(substitute(g, shift1) - g, chart.lambda_names[0])
        for g in lifted)
    levels = [level]
    for j in range(2, depth + 1):
        prev_names = [chart.lambda_names[j - 2], *chart.a_names[j - 2]]
        shift = {nm: Poly.variable(chart.table, nm) + d
                 for nm, d in zip(prev_names, chart.nu[j - 1])}
        level = tuple(
            divide_by_variable(substitute(g, shift) - g, chart.lambda_names[j - 1])
            for g in levels[-1])
        levels.append(level)
    return DifferenceChain(f=f, chart=chart, levels=tuple(levels))


# ---- classical corank-one divided differences ------------------------------


def _divide_by_binomial(p: Poly, u: str, v: str) -> Poly:
    """Exact quotient p / (u - v) by synthetic division in the variable u."""
    table = p.table
    ui = table.index(u)
    vi = table.index(v)
    by_degree: dict[int, dict] = {}
    for exps, c in p.terms.items():
        d = exps[ui]
        e = list(exps)
        e[ui] = 0
        by_degree.setdefault(d, {})[tuple(e)] = c
    top = max(by_degree, default=0)
    coeffs = [Poly(table, by_degree.get(d, {})) for d in range(top + 1)]
    vpoly = Poly.variable(table, v)
    upoly = Poly.variable(table, u)
    quotient = Poly.zero(table)
    carry = Poly.zero(table)
    for d in range(top, 0, -1):
        carry = coeffs[d] + carry
        quotient = quotient + carry * upoly ** (d - 1)
        carry = carry * vpoly
    remainder = coeffs[0] + carry
    if not remainder.is_zero():
        raise PolyError(
            f"nonzero remainder dividing by ({u}-{v}); numerator was not a difference")
    return quotient


def classical_corank1(f: PolyMap, r: int) -> list[list[Poly]]:
    """Divided differences of a corank-one normal form (x, y) -> (x, f_n..f_p).

    Returns levels 1..r-1, each a vector over variables x, y, y1, ..., y_{r-1};
    level j is divided by (y_j - y_{j-1}) after substituting y_{j-1} -> y_j.
    """
    if r < 2:
        raise ValueError("order r must be >= 2")
    n = f.n
    for i in range(n - 1):
        if f.coords[i] != Poly.variable(f.table, f.table.names[i]):
            raise MapFormError(
                f"coordinate {i + 1} must be the variable {f.table.names[i]!r} "
                "(corank-one normal form)")
    y = f.table.names[-1]
    node_names = [f"{y}{j}" for j in range(1, r)]
    for nm in node_names:
        if nm in f.table:
            raise MapFormError(f"variable {nm!r} collides with generated node names")
    table = VarTable(list(f.table.names) + node_names)

    current = [transplant(c, table) for c in f.coords[n - 1:]]
    nodes = [y] + node_names
    levels = []
    for j in range(1, r):
        u, v = nodes[j], nodes[j - 1]
        shifted = [substitute(g, {v: Poly.variable(table, u)}) for g in current]
        current = [_divide_by_binomial(a - b, u, v)
                   for a, b in zip(shifted, current)]
        levels.append(list(current))
    return levels


def corank1_translate(chain: DifferenceChain) -> list[list[Poly]]:
    """Rewrite a fiber-dimension-1 chain in classical node variables.

    lambda_1 becomes y1 - y and lambda_j becomes y_j - y_{j-1}, making the
    chain directly comparable with classical_corank1 output.
    """
    chart = chain.chart
    if chart.n != 1:
        raise MapFormError(
            f"translation needs fiber dimension 1, chart has {chart.n}")
    y = chart.base_names[0]
    node_names = [f"{y}{j}" for j in range(1, chart.r)]
    for nm in node_names:
        if nm in chart.param_names or nm == y:
            raise MapFormError(f"variable {nm!r} collides with generated node names")
    table = VarTable(list(chart.param_names) + [y] + node_names)
    nodes = [y] + node_names
    mapping = {}
    for j, lam in enumerate(chart.lambda_names, start=1):
        mapping[lam] = (Poly.variable(table, nodes[j])
                        - Poly.variable(table, nodes[j - 1]))
    return [[transplant(g, table, mapping) for g in level]
            for level in chain.levels]
