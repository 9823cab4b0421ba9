"""Property suites tying the symbolic equations to their geometric meaning.

Every check works in exact rational arithmetic; a suite returns a report
whose failure list is empty exactly when the property held on every trial.
Sampling is driven by a seeded generator, so reports are reproducible.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .atlas import Chart, CoveringCollection, multi_indices
from .divdiff import (
    DifferenceChain,
    PolyMap,
    classical_corank1,
    corank1_translate,
    difference_chain,
)
from .polyring import (
    Poly,
    VarTable,
    differentiate,
    evaluate,
    normalize,
    substitute,
    transplant,
)


@dataclass(frozen=True)
class SampleConfig:
    """Reproducible sampling parameters for the randomized suites."""

    seed: int = 0
    trials: int = 25
    coeff_bound: int = 4
    degree_bound: int = 3

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.coeff_bound < 1 or self.degree_bound < 1:
            raise ValueError("bounds must be >= 1")


@dataclass
class VerifyReport:
    """Outcome of one suite: counts plus (description, expected, actual) rows."""

    suite: str
    trials: int = 0
    failures: list[tuple[str, str, str]] = field(default_factory=list)
    skipped: int = 0

    @property
    def passed(self) -> bool:
        return not self.failures

    def record(self, description: str, expected, actual):
        self.failures.append((description, str(expected), str(actual)))

    def summary(self) -> str:
        state = "pass" if self.passed else "FAIL"
        extra = f", {self.skipped} skipped" if self.skipped else ""
        return (f"{self.suite}: {state} "
                f"({self.trials} trials, {len(self.failures)} failures{extra})")


# ---- sampling helpers ------------------------------------------------------


def rand_fraction(rng: random.Random, bound: int, nonzero: bool = False) -> Fraction:
    while True:
        num = rng.randint(-bound, bound)
        if nonzero and num == 0:
            continue
        return Fraction(num, rng.randint(1, bound))


def rand_poly(rng: random.Random, table: VarTable, degree_bound: int,
              coeff_bound: int, max_terms: int = 4) -> Poly:
    terms = {}
    for _ in range(rng.randint(1, max_terms)):
        exps = [0] * len(table)
        budget = rng.randint(0, degree_bound)
        for _ in range(budget):
            exps[rng.randrange(len(table))] += 1
        c = rng.randint(-coeff_bound, coeff_bound)
        if c:
            key = tuple(exps)
            terms[key] = terms.get(key, 0) + c
    return Poly(table, terms)


def rand_polymap(rng: random.Random, n: int, p: int, s: int,
                 cfg: SampleConfig) -> PolyMap:
    """Random map with an s-variable identity prefix in unfolding form."""
    if not 0 <= s < n or p < s:
        raise ValueError("need 0 <= s < n and p >= s")
    if n <= 3:
        base = ("x", "y", "z")[:n - s]
    else:
        base = tuple(f"x{i}" for i in range(1, n - s + 1))
    params = () if s == 0 else (("t",) if s == 1 else
                                tuple(f"t{i}" for i in range(1, s + 1)))
    table = VarTable(list(params) + list(base))
    coords = [Poly.variable(table, nm) for nm in params]
    for _ in range(p - s):
        coords.append(rand_poly(rng, table, cfg.degree_bound, cfg.coeff_bound))
    return PolyMap(table, coords, s=s)


def _rand_chart_point(rng: random.Random, chart: Chart, cfg: SampleConfig) -> list:
    point = []
    lambdas = set(chart.lambda_names)
    for nm in chart.table.names:
        point.append(rand_fraction(rng, cfg.coeff_bound, nonzero=nm in lambdas))
    return point


def _eval_map(f: PolyMap, params: Sequence[Fraction],
              fiber: Sequence[Fraction]) -> tuple:
    vals = list(params) + list(fiber)
    return tuple(evaluate(c, vals) for c in f.coords)


# ---- telescoping -----------------------------------------------------------


def telescoping_failures(f: PolyMap, chain: DifferenceChain) -> list[tuple[str, str, str]]:
    """Violations of the defining recursion of the chain, as report rows."""
    chart = chain.chart
    out = []
    lifted = [transplant(c, chart.table) for c in f.fiber_coords]
    shift1 = {nm: Poly.variable(chart.table, nm) + d
              for nm, d in zip(chart.base_names, chart.nu[0])}
    lam1 = Poly.variable(chart.table, chart.lambda_names[0])
    for idx, (g0, g1) in enumerate(zip(lifted, chain.levels[0])):
        lhs = lam1 * g1
        rhs = substitute(g0, shift1) - g0
        if lhs != rhs:
            out.append((f"{chart.name()} level 1 component {idx + 1}",
                        str(rhs), str(lhs)))
    for j in range(2, chain.depth + 1):
        prev_names = [chart.lambda_names[j - 2], *chart.a_names[j - 2]]
        shift = {nm: Poly.variable(chart.table, nm) + d
                 for nm, d in zip(prev_names, chart.nu[j - 1])}
        lam = Poly.variable(chart.table, chart.lambda_names[j - 1])
        for idx, (prev, cur) in enumerate(zip(chain.levels[j - 2],
                                              chain.levels[j - 1])):
            lhs = lam * cur
            rhs = substitute(prev, shift) - prev
            if lhs != rhs:
                out.append((f"{chart.name()} level {j} component {idx + 1}",
                            str(rhs), str(lhs)))
    return out


def check_telescoping(f: PolyMap, r: int, cc: CoveringCollection,
                      cfg: SampleConfig,
                      _corrupt: bool = False) -> VerifyReport:
    """Exact symbolic telescoping on every chart and level.

    The check is deterministic; cfg is accepted for interface uniformity.
    ``_corrupt`` deliberately breaks the first chain (negative control).
    """
    report = VerifyReport(suite="telescoping")
    first = True
    for alpha in multi_indices(f.fiber_dim, r, cc.ell):
        chart = f.chart_for(cc, alpha, r)
        chain = difference_chain(f, chart)
        if _corrupt and first:
            first = False
            broken = list(list(level) for level in chain.levels)
            broken[0][0] = broken[0][0] + 1
            chain = DifferenceChain(f=chain.f, chart=chain.chart,
                                    levels=tuple(tuple(lv) for lv in broken))
        report.trials += chain.depth * len(chain.levels[0])
        report.failures.extend(telescoping_failures(f, chain))
    return report


# ---- strict points ---------------------------------------------------------


def _projected_tuple(eqs_chart: Chart, projections, point: Sequence[Fraction]):
    """Fiber coordinates of the r projected source points at a chart point."""
    return [tuple(evaluate(comp, point) for comp in proj)
            for proj in projections]


def _antipodal_witnesses(f: PolyMap, chart: Chart, rng: random.Random,
                         cfg: SampleConfig, count: int) -> list[list[Fraction]]:
    """Chart points of double pairs (v, -v) for maps even in one fiber variable.

    Looks for a fiber variable v such that flipping its sign fixes every
    coordinate function; the pair (x, x|v->-v) then has equal images, and its
    chart coordinates exist whenever the chosen form does not kill 2v.
    """
    if chart.r != 2:
        return []
    table = f.table
    out = []
    for k, vname in enumerate(f.fiber_names):
        flipped = {vname: -Poly.variable(table, vname)}
        if any(substitute(c, flipped) != c for c in f.coords):
            continue
        for _ in range(count * 4):
            if len(out) >= count:
                break
            params = [rand_fraction(rng, cfg.coeff_bound) for _ in range(f.s)]
            fiber = [rand_fraction(rng, cfg.coeff_bound) for _ in f.fiber_names]
            v = rand_fraction(rng, cfg.coeff_bound, nonzero=True)
            fiber[k] = v
            delta = [Fraction(0)] * len(fiber)
            delta[k] = -2 * v
            lam = chart.cc.forms[chart.alpha[0] - 1](delta)
            if lam == 0:
                continue
            avals = [chart.cc.forms[j](delta) / lam
                     for j in chart.cc.companions[chart.alpha[0] - 1]]
            out.append(params + fiber + [lam] + avals)
        break
    return out


def check_strict_points(f: PolyMap, r: int, cc: CoveringCollection,
                        cfg: SampleConfig,
                        witnesses: Sequence[tuple[tuple, Sequence]] = ()) -> VerifyReport:
    """Vanishing of all generators <=> equal images, on strict configurations.

    Random chart points (all lambdas nonzero, projected points pairwise
    distinct) exercise the generic case; manufactured or supplied witness
    points exercise the vanishing case.  ``witnesses`` entries are
    (alpha, chart point vector) pairs.
    """
    from .ideals import kr_equations

    rng = random.Random(cfg.seed)
    report = VerifyReport(suite="strict-points")
    by_alpha = {}
    for eqs in kr_equations(f, r, cc):
        by_alpha[eqs.chart.alpha] = eqs

    def run_case(eqs, point, label):
        chart = eqs.chart
        for nm in chart.lambda_names:
            if evaluate(Poly.variable(chart.table, nm), point) == 0:
                return None
        tup = _projected_tuple(chart, eqs.projections, point)
        if len(set(tup)) != len(tup):
            return None
        report.trials += 1
        params = point[:chart.s]
        gens_vanish = all(evaluate(g, point) == 0 for g in eqs.generators)
        images = [_eval_map(f, params, fib) for fib in tup]
        images_equal = all(im == images[0] for im in images[1:])
        if gens_vanish != images_equal:
            report.record(
                f"{chart.name()} {label} point {point}",
                f"generators vanish: {images_equal}",
                f"generators vanish: {gens_vanish}")
        return gens_vanish

    for alpha, eqs in by_alpha.items():
        attempts = 0
        used = 0
        while used < cfg.trials and attempts < cfg.trials * 20:
            attempts += 1
            point = _rand_chart_point(rng, eqs.chart, cfg)
            if run_case(eqs, point, "random") is not None:
                used += 1
        for point in _antipodal_witnesses(f, eqs.chart, rng, cfg,
                                          max(1, cfg.trials // 2)):
            got = run_case(eqs, point, "witness")
            if got is None:
                report.skipped += 1
    for alpha, point in witnesses:
        eqs = by_alpha.get(tuple(alpha))
        if eqs is None:
            report.record(f"witness chart U{tuple(alpha)}", "a chart", "missing")
            continue
        if run_case(eqs, list(point), "witness") is None:
            report.skipped += 1
    return report


# ---- diagonal kernel -------------------------------------------------------


def check_diagonal_kernel(f: PolyMap, cc: CoveringCollection,
                          cfg: SampleConfig) -> VerifyReport:
    """At lambda=0 the first differences are the Jacobian times the direction.

    Symbolic check on every order-2 chart: substituting lambda=0 into level 1
    must equal, componentwise, the derivative of f along the direction
    carried by the chart's a-coordinates.
    """
    report = VerifyReport(suite="diagonal-kernel")
    for alpha in multi_indices(f.fiber_dim, 2, cc.ell):
        chart = f.chart_for(cc, alpha, 2)
        chain = difference_chain(f, chart)
        table = chart.table
        lam = chart.lambda_names[0]
        direction = [divided for divided in _unit_direction(chart)]
        for idx, g in enumerate(chain.levels[0]):
            at_diag = substitute(g, {lam: Poly.zero(table)})
            coord = transplant(f.fiber_coords[idx], table)
            want = Poly.zero(table)
            for vname, d in zip(chart.base_names, direction):
                want = want + differentiate(coord, vname) * d
            report.trials += 1
            if at_diag != want:
                report.record(f"{chart.name()} component {idx + 1}",
                              str(want), str(at_diag))
    return report


def _unit_direction(chart: Chart) -> list[Poly]:
    """The direction nu/lambda: the matrix inverse applied to (1, a_1, ...)."""
    inv = chart.cc.inverse_matrix(chart.alpha[0] - 1)
    one = Poly.constant(chart.table, 1)
    coords = [one] + [Poly.variable(chart.table, nm) for nm in chart.a_names[0]]
    out = []
    for row in inv:
        acc = Poly.zero(chart.table)
        for c, v in zip(row, coords):
            if c != 0:
                acc = acc + v * c
        out.append(acc)
    return out


# ---- chart overlap ---------------------------------------------------------


def chart_coords_from_tuple(chart: Chart, fiber_points: Sequence[Sequence[Fraction]],
                            params: Sequence[Fraction] = ()) -> list | None:
    """Chart coordinates representing a source tuple, or None off the chart.

    Inverts the projection recursion numerically; each level needs the
    chosen form to be nonzero on the current difference vector.
    """
    cc = chart.cc
    r = chart.r

    def encode(level: int, delta: Sequence[Fraction]) -> tuple | None:
        lam = cc.forms[chart.alpha[level - 1] - 1](delta)
        if lam == 0:
            return None
        avals = [cc.forms[j](delta) / lam
                 for j in cc.companions[chart.alpha[level - 1] - 1]]
        return (lam, *avals)

    gammas = []
    prev = [tuple(q - b for q, b in zip(pt, fiber_points[0]))
            for pt in fiber_points[1:]]
    for level in range(1, r):
        encoded = [encode(level, d) for d in prev]
        if any(e is None for e in encoded):
            return None
        gammas.append(encoded[0])
        prev = [tuple(q - b for q, b in zip(later, encoded[0]))
                for later in encoded[1:]]
    point = list(params) + list(fiber_points[0])
    for g in gammas:
        point.extend(g)
    return point


def check_overlap(f: PolyMap, r: int, cc: CoveringCollection,
                  cfg: SampleConfig,
                  witnesses: Sequence[tuple[tuple, Sequence]] = ()) -> VerifyReport:
    """Generator vanishing is independent of the chart representing a tuple."""
    from .ideals import kr_equations

    rng = random.Random(cfg.seed)
    report = VerifyReport(suite="overlap")
    all_eqs = kr_equations(f, r, cc)
    by_alpha = {eqs.chart.alpha: eqs for eqs in all_eqs}

    def transfer(src_eqs, point):
        chart = src_eqs.chart
        for nm in chart.lambda_names:
            if evaluate(Poly.variable(chart.table, nm), point) == 0:
                return
        params = point[:chart.s]
        tup = _projected_tuple(chart, src_eqs.projections, point)
        if len(set(tup)) != len(tup):
            return
        report.trials += 1
        home = all(evaluate(g, point) == 0 for g in src_eqs.generators)
        for eqs in all_eqs:
            other = chart_coords_from_tuple(eqs.chart, tup, params)
            if other is None:
                report.skipped += 1
                continue
            there = all(evaluate(g, other) == 0 for g in eqs.generators)
            if there != home:
                report.record(
                    f"tuple from {chart.name()} seen in {eqs.chart.name()}",
                    f"vanishing {home}", f"vanishing {there}")

    for eqs in all_eqs:
        used = 0
        attempts = 0
        while used < cfg.trials and attempts < cfg.trials * 20:
            attempts += 1
            before = report.trials
            transfer(eqs, _rand_chart_point(rng, eqs.chart, cfg))
            if report.trials > before:
                used += 1
        for point in _antipodal_witnesses(f, eqs.chart, rng, cfg,
                                          max(1, cfg.trials // 2)):
            transfer(eqs, point)
    for alpha, point in witnesses:
        eqs = by_alpha.get(tuple(alpha))
        if eqs is None:
            report.record(f"witness chart U{tuple(alpha)}", "a chart", "missing")
            continue
        transfer(eqs, list(point))
    return report


# ---- corank-one oracle -----------------------------------------------------


def check_corank1(cfg: SampleConfig) -> VerifyReport:
    """Random corank-one normal forms against the classical recursion."""
    from .atlas import standard_collection

    rng = random.Random(cfg.seed)
    report = VerifyReport(suite="corank1")
    for _ in range(cfg.trials):
        n = rng.randint(1, 3)
        extra = rng.randint(1, 2)
        r = rng.randint(2, 4)
        names = [f"x{i}" for i in range(1, n)] + ["y"]
        table = VarTable(names)
        coords = [Poly.variable(table, nm) for nm in names[:-1]]
        for _ in range(extra):
            coords.append(rand_poly(rng, table, cfg.degree_bound, cfg.coeff_bound))
        f = PolyMap(table, coords, s=n - 1)
        cc = standard_collection(1, r)
        chart = f.chart_for(cc, (1,) * (r - 1), r)
        chain = difference_chain(f, chart)
        translated = corank1_translate(chain)
        classical = classical_corank1(f, r)
        report.trials += 1
        for j, (lt, lc) in enumerate(zip(translated, classical), start=1):
            got = [normalize(g) for g in lt]
            want = [normalize(g) for g in lc]
            if got != want:
                report.record(f"map {f!r} level {j}",
                              "; ".join(str(w) for w in want),
                              "; ".join(str(g) for g in got))
    return report


SUITES: dict[str, Callable] = {
    "telescoping": lambda f, r, cc, cfg, **kw: check_telescoping(f, r, cc, cfg, **kw),
    "strict": lambda f, r, cc, cfg, **kw: check_strict_points(f, r, cc, cfg),
    "kernel": lambda f, r, cc, cfg, **kw: check_diagonal_kernel(f, cc, cfg),
    "overlap": lambda f, r, cc, cfg, **kw: check_overlap(f, r, cc, cfg),
    "corank1": lambda f, r, cc, cfg, **kw: check_corank1(cfg),
}
