"""Per-chart defining equations and Groebner-basis queries.

The basis engine is a plain Buchberger loop over integer-coefficient
polynomials (fractions are cleared up front and content is stripped after
every combination step), with the product and chain pair criteria, followed
by minimalization and tail interreduction.  Dimension is the standard
combinatorial dimension of the leading-term ideal.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .atlas import Chart, CoveringCollection, multi_indices, projection_to_Xr
from .divdiff import DifferenceChain, PolyMap, difference_chain
from .polyring import Poly, VarTable, degrevlex_key, normalize

Mono = tuple

# ---- integer polynomial core ----------------------------------------------


def _to_int_terms(p: Poly) -> dict:
    if p.is_zero():
        return {}
    den = 1
    for c in p.terms.values():
        den = den * c.denominator // math.gcd(den, c.denominator)
    terms = {m: c.numerator * (den // c.denominator) for m, c in p.terms.items()}
    return _strip(terms)


def _strip(terms: dict) -> dict:
    """Divide out integer content and make the leading coefficient positive."""
    if not terms:
        return terms
    g = 0
    for v in terms.values():
        g = math.gcd(g, v)
    if terms[max(terms, key=degrevlex_key)] < 0:
        g = -g
    if g != 1:
        terms = {m: v // g for m, v in terms.items()}
    return terms


def _from_int_terms(table: VarTable, terms: dict) -> Poly:
    return Poly(table, {m: Fraction(v) for m, v in terms.items()})


def _divides(a: Mono, b: Mono) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _mono_lcm(a: Mono, b: Mono) -> Mono:
    return tuple(max(x, y) for x, y in zip(a, b))


def _mono_mul(a: Mono, b: Mono) -> Mono:
    return tuple(x + y for x, y in zip(a, b))


def _mono_sub(a: Mono, b: Mono) -> Mono:
    return tuple(x - y for x, y in zip(a, b))


def _combine(f: dict, a: int, g: dict, b: int, shift: Mono) -> dict:
    """a*f - b*(x^shift * g), in place over a fresh dict."""
    out = {m: a * v for m, v in f.items()} if a != 1 else dict(f)
    for m, v in g.items():
        key = _mono_mul(m, shift)
        w = out.get(key, 0) - b * v
        if w:
            out[key] = w
        else:
            out.pop(key, None)
    return out


def _normal_form(p: dict, basis: Sequence[tuple]) -> dict:
    """Full remainder of p against basis entries (lm, lc, terms).

    Fraction-free: instead of dividing, both the work polynomial and the
    emitted remainder are scaled by the reducer's leading coefficient, and
    joint content is stripped to keep coefficients small.  The remainder is
    therefore a unit multiple of the true normal form, which preserves
    zero-ness and leading monomials.
    """
    work = dict(p)
    out: dict = {}
    while work:
        m = max(work, key=degrevlex_key)
        c = work[m]
        hit = None
        for lm, lc, g in basis:
            if _divides(lm, m):
                hit = (lm, lc, g)
                break
        if hit is None:
            out[m] = c
            del work[m]
            continue
        lm, lc, g = hit
        d = math.gcd(c, lc)
        a, b = lc // d, c // d
        if a != 1:
            for k in out:
                out[k] *= a
            for k in work:
                work[k] *= a
        shift = _mono_sub(m, lm)
        for mg, vg in g.items():
            key = _mono_mul(mg, shift)
            w = work.get(key, 0) - b * vg
            if w:
                work[key] = w
            else:
                work.pop(key, None)
        if abs(a) > 1 and (work or out):
            joint = 0
            for v in itertools.chain(work.values(), out.values()):
                joint = math.gcd(joint, v)
            if joint > 1:
                for k in work:
                    work[k] //= joint
                for k in out:
                    out[k] //= joint
    return _strip(out)


def _spoly(f: tuple, g: tuple) -> dict:
    lmf, lcf, tf = f
    lmg, lcg, tg = g
    l = _mono_lcm(lmf, lmg)
    d = math.gcd(lcf, lcg)
    a, b = lcg // d, lcf // d
    out = {}
    sf = _mono_sub(l, lmf)
    for m, v in tf.items():
        out[_mono_mul(m, sf)] = a * v
    sg = _mono_sub(l, lmg)
    for m, v in tg.items():
        key = _mono_mul(m, sg)
        w = out.get(key, 0) - b * v
        if w:
            out[key] = w
        else:
            out.pop(key, None)
    return out


def _entry(terms: dict) -> tuple:
    lm = max(terms, key=degrevlex_key)
    return (lm, terms[lm], terms)


def _is_unit(terms: dict) -> bool:
    return len(terms) == 1 and sum(next(iter(terms))) == 0


def _buchberger(polys: Iterable[dict]) -> list[dict]:
    basis = []
    for t in polys:
        t = _strip(dict(t))
        if not t:
            continue
        if _is_unit(t):
            width = len(next(iter(t)))
            return [{(0,) * width: 1}]
        basis.append(_entry(t))
    if not basis:
        return []

    pairs = {(i, j) for i in range(len(basis)) for j in range(i + 1, len(basis))}
    done = set()

    def lcm_of(i, j):
        return _mono_lcm(basis[i][0], basis[j][0])

    while pairs:
        i, j = min(pairs, key=lambda ij: (degrevlex_key(lcm_of(*ij)), ij))
        pairs.discard((i, j))
        done.add((i, j))
        l = lcm_of(i, j)
        if l == _mono_mul(basis[i][0], basis[j][0]):
            continue  # coprime leading monomials reduce to zero
        chained = False
        for k in range(len(basis)):
            if k in (i, j) or not _divides(basis[k][0], l):
                continue
            p1 = (min(i, k), max(i, k))
            p2 = (min(j, k), max(j, k))
            if p1 in done and p2 in done:
                chained = True
                break
        if chained:
            continue
        h = _normal_form(_spoly(basis[i], basis[j]), basis)
        if not h:
            continue
        if _is_unit(h):
            width = len(next(iter(h)))
            return [{(0,) * width: 1}]
        basis.append(_entry(h))
        new = len(basis) - 1
        for k in range(new):
            pairs.add((k, new))

    # minimalize: drop entries whose leading monomial another one divides
    keep = []
    lms = [e[0] for e in basis]
    for i, lm in enumerate(lms):
        if any(j != i and _divides(lms[j], lm) and (lms[j] != lm or j < i)
               for j in range(len(lms))):
            continue
        keep.append(basis[i])

    # interreduce: tail-reduce each against the others
    reduced = []
    for i, e in enumerate(keep):
        others = keep[:i] + keep[i + 1:]
        h = _normal_form(e[2], others) if others else _strip(dict(e[2]))
        if h:
            reduced.append(h)
    reduced.sort(key=lambda t: degrevlex_key(max(t, key=degrevlex_key)),
                 reverse=True)
    return reduced


# ---- public ideal interface ------------------------------------------------


class IdealHandle:
    """A generator set with a lazily computed reduced Groebner basis."""

    __slots__ = ("generators", "order", "_basis")

    def __init__(self, generators: Sequence[Poly], order: str = "degrevlex"):
        generators = tuple(generators)
        if not generators:
            raise ValueError("an ideal handle needs at least one generator")
        if order != "degrevlex":
            raise ValueError(f"unsupported term order {order!r}")
        table = generators[0].table
        for g in generators:
            if g.table != table:
                raise ValueError("generators must share one variable table")
        self.generators = generators
        self.order = order
        self._basis = None

    @property
    def table(self) -> VarTable:
        return self.generators[0].table


def groebner(h: IdealHandle) -> list[Poly]:
    """Reduced Groebner basis, cached on the handle; [] for the zero ideal."""
    if h._basis is None:
        raw = _buchberger(_to_int_terms(g) for g in h.generators)
        h._basis = tuple(_from_int_terms(h.table, t) for t in raw)
    return list(h._basis)


def is_unit_ideal(h: IdealHandle) -> bool:
    basis = groebner(h)
    return len(basis) == 1 and basis[0].is_constant() and not basis[0].is_zero()


def contains(h: IdealHandle, p: Poly) -> bool:
    """Ideal membership by reduction to normal form against the basis."""
    if p.table != h.table:
        raise ValueError("polynomial is over a different table than the ideal")
    if p.is_zero():
        return True
    entries = [_entry(_to_int_terms(g)) for g in groebner(h)]
    if not entries:
        return False
    return not _normal_form(_to_int_terms(p), entries)


def dimension(h: IdealHandle) -> int:
    """Krull dimension of the quotient by the ideal; -1 for the unit ideal."""
    basis = groebner(h)
    nvars = len(h.table)
    if not basis:
        return nvars
    if is_unit_ideal(h):
        return -1
    supports = set()
    for g in basis:
        terms = _to_int_terms(g)
        m = max(terms, key=degrevlex_key)
        supports.add(frozenset(i for i, e in enumerate(m) if e))
    # a support containing another is hit whenever the smaller one is
    minimal = [s for s in supports
               if not any(t < s for t in supports)]

    # the largest subset avoiding every support is the complement of a
    # minimum hitting set of the supports
    best = len(minimal)  # one variable per support always hits

    def search(excluded: frozenset, remaining: list):
        nonlocal best
        live = [s for s in remaining if not (s & excluded)]
        if not live:
            best = min(best, len(excluded))
            return
        if len(excluded) + 1 >= best:
            return
        for v in sorted(min(live, key=len)):
            search(excluded | {v}, live)

    search(frozenset(), sorted(minimal, key=len))
    return nvars - best


# ---- chart equations -------------------------------------------------------


@dataclass(frozen=True)
class ChartEquations:
    """Defining equations of the multiple-point space on one chart."""

    chart: Chart
    chain: DifferenceChain = field(repr=False)
    generators: tuple[Poly, ...]
    projections: tuple[tuple[Poly, ...], ...] = field(repr=False)

    @property
    def levels(self) -> tuple[tuple[Poly, ...], ...]:
        return self.chain.levels

    def handle(self) -> IdealHandle:
        if not self.generators:
            raise ValueError(
                "chart has no generators (map with empty fiber target); "
                "the zero ideal defines the whole chart")
        return IdealHandle(self.generators)


def chart_equations(f: PolyMap, r: int, cc: CoveringCollection,
                    alpha: tuple[int, ...]) -> ChartEquations:
    """Equations of the order-r multiple-point space on one chart."""
    if r < 2:
        raise ValueError("order r must be >= 2")
    chart = f.chart_for(cc, alpha, r)
    chain = difference_chain(f, chart)
    gens = tuple(normalize(g) for level in chain.levels for g in level)
    proj = tuple(tuple(v) for v in projection_to_Xr(chart))
    return ChartEquations(chart=chart, chain=chain,
                          generators=gens, projections=proj)


def kr_equations(f: PolyMap, r: int, cc: CoveringCollection) -> list[ChartEquations]:
    """Equations of the order-r multiple-point space, one entry per chart."""
    if r < 2:
        raise ValueError("order r must be >= 2")
    return [chart_equations(f, r, cc, alpha)
            for alpha in multi_indices(f.fiber_dim, r, cc.ell)]


def expected_dimension(f: PolyMap, r: int) -> int:
    """Dimension K_r should have when dimensionally correct: nr - p(r-1)."""
    return f.n * r - f.p * (r - 1)


def diagonal_fiber_dimension(f: PolyMap, r: int, point: Sequence,
                             cc: CoveringCollection) -> int:
    """Dimension of the fiber of the multiple-point space over (point,...,point).

    Pins every source variable to the point and every projected copy to the
    same value; the conditions on the projected copies generate the
    accumulated lambda relations, which on non-initial charts are strictly
    weaker than pinning the plain chart lambdas.
    """
    point = [Fraction(v) if not isinstance(v, Fraction) else v for v in point]
    if len(point) != f.n:
        raise ValueError(f"point has {len(point)} coordinates, source has {f.n}")
    fiber_point = point[f.s:]
    best = None
    for eqs in kr_equations(f, r, cc):
        table = eqs.chart.table
        gens = list(eqs.generators)
        for nm, v in zip(f.table.names, point):
            gens.append(Poly.variable(table, nm) - v)
        for j in range(1, r):
            for comp, v in zip(eqs.projections[j], fiber_point):
                gens.append(comp - v)
        d = dimension(IdealHandle(gens))
        best = d if best is None else max(best, d)
    return best
