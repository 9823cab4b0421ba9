"""Covering collections, the chart set of the universal space, and projections.

A covering collection is a family of linear forms on the source fiber C^n in
general position, each with n-1 companion forms.  Every multi-index alpha
picks one form per level and determines an affine chart with coordinates
(params | base | lambda/a blocks); the nu maps translate level coordinates
into source-space increments, and the projection recursion recovers the r
source points from chart coordinates.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .polyring import Poly, PolyError, VarRole, VarTable, _as_fraction


class CollectionError(PolyError):
    """Invalid covering collection data."""


@dataclass(frozen=True)
class LinearForm:
    """A linear form sum(c_j * x_j) on the source fiber."""

    coeffs: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs",
                           tuple(_as_fraction(c) for c in self.coeffs))
        if not self.coeffs or all(c == 0 for c in self.coeffs):
            raise CollectionError("linear form must be nonzero")

    def __call__(self, vec: Sequence):
        if len(vec) != len(self.coeffs):
            raise ValueError("vector length does not match form arity")
        total = None
        for c, v in zip(self.coeffs, vec):
            if c == 0:
                continue
            piece = c * v
            total = piece if total is None else total + piece
        if total is None:
            first = vec[0]
            return Fraction(0) if isinstance(first, (int, Fraction)) else first * 0
        return total

    def text(self, names: Sequence[str]) -> str:
        pieces = []
        for c, nm in zip(self.coeffs, names):
            if c == 0:
                continue
            if c == 1:
                body = nm
            elif c == -1:
                body = f"-{nm}"
            elif c.denominator == 1:
                body = f"{c.numerator}*{nm}"
            else:
                body = f"({c.numerator}/{c.denominator})*{nm}"
            pieces.append(body)
        out = pieces[0]
        for piece in pieces[1:]:
            out += piece if piece.startswith("-") else "+" + piece
        return out


def _det(rows: list[list[Fraction]]) -> Fraction:
    """Exact determinant by fraction-free-ish Gaussian elimination."""
    n = len(rows)
    m = [[_as_fraction(v) for v in row] for row in rows]
    det = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if m[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            m[col], m[pivot] = m[pivot], m[col]
            det = -det
        det *= m[col][col]
        inv = 1 / m[col][col]
        for r in range(col + 1, n):
            if m[r][col] != 0:
                factor = m[r][col] * inv
                m[r] = [a - factor * b for a, b in zip(m[r], m[col])]
    return det


def _invert(rows: list[list[Fraction]]) -> list[list[Fraction]]:
    """Exact inverse of a square matrix over Q; raises on singular input."""
    n = len(rows)
    m = [[_as_fraction(v) for v in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(rows)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if m[r][col] != 0), None)
        if pivot is None:
            raise CollectionError("singular matrix in chart construction")
        m[col], m[pivot] = m[pivot], m[col]
        inv = 1 / m[col][col]
        m[col] = [v * inv for v in m[col]]
        for r in range(n):
            if r != col and m[r][col] != 0:
                factor = m[r][col]
                m[r] = [a - factor * b for a, b in zip(m[r], m[col])]
    return [row[n:] for row in m]


def expected_form_count(n: int, ell: int) -> int:
    return (ell - 1) * (n - 1) + 1


class CoveringCollection:
    """Linear forms in general position with per-form companion choices.

    ``companions[i]`` lists, 0-based, the indices of the n-1 forms paired
    with form i; the stacked matrix [L_i; companions] must be invertible.
    """

    def __init__(self, n: int, ell: int,
                 forms: Sequence[LinearForm],
                 companions: Sequence[Sequence[int]]):
        if n < 1:
            raise CollectionError("source fiber dimension must be >= 1")
        if ell < 2:
            raise CollectionError("ell must be >= 2")
        forms = tuple(forms)
        companions = tuple(tuple(c) for c in companions)
        m = expected_form_count(n, ell)
        if len(forms) != m:
            raise CollectionError(
                f"need {m} forms for n={n}, ell={ell}, got {len(forms)}")
        for i, f in enumerate(forms):
            if len(f.coeffs) != n:
                raise CollectionError(f"form {i + 1} has arity {len(f.coeffs)}, expected {n}")
        if len(companions) != len(forms):
            raise CollectionError("one companion list per form is required")
        for i, comp in enumerate(companions):
            if len(comp) != n - 1:
                raise CollectionError(
                    f"form {i + 1} needs {n - 1} companions, got {len(comp)}")
            for j in comp:
                if not 0 <= j < len(forms):
                    raise CollectionError(
                        f"companion index {j + 1} of form {i + 1} is out of range")
                if j == i:
                    raise CollectionError(f"form {i + 1} lists itself as companion")
            if len(set(comp)) != len(comp):
                raise CollectionError(f"form {i + 1} repeats a companion")
        self.n = n
        self.ell = ell
        self.forms = forms
        self.companions = companions
        self._check_general_position()

    def _check_general_position(self):
        k = min(self.n, len(self.forms))
        for subset in itertools.combinations(range(len(self.forms)), k):
            rows = [list(self.forms[i].coeffs) for i in subset]
            # non-square only when m < n is impossible here; k = min guards it
            if k < self.n:
                # single form: nonzero is enough, guaranteed by LinearForm
                continue
            if _det(rows) == 0:
                labels = ", ".join(str(i + 1) for i in subset)
                raise CollectionError(f"forms {labels} are linearly dependent")
        for i in range(len(self.forms)):
            if _det(self.matrix(i)) == 0:
                raise CollectionError(
                    f"form {i + 1} with its companions gives a singular matrix")

    def matrix(self, i: int) -> list[list[Fraction]]:
        """Rows [L_i; companion forms], the change of coordinates for form i."""
        rows = [list(self.forms[i].coeffs)]
        for j in self.companions[i]:
            rows.append(list(self.forms[j].coeffs))
        return rows

    def inverse_matrix(self, i: int) -> list[list[Fraction]]:
        return _invert(self.matrix(i))

    def __repr__(self):
        return f"CoveringCollection(n={self.n}, ell={self.ell}, m={len(self.forms)})"


def standard_collection(n: int, ell: int) -> CoveringCollection:
    """The concrete small collections used throughout the worked examples."""
    if n == 1:
        return CoveringCollection(1, ell, [LinearForm((1,))], [()])
    if n == 2 and ell == 2:
        forms = [LinearForm((1, 0)), LinearForm((0, 1))]
        return CoveringCollection(2, 2, forms, [(1,), (0,)])
    if n == 2 and ell == 3:
        forms = [LinearForm((1, 0)), LinearForm((0, 1)), LinearForm((1, 1))]
        return CoveringCollection(2, 3, forms, [(1,), (0,), (0,)])
    raise CollectionError(
        f"standard collection is only defined for n=1 or n=2 with ell<=3, "
        f"got n={n}, ell={ell}")


def vandermonde_collection(n: int, ell: int) -> CoveringCollection:
    """Forms L_i = sum_j i^(j-1) x_j; distinct nodes make every n-subset independent."""
    m = expected_form_count(n, ell)
    forms = [LinearForm(tuple(Fraction(i ** j) for j in range(n)))
             for i in range(1, m + 1)]
    companions = [tuple((i + k) % m for k in range(1, n)) for i in range(m)]
    return CoveringCollection(n, ell, forms, companions)


def covering_collection(n: int, ell: int, strategy: str = "default") -> CoveringCollection:
    """Build a collection; 'default' prefers the worked-example forms when defined."""
    if strategy == "standard":
        return standard_collection(n, ell)
    if strategy == "vandermonde":
        return vandermonde_collection(n, ell)
    if strategy == "default":
        try:
            return standard_collection(n, ell)
        except CollectionError:
            return vandermonde_collection(n, ell)
    raise CollectionError(f"unknown collection strategy {strategy!r}")


def collection_from_text(text: str, source: str = "<collection>") -> CoveringCollection:
    """Parse a collection file: a form line, then its companion line, repeated.

    Form lines are comma-separated rational coefficients; companion lines are
    comma-separated 1-based form indices.  '#' starts a comment; blank lines
    are skipped before a form but count as an empty companion list (the n=1
    case) after one.
    """
    forms: list[LinearForm] = []
    companions: list[tuple[int, ...]] = []
    n = None
    expect_form = True
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if expect_form:
            if not line:
                continue
            parts = [p.strip() for p in line.split(",")]
            try:
                coeffs = tuple(Fraction(p) for p in parts)
            except (ValueError, ZeroDivisionError):
                raise CollectionError(
                    f"{source}:{lineno}: cannot read coefficients from {line!r}")
            if n is None:
                n = len(coeffs)
            elif len(coeffs) != n:
                raise CollectionError(
                    f"{source}:{lineno}: expected {n} coefficients, got {len(coeffs)}")
            try:
                forms.append(LinearForm(coeffs))
            except CollectionError as exc:
                raise CollectionError(f"{source}:{lineno}: {exc}") from None
            expect_form = False
        else:
            parts = [p.strip() for p in line.split(",") if p.strip()]
            try:
                idx = tuple(int(p) - 1 for p in parts)
            except ValueError:
                raise CollectionError(
                    f"{source}:{lineno}: cannot read companion indices from {line!r}")
            if len(idx) != n - 1:
                raise CollectionError(
                    f"{source}:{lineno}: expected {n - 1} companion indices, got {len(idx)}")
            companions.append(idx)
            expect_form = True
    if n is None:
        raise CollectionError(f"{source}: no forms found")
    if not expect_form:
        if n == 1:
            companions.append(())
        else:
            raise CollectionError(
                f"{source}: form {len(forms)} is missing its companion line")
    m = len(forms)
    if n == 1:
        ell = 2
        if m != 1:
            raise CollectionError(
                f"{source}: n=1 collections consist of a single form, got {m}")
    else:
        if (m - 1) % (n - 1) != 0:
            raise CollectionError(
                f"{source}: {m} forms do not fit (ell-1)*({n}-1)+1 for any ell")
        ell = (m - 1) // (n - 1) + 1
        if ell < 2:
            raise CollectionError(f"{source}: too few forms (ell would be {ell})")
    try:
        return CoveringCollection(n, ell, forms, companions)
    except CollectionError as exc:
        raise CollectionError(f"{source}: {exc}") from None


def collection_from_file(path: str) -> CoveringCollection:
    with open(path, "r", encoding="utf-8") as fh:
        return collection_from_text(fh.read(), source=path)


# ---- multi-indices ---------------------------------------------------------


def index_bound(n: int, ell: int, i: int) -> int:
    """Upper bound of the i-th entry (1-based level) of a multi-index."""
    return (ell - i) * (n - 1) + 1


def multi_indices(n: int, r: int, ell: int | None = None) -> list[tuple[int, ...]]:
    """All multi-indices for order r, in lexicographic order."""
    if r < 2:
        raise ValueError("order r must be >= 2")
    if ell is None:
        ell = r
    if ell < r:
        raise ValueError(f"ell={ell} must be >= r={r}")
    ranges = [range(1, index_bound(n, ell, i) + 1) for i in range(1, r)]
    return [tuple(t) for t in itertools.product(*ranges)]


def chart_count(n: int, r: int, ell: int | None = None) -> int:
    if ell is None:
        ell = r
    count = 1
    for i in range(1, r):
        count *= index_bound(n, ell, i)
    return count


# ---- charts ----------------------------------------------------------------


def _default_base_names(n: int) -> tuple[str, ...]:
    if n <= 3:
        return ("x", "y", "z")[:n]
    return tuple(f"x{i}" for i in range(1, n + 1))


def _default_param_names(s: int) -> tuple[str, ...]:
    if s == 0:
        return ()
    if s == 1:
        return ("t",)
    return tuple(f"t{i}" for i in range(1, s + 1))


@dataclass(frozen=True)
class Chart:
    """One affine chart: its multi-index, coordinate table and nu data."""

    alpha: tuple[int, ...]
    cc: CoveringCollection
    r: int
    table: VarTable
    param_names: tuple[str, ...]
    base_names: tuple[str, ...]
    lambda_names: tuple[str, ...]
    a_names: tuple[tuple[str, ...], ...]
    nu: tuple[tuple[Poly, ...], ...] = field(repr=False)

    @property
    def n(self) -> int:
        return len(self.base_names)

    @property
    def s(self) -> int:
        return len(self.param_names)

    @property
    def exceptional(self) -> Poly:
        """The exceptional divisor of the last blowup: the top-level lambda."""
        return Poly.variable(self.table, self.lambda_names[-1])

    def name(self) -> str:
        return "U(" + ",".join(str(a) for a in self.alpha) + ")"

    def level_tuple(self, i: int) -> list[Poly]:
        """Level-i coordinates (lambda, a_1, ..., a_{n-1}) as polynomials."""
        out = [Poly.variable(self.table, self.lambda_names[i - 1])]
        for nm in self.a_names[i - 1]:
            out.append(Poly.variable(self.table, nm))
        return out

    def nu_apply(self, level: int, gamma: Sequence[Poly]) -> list[Poly]:
        """nu of level against an arbitrary coordinate vector.

        The vector (v_0, ..., v_{n-1}) is read as level coordinates, so the
        image is the matrix inverse applied to (v_0, v_0*v_1, ..., v_0*v_{n-1}).
        """
        inv = self.cc.inverse_matrix(self.alpha[level - 1] - 1)
        v0 = gamma[0]
        unprojectivized = [v0] + [v0 * v for v in gamma[1:]]
        out = []
        for row in inv:
            acc = Poly.zero(self.table)
            for c, v in zip(row, unprojectivized):
                if c != 0:
                    acc = acc + v * c
            out.append(acc)
        return out


def build_chart(cc: CoveringCollection, alpha: Sequence[int], n: int, r: int,
                params: int = 0,
                param_names: Sequence[str] | None = None,
                base_names: Sequence[str] | None = None) -> Chart:
    """Assemble the chart for one multi-index.

    ``n`` is the source fiber dimension and must match the collection;
    ``params`` counts unfolding parameters placed before the base block.
    """
    alpha = tuple(alpha)
    if n != cc.n:
        raise CollectionError(f"chart fiber dimension {n} != collection n={cc.n}")
    if len(alpha) != r - 1:
        raise CollectionError(
            f"multi-index {alpha} has length {len(alpha)}, expected r-1={r - 1}")
    for i, ai in enumerate(alpha, start=1):
        bound = index_bound(n, cc.ell, i)
        if not 1 <= ai <= min(bound, len(cc.forms)):
            raise CollectionError(
                f"multi-index entry {ai} at level {i} is out of range 1..{bound}")
    if param_names is None:
        param_names = _default_param_names(params)
    param_names = tuple(param_names)
    if len(param_names) != params:
        raise CollectionError(
            f"{params} parameters but {len(param_names)} parameter names")
    if base_names is None:
        base_names = _default_base_names(n)
    base_names = tuple(base_names)
    if len(base_names) != n:
        raise CollectionError(f"{n} base variables but {len(base_names)} names")

    lambda_names = tuple(f"l{i}" for i in range(1, r))
    a_names = []
    for i in range(1, r):
        if n == 1:
            a_names.append(())
        elif n == 2:
            a_names.append((f"a{i}",))
        else:
            a_names.append(tuple(f"a{i}_{k}" for k in range(1, n)))
    a_names = tuple(a_names)

    names = list(param_names) + list(base_names)
    roles = [VarRole(VarRole.PARAM)] * params + [VarRole(VarRole.BASE)] * n
    for i in range(1, r):
        names.append(lambda_names[i - 1])
        roles.append(VarRole(VarRole.LAMBDA, level=i))
        for k, nm in enumerate(a_names[i - 1], start=1):
            names.append(nm)
            roles.append(VarRole(VarRole.A, level=i, slot=k))
    if len(set(names)) != len(names):
        seen = set()
        dup = next(nm for nm in names if nm in seen or seen.add(nm))
        raise CollectionError(
            f"variable name {dup!r} collides with generated chart coordinates")
    table = VarTable(names, roles)

    nu_levels = []
    for i in range(1, r):
        inv = cc.inverse_matrix(alpha[i - 1] - 1)
        lam = Poly.variable(table, lambda_names[i - 1])
        avars = [Poly.variable(table, nm) for nm in a_names[i - 1]]
        unprojectivized = [lam] + [lam * a for a in avars]
        level = []
        for row in inv:
            acc = Poly.zero(table)
            for c, v in zip(row, unprojectivized):
                if c != 0:
                    acc = acc + v * c
            level.append(acc)
        nu_levels.append(tuple(level))

    return Chart(alpha=alpha, cc=cc, r=r, table=table,
                 param_names=param_names, base_names=base_names,
                 lambda_names=lambda_names, a_names=a_names,
                 nu=tuple(nu_levels))


def build_atlas(cc: CoveringCollection, n: int, r: int, params: int = 0,
                param_names: Sequence[str] | None = None,
                base_names: Sequence[str] | None = None) -> list[Chart]:
    """All charts for order r, in lexicographic multi-index order."""
    return [build_chart(cc, alpha, n, r, params, param_names, base_names)
            for alpha in multi_indices(n, r, cc.ell)]


def projection_to_Xr(chart: Chart) -> list[list[Poly]]:
    """Source points x^(0..r-1) as polynomials in the chart coordinates.

    x^(0) is the base point itself; x^(j) accumulates the level increments
    by the descending recursion through intermediate gamma vectors.
    """
    base = [Poly.variable(chart.table, nm) for nm in chart.base_names]
    out = [list(base)]
    for j in range(1, chart.r):
        gamma = chart.level_tuple(j)
        for i in range(j - 1, 0, -1):
            shifted = chart.nu_apply(i + 1, gamma)
            own = chart.level_tuple(i)
            gamma = [g + d for g, d in zip(own, shifted)]
        nu1 = chart.nu_apply(1, gamma)
        out.append([b + d for b, d in zip(base, nu1)])
    return out
