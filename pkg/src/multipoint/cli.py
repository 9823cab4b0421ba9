"""Command line front end.

Subcommands:
  eqs     print the local defining equations, chart by chart
  dim     Groebner dimension of those equations in each chart
  charts  list the chart atlas: forms, companions, substitutions, projections
  check   run the property suites against a map

All output is a pure function of the parsed invocation: identical arguments
produce byte-identical output, so runs can be diffed or cached.  Exit codes:
0 success, 1 verification or computation failure, 2 bad input.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .atlas import (
    CoveringCollection,
    collection_from_file,
    covering_collection,
    multi_indices,
    projection_to_Xr,
)
from .divdiff import MapFormError, PolyMap
from .ideals import chart_equations, dimension, expected_dimension, is_unit_ideal
from .polyring import ParseError, PolyError, VarTable
from .verify import SUITES, SampleConfig

STRATEGIES = ("default", "vandermonde")


class CliError(Exception):
    """Bad input, attributed to the flag that carried it."""


@dataclass(frozen=True)
class RunSpec:
    """Everything that determines one run's output."""

    command: str
    var_names: tuple[str, ...]
    coords: tuple[str, ...]
    params: str
    order: int
    collection: str
    fmt: str
    charts: tuple[tuple[int, ...], ...]
    suites: tuple[str, ...]
    seed: int
    trials: int
    jobs: int
    corrupt: bool = False

    @classmethod
    def from_args(cls, ns: argparse.Namespace) -> "RunSpec":
        try:
            charts = tuple(tuple(int(part) for part in spec.split(","))
                           for spec in (ns.chart or ()))
        except ValueError as exc:
            raise CliError(f"--chart: {exc}") from None
        suites = tuple(getattr(ns, "suite", ()) or ("all",))
        return cls(
            command=ns.command,
            var_names=tuple(nm.strip() for nm in ns.vars.split(",")),
            coords=tuple(src.strip() for src in ns.map.split(";")),
            params=ns.params,
            order=ns.order,
            collection=ns.collection,
            fmt=getattr(ns, "format", "text"),
            charts=charts,
            suites=suites,
            seed=getattr(ns, "seed", 0),
            trials=getattr(ns, "trials", 25),
            jobs=ns.jobs,
            corrupt=getattr(ns, "corrupt", False),
        )


def _styler(stream):
    if os.environ.get("MULTIPOINT_NO_COLOR") or not stream.isatty():
        return lambda text, code: text
    return lambda text, code: f"\x1b[{code}m{text}\x1b[0m"


def _parallel(fn, items, jobs: int) -> list:
    if jobs <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def _build_map(spec: RunSpec) -> PolyMap:
    if spec.order < 2:
        raise CliError(f"-r/--order: must be at least 2, got {spec.order}")
    try:
        table = VarTable(list(spec.var_names))
    except (PolyError, ValueError) as exc:
        raise CliError(f"--vars: {exc}") from None
    if spec.params == "auto":
        s = "auto"
    else:
        try:
            s = int(spec.params)
        except ValueError:
            raise CliError(
                f"--params: expected an integer or auto, got {spec.params!r}"
            ) from None
    try:
        from .polyring import parse_poly
        coords = [parse_poly(src, table, mode="compact") for src in spec.coords]
    except ParseError as exc:
        raise CliError(f"--map: {exc}") from None
    try:
        return PolyMap(table, coords, s=s)
    except (MapFormError, PolyError) as exc:
        raise CliError(f"--params: {exc}") from None


def _build_collection(spec: RunSpec, f: PolyMap) -> CoveringCollection:
    try:
        if spec.collection in STRATEGIES:
            return covering_collection(f.fiber_dim, spec.order, spec.collection)
        cc = collection_from_file(spec.collection)
    except (PolyError, OSError) as exc:
        raise CliError(f"--collection: {exc}") from None
    if cc.n != f.fiber_dim:
        raise CliError(f"--collection: collection is for fiber dimension "
                       f"{cc.n}, map has {f.fiber_dim}")
    if cc.ell < spec.order:
        raise CliError(f"--collection: collection supports order up to "
                       f"{cc.ell}, requested {spec.order}")
    return cc


def _alphas(spec: RunSpec, f: PolyMap, cc: CoveringCollection) -> list:
    known = multi_indices(f.fiber_dim, spec.order, cc.ell)
    if not spec.charts:
        return known
    picked = []
    for alpha in spec.charts:
        if alpha not in known:
            raise CliError(f"--chart: no chart {alpha}; atlas has "
                           f"{', '.join(str(a) for a in known)}")
        picked.append(alpha)
    return picked


def _map_header(f: PolyMap, spec: RunSpec) -> str:
    src = ", ".join(f.table.names)
    dst = "; ".join(str(c) for c in f.coords)
    return (f"map ({src}) -> ({dst})   "
            f"parameters {f.s}, order {spec.order}")


# ---- eqs -------------------------------------------------------------------


def _eqs_payload(f: PolyMap, spec: RunSpec, eqs_list) -> dict:
    charts = []
    for eqs in eqs_list:
        chart = eqs.chart
        charts.append({
            "alpha": list(chart.alpha),
            "vars": list(chart.table.names),
            "generators": [str(g) for g in eqs.generators],
            "projections": [[str(c) for c in proj] for proj in eqs.projections],
            "exceptional": str(chart.exceptional),
        })
    return {
        "schema": "kr-eqs/1",
        "n": f.n,
        "p": f.p,
        "params": f.s,
        "r": spec.order,
        "charts": charts,
    }


def cmd_eqs(spec: RunSpec, out) -> int:
    f = _build_map(spec)
    cc = _build_collection(spec, f)
    eqs_list = _parallel(lambda a: chart_equations(f, spec.order, cc, a),
                         _alphas(spec, f, cc), spec.jobs)
    if spec.fmt == "json":
        json.dump(_eqs_payload(f, spec, eqs_list), out, indent=2)
        out.write("\n")
        return 0
    paint = _styler(out)
    out.write(_map_header(f, spec) + "\n")
    for eqs in eqs_list:
        chart = eqs.chart
        out.write(paint(f"chart {chart.name()}", "1") +
                  f"  [{', '.join(chart.table.names)}]\n")
        out.write(f"  away from {chart.exceptional} = 0\n")
        pos = 0
        for level, raw in enumerate(eqs.levels, start=1):
            out.write(f"  level {level}:\n")
            for g in eqs.generators[pos:pos + len(raw)]:
                out.write(f"    {g} = 0\n")
            pos += len(raw)
        if any(g.is_constant() and not g.is_zero() for g in eqs.generators):
            out.write("  unit ideal: no multiple points meet this chart\n")
    return 0


# ---- dim -------------------------------------------------------------------


def cmd_dim(spec: RunSpec, out) -> int:
    f = _build_map(spec)
    cc = _build_collection(spec, f)
    expected = expected_dimension(f, spec.order)

    def one(alpha):
        eqs = chart_equations(f, spec.order, cc, alpha)
        handle = eqs.handle()
        if is_unit_ideal(handle):
            return (eqs.chart, -1, True)
        return (eqs.chart, dimension(handle), False)

    rows = _parallel(one, _alphas(spec, f, cc), spec.jobs)
    if spec.fmt == "json":
        payload = {
            "schema": "kr-dim/1",
            "n": f.n,
            "p": f.p,
            "params": f.s,
            "r": spec.order,
            "expected": expected,
            "charts": [{"alpha": list(chart.alpha), "dimension": dim,
                        "empty": empty,
                        "correct": None if empty else dim == expected}
                       for chart, dim, empty in rows],
        }
        json.dump(payload, out, indent=2)
        out.write("\n")
        return 0
    paint = _styler(out)
    out.write(_map_header(f, spec) + "\n")
    for chart, dim, empty in rows:
        if empty:
            label = "empty (unit ideal)"
        elif dim == expected:
            label = f"dimension {dim}, expected {expected}, correct"
        else:
            label = f"dimension {dim}, expected {expected}, NOT correct"
        out.write(f"chart {paint(chart.name(), '1')}: {label}\n")
    return 0


# ---- charts ----------------------------------------------------------------


def cmd_charts(spec: RunSpec, out) -> int:
    f = _build_map(spec)
    cc = _build_collection(spec, f)
    names = list(f.fiber_names)

    def describe(alpha):
        chart = f.chart_for(cc, alpha, spec.order)
        levels = []
        for i, a in enumerate(alpha, start=1):
            form = cc.forms[a - 1]
            comps = [cc.forms[j].text(names) for j in cc.companions[a - 1]]
            levels.append({
                "index": a,
                "form": form.text(names),
                "companions": comps,
                "nu": [str(v) for v in chart.nu[i - 1]],
            })
        proj = [[str(c) for c in copy] for copy in projection_to_Xr(chart)]
        return chart, levels, proj

    rows = _parallel(describe, _alphas(spec, f, cc), spec.jobs)
    if spec.fmt == "json":
        payload = {
            "schema": "kr-charts/1",
            "n": f.fiber_dim,
            "r": spec.order,
            "count": len(rows),
            "charts": [{"alpha": list(chart.alpha),
                        "vars": list(chart.table.names),
                        "levels": levels,
                        "projections": proj,
                        "exceptional": str(chart.exceptional)}
                       for chart, levels, proj in rows],
        }
        json.dump(payload, out, indent=2)
        out.write("\n")
        return 0
    paint = _styler(out)
    out.write(f"{len(rows)} charts at order {spec.order} "
              f"over fiber dimension {f.fiber_dim}\n")
    for chart, levels, proj in rows:
        out.write(paint(f"chart {chart.name()}", "1") +
                  f"  [{', '.join(chart.table.names)}]\n")
        out.write(f"  away from {chart.exceptional} = 0\n")
        for i, lv in enumerate(levels, start=1):
            comps = ", ".join(lv["companions"])
            nu = ", ".join(lv["nu"])
            out.write(f"  level {i}: form {lv['form']}, "
                      f"companions ({comps}); nu = ({nu})\n")
        for j, copy in enumerate(proj):
            out.write(f"  x^({j}) = ({', '.join(copy)})\n")
    return 0


# ---- check -----------------------------------------------------------------


def cmd_check(spec: RunSpec, out) -> int:
    f = _build_map(spec)
    cc = _build_collection(spec, f)
    cfg = SampleConfig(seed=spec.seed, trials=spec.trials)
    names = list(SUITES) if "all" in spec.suites else list(spec.suites)
    for nm in names:
        if nm not in SUITES:
            raise CliError(f"--suite: unknown suite {nm!r}; choose from "
                           f"{', '.join(SUITES)} or all")

    def one(nm):
        kwargs = {"_corrupt": True} if (nm == "telescoping" and spec.corrupt) else {}
        return SUITES[nm](f, spec.order, cc, cfg, **kwargs)

    reports = _parallel(one, names, spec.jobs)
    paint = _styler(out)
    ok = True
    for rep in reports:
        line = rep.summary()
        out.write(paint(line, "32" if rep.passed else "31") + "\n")
        ok = ok and rep.passed
        for desc, expected, actual in rep.failures[:10]:
            out.write(f"  {desc}\n    expected {expected}\n    actual   {actual}\n")
    return 0 if ok else 1


# ---- entry -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="multipoint",
        description="Local equations of iterated multiple point spaces.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_format=True):
        p.add_argument("--vars", required=True,
                       help="comma separated source variables, parameters first")
        p.add_argument("--map", required=True,
                       help="semicolon separated coordinate functions")
        p.add_argument("-r", "--order", type=int, default=2,
                       help="multiplicity order r (default 2)")
        p.add_argument("--params", default="auto",
                       help="number of leading parameters, or auto")
        p.add_argument("--collection", default="default",
                       help="default, vandermonde, or a file of forms")
        p.add_argument("--chart", action="append", metavar="A1,A2,...",
                       help="restrict to one chart index (repeatable)")
        p.add_argument("--jobs", type=int, default=1,
                       help="worker threads for per-chart work")
        if with_format:
            p.add_argument("--format", choices=("text", "json"), default="text")

    p_eqs = sub.add_parser("eqs", help="print defining equations per chart")
    common(p_eqs)
    p_dim = sub.add_parser("dim", help="Groebner dimension per chart")
    common(p_dim)
    p_charts = sub.add_parser("charts", help="list the chart atlas")
    common(p_charts)
    p_check = sub.add_parser("check", help="run property suites")
    common(p_check, with_format=False)
    p_check.add_argument("--suite", action="append",
                         choices=(*SUITES, "all"),
                         help="suite to run (repeatable, default all)")
    p_check.add_argument("--seed", type=int, default=0)
    p_check.add_argument("--trials", type=int, default=25)
    p_check.add_argument("--corrupt", action="store_true",
                         help=argparse.SUPPRESS)
    return parser


COMMANDS = {"eqs": cmd_eqs, "dim": cmd_dim, "charts": cmd_charts,
            "check": cmd_check}


def run(spec: RunSpec, out=None) -> int:
    out = out if out is not None else sys.stdout
    return COMMANDS[spec.command](spec, out)


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        spec = RunSpec.from_args(ns)
        return run(spec)
    except (CliError, PolyError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - safety net
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
