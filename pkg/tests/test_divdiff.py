"""Tests for difference chains and the corank-one oracle."""

from fractions import Fraction

import pytest

from multipoint.atlas import build_chart, multi_indices, standard_collection
from multipoint.divdiff import (
    DifferenceChain,
    MapFormError,
    PolyMap,
    classical_corank1,
    corank1_translate,
    difference_chain,
    _divide_by_binomial,
)
from multipoint.polyring import (
    Poly,
    PolyError,
    VarTable,
    divide_by_variable,
    normalize,
    parse_poly,
    substitute,
)

TRIFOLD_VARS = ("t", "x", "y")
TRIFOLD_COORDS = ("t", "x^2+t*y", "y^2-t*x", "x^3+y^3+x*y")


def trifold():
    return PolyMap.from_strings(TRIFOLD_VARS, TRIFOLD_COORDS)


def cp(chart, src):
    return parse_poly(src, chart.table)


# ---- PolyMap ---------------------------------------------------------------


def test_polymap_auto_params():
    f = trifold()
    assert f.s == 1 and f.n == 3 and f.p == 4
    assert f.param_names == ("t",)
    assert f.fiber_names == ("x", "y")


def test_polymap_identity_prefix_full_means_no_params():
    f = PolyMap.from_strings(("x", "y"), ("x", "y"))
    assert f.s == 0 and f.fiber_dim == 2


def test_polymap_explicit_params_validated():
    with pytest.raises(MapFormError):
        PolyMap.from_strings(("t", "x"), ("t*t", "x^2"), s=1)
    with pytest.raises(MapFormError):
        PolyMap.from_strings(("x", "y"), ("x", "y"), s=2)


def test_polymap_no_fiber_rejected():
    with pytest.raises(MapFormError):
        PolyMap.from_strings(("x",), ("x",), s=1)


def test_polymap_empty_rejected():
    with pytest.raises(MapFormError):
        PolyMap(VarTable(["x"]), [])


def test_polymap_specialize():
    f = trifold()
    g = f.specialize([Fraction(2)])
    assert g.s == 0
    tb = g.table
    assert tb.names == ("x", "y")
    assert g.coords[0] == parse_poly("x^2+2*y", tb)
    assert g.coords[1] == parse_poly("y^2-2*x", tb)


# ---- difference chains -----------------------------------------------------


def test_trifold_level1_chart1():
    f = trifold()
    cc = standard_collection(2, 2)
    chart = f.chart_for(cc, (1,), 2)
    chain = difference_chain(f, chart)
    want = [
        "a1*t+l1+2*x",
        "a1^2*l1+2*a1*y-t",
        "a1^3*l1^2+3*a1^2*l1*y+a1*l1+a1*x+3*a1*y^2+l1^2+3*l1*x+3*x^2+y",
    ]
    assert list(chain.levels[0]) == [cp(chart, w) for w in want]


def test_trifold_level2_chart11():
    f = trifold()
    cc = standard_collection(2, 3)
    chart = f.chart_for(cc, (1, 1), 3)
    chain = difference_chain(f, chart)
    assert chain.depth == 2
    assert chain.levels[1][0] == cp(chart, "a2*t+1")
    assert chain.levels[1][1] == cp(
        chart, "a1^2+2*a1*a2*l1+2*a1*a2*l2+a2^2*l1*l2+a2^2*l2^2+2*a2*y")


def test_identity_map_level1_is_unit():
    f = PolyMap.from_strings(("x", "y"), ("x", "y"))
    cc = standard_collection(2, 2)
    for alpha in multi_indices(2, 2, 2):
        chart = f.chart_for(cc, alpha, 2)
        chain = difference_chain(f, chart)
        consts = [g for g in chain.levels[0] if g.is_constant() and not g.is_zero()]
        assert consts


def test_chain_level_variable_scope():
    # level j must not involve level j+1 coordinates
    f = trifold()
    cc = standard_collection(2, 3)
    chart = f.chart_for(cc, (2, 1), 3)
    chain = difference_chain(f, chart)
    level1_vars = set(v for g in chain.levels[0] for v in g.variables_used())
    assert "l2" not in level1_vars and "a2" not in level1_vars


def test_telescoping_identity_symbolic():
    f = trifold()
    cc = standard_collection(2, 3)
    for alpha in multi_indices(2, 3, 3):
        chart = f.chart_for(cc, alpha, 3)
        chain = difference_chain(f, chart)
        lam2 = Poly.variable(chart.table, "l2")
        prev_names = ["l1", *chart.a_names[0]]
        shift = {nm: Poly.variable(chart.table, nm) + d
                 for nm, d in zip(prev_names, chart.nu[1])}
        for g_prev, g in zip(chain.levels[0], chain.levels[1]):
            assert lam2 * g == substitute(g_prev, shift) - g_prev


def test_chain_depth_argument():
    f = trifold()
    cc = standard_collection(2, 3)
    chart = f.chart_for(cc, (1, 1), 3)
    chain = difference_chain(f, chart, depth=1)
    assert chain.depth == 1
    with pytest.raises(ValueError):
        difference_chain(f, chart, depth=3)


def test_chain_chart_mismatch():
    f = trifold()
    cc = standard_collection(2, 2)
    wrong = build_chart(cc, (1,), 2, 2)  # default names x,y but no param t
    with pytest.raises(MapFormError):
        difference_chain(f, wrong)


def test_unfolding_parameters_pass_through():
    # slicing at t=t0 commutes with taking differences
    f = trifold()
    t0 = Fraction(3, 2)
    cc = standard_collection(2, 3)
    for alpha in multi_indices(2, 3, 3):
        chart = f.chart_for(cc, alpha, 3)
        chain = difference_chain(f, chart)
        g = f.specialize([t0])
        chart0 = g.chart_for(cc, alpha, 3)
        chain0 = difference_chain(g, chart0)
        for lv, lv0 in zip(chain.levels, chain0.levels):
            for a, b in zip(lv, lv0):
                sliced = transplant_to(a, chart0.table, {"t": t0})
                assert sliced == b


def transplant_to(p, table, mapping):
    from multipoint.polyring import transplant
    return transplant(p, table, mapping)


# ---- binomial division -----------------------------------------------------


def test_divide_by_binomial_power():
    tb = VarTable(["y", "y1"])
    p = parse_poly("y1^3-y^3", tb)
    assert _divide_by_binomial(p, "y1", "y") == parse_poly("y1^2+y1*y+y^2", tb)


def test_divide_by_binomial_remainder_detected():
    tb = VarTable(["y", "y1"])
    with pytest.raises(PolyError):
        _divide_by_binomial(parse_poly("y1^2+1", tb), "y1", "y")


def test_divide_by_binomial_zero():
    tb = VarTable(["y", "y1"])
    assert _divide_by_binomial(Poly.zero(tb), "y1", "y").is_zero()


# ---- classical corank-one oracle -------------------------------------------


def test_classical_fold():
    f = PolyMap.from_strings(("x", "y"), ("x", "y^2"))
    levels = classical_corank1(f, 2)
    tb = levels[0][0].table
    assert levels[0] == [parse_poly("y+y1", tb)]


def test_classical_cusp_two_levels():
    f = PolyMap.from_strings(("x", "y"), ("x", "y^3"))
    levels = classical_corank1(f, 3)
    tb = levels[0][0].table
    assert levels[0] == [parse_poly("y^2+y*y1+y1^2", tb)]
    assert levels[1] == [parse_poly("y+y1+y2", tb)]


def test_classical_constant_component():
    f = PolyMap.from_strings(("x", "y"), ("x", "7"), s=1)
    levels = classical_corank1(f, 3)
    assert all(g.is_zero() for level in levels for g in level)


def test_classical_normal_form_enforced():
    f = PolyMap.from_strings(("x", "y"), ("x^2", "y^2"), s=0)
    with pytest.raises(MapFormError):
        classical_corank1(f, 2)


def test_classical_multiple_components():
    f = PolyMap.from_strings(("x", "y"), ("x", "y^2", "x*y"))
    levels = classical_corank1(f, 2)
    tb = levels[0][0].table
    assert levels[0] == [parse_poly("y+y1", tb), parse_poly("x", tb)]


# ---- corank-one translation ------------------------------------------------


def test_translate_fold():
    f = PolyMap.from_strings(("x", "y"), ("x", "y^2"))
    cc = standard_collection(1, 2)
    chart = f.chart_for(cc, (1,), 2)
    chain = difference_chain(f, chart)
    assert list(chain.levels[0]) == [cp(chart, "2*y+l1")]
    translated = corank1_translate(chain)
    classical = classical_corank1(f, 2)
    assert translated[0] == classical[0]


def test_translate_matches_classical_deeper():
    f = PolyMap.from_strings(("x", "y"), ("x", "y^3+x*y"))
    cc = standard_collection(1, 3)
    chart = f.chart_for(cc, (1, 1), 3)
    chain = difference_chain(f, chart)
    translated = corank1_translate(chain)
    classical = classical_corank1(f, 3)
    for lt, lc in zip(translated, classical):
        assert [normalize(g) for g in lt] == [normalize(g) for g in lc]


def test_translate_requires_fiber_dim_1():
    f = trifold()
    cc = standard_collection(2, 2)
    chart = f.chart_for(cc, (1,), 2)
    chain = difference_chain(f, chart)
    with pytest.raises(MapFormError):
        corank1_translate(chain)


def test_translate_zero_map():
    f = PolyMap.from_strings(("x", "y"), ("x", "0"), s=1)
    cc = standard_collection(1, 3)
    chart = f.chart_for(cc, (1, 1), 3)
    chain = difference_chain(f, chart)
    translated = corank1_translate(chain)
    assert all(g.is_zero() for level in translated for g in level)
