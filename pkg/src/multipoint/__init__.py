"""Local equations of iterated multiple-point spaces of polynomial maps."""

from .atlas import (
    Chart,
    CollectionError,
    CoveringCollection,
    LinearForm,
    build_atlas,
    build_chart,
    chart_count,
    collection_from_file,
    collection_from_text,
    covering_collection,
    index_bound,
    multi_indices,
    standard_collection,
    projection_to_Xr,
    vandermonde_collection,
)
from .divdiff import (
    DifferenceChain,
    MapFormError,
    PolyMap,
    classical_corank1,
    corank1_translate,
    difference_chain,
)
from .ideals import (
    ChartEquations,
    IdealHandle,
    chart_equations,
    contains,
    diagonal_fiber_dimension,
    dimension,
    expected_dimension,
    groebner,
    is_unit_ideal,
    kr_equations,
)
from .polyring import (
    Fraction,
    NotDivisibleError,
    ParseError,
    Poly,
    PolyError,
    Rational,
    TableMismatchError,
    UnknownVariableError,
    VarRole,
    VarTable,
    degrevlex_key,
    differentiate,
    divide_by_variable,
    evaluate,
    normalize,
    parse_poly,
    render,
    substitute,
    transplant,
)
from .verify import (
    SampleConfig,
    VerifyReport,
    check_corank1,
    check_diagonal_kernel,
    check_overlap,
    check_strict_points,
    check_telescoping,
)

__all__ = [
    "Chart",
    "ChartEquations",
    "CollectionError",
    "CoveringCollection",
    "DifferenceChain",
    "Fraction",
    "IdealHandle",
    "LinearForm",
    "MapFormError",
    "NotDivisibleError",
    "ParseError",
    "Poly",
    "PolyError",
    "PolyMap",
    "Rational",
    "SampleConfig",
    "TableMismatchError",
    "UnknownVariableError",
    "VarRole",
    "VarTable",
    "VerifyReport",
    "build_atlas",
    "build_chart",
    "chart_count",
    "chart_equations",
    "check_corank1",
    "check_diagonal_kernel",
    "check_overlap",
    "check_strict_points",
    "check_telescoping",
    "classical_corank1",
    "collection_from_file",
    "collection_from_text",
    "contains",
    "corank1_translate",
    "covering_collection",
    "degrevlex_key",
    "diagonal_fiber_dimension",
    "difference_chain",
    "differentiate",
    "dimension",
    "divide_by_variable",
    "evaluate",
    "expected_dimension",
    "groebner",
    "index_bound",
    "is_unit_ideal",
    "kr_equations",
    "multi_indices",
    "normalize",
    "standard_collection",
    "parse_poly",
    "projection_to_Xr",
    "render",
    "substitute",
    "transplant",
    "vandermonde_collection",
]

__version__ = "0.1.0"
