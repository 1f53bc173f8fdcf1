"""Model checking first-order logic with disjoint-paths predicates on small graphs."""
from .errors import EngineError, FodpError, InputError, ParseError, ResourceError
from .graph import ColoredRootedGraph, format_graph, parse_graph
from .logic import evaluate, parse, prenexify, to_text
from .paths import dp_query
from .decomposition import TreeDecomposition, build_decomposition, parse_td, format_td, validate
from .signature import extended_sig, joint_sig, sig, xpattern, pattern
from .folio import delta_folio, extended_delta_folio
from .engine import EngineConfig, audit, model_check_bruteforce, model_check_dp
from .collapse import CollapseParams, eval_dp_via_collapse, emit_collapse_formula

__version__ = "0.1.0"

__all__ = [
    "ColoredRootedGraph", "CollapseParams", "EngineConfig", "EngineError", "FodpError", "InputError",
    "ParseError", "ResourceError", "TreeDecomposition", "audit", "build_decomposition", "delta_folio",
    "dp_query", "emit_collapse_formula", "eval_dp_via_collapse", "evaluate", "extended_delta_folio",
    "extended_sig", "format_graph", "format_td", "joint_sig", "model_check_bruteforce", "model_check_dp",
    "parse", "parse_graph", "parse_td", "pattern", "prenexify", "sig", "to_text", "validate", "xpattern",
]
