"""Diagram language: parsing, formatting, validation, and compilation."""

from .ast import (DiagramAST, EdgeDecl, NodeDecl, ParamDecl, PortDecl,
                  QueryDecl, ast_to_json)
from .elaborate import (Elaboration, Expr, ExprIntersection, ExprLeaf,
                        ExprParallel, ExprSeries, ExprTrace, ExprUnion,
                        ExprWire, Registry, desc_to_poset, desc_to_space,
                        describe, elaborate, evaluate, evaluate_family,
                        evaluate_kernel, node_signature, query_functionality,
                        validate, wire_dp)
from .formatter import format_diagram
from .parser import parse_diagram

__all__ = [
    "DiagramAST", "EdgeDecl", "NodeDecl", "ParamDecl", "PortDecl",
    "QueryDecl", "ast_to_json",
    "Elaboration", "Expr", "ExprIntersection", "ExprLeaf", "ExprParallel",
    "ExprSeries", "ExprTrace", "ExprUnion", "ExprWire", "Registry",
    "desc_to_poset", "desc_to_space", "describe", "elaborate", "evaluate",
    "evaluate_family", "evaluate_kernel", "node_signature",
    "query_functionality", "validate", "wire_dp",
    "format_diagram", "parse_diagram",
]
