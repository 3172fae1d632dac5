"""Verilog subset frontend: lexing, parsing, printing, subset validation."""

from rtlcross.vl.ast_nodes import AstModule, AstPort
from rtlcross.vl.parser import ParseResult, parse_module
from rtlcross.vl.printer import print_module
from rtlcross.vl.validate import UnsupportedFeature, validate_subset

__all__ = [
    "AstModule",
    "AstPort",
    "ParseResult",
    "parse_module",
    "print_module",
    "UnsupportedFeature",
    "validate_subset",
]
