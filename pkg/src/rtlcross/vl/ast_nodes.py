"""AST for the supported Verilog subset.

Positions (line/col) are carried on every node but excluded from equality
so a parse -> print -> parse round trip compares equal.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union


def _pos():
    return field(default=0, compare=False)


# ---------------------------------------------------------------------------
# Expressions


@dataclass
class ENumber:
    """Numeric literal.

    width is None for unsized literals (32-bit at elaboration).
    xz_mask marks don't-care bit positions spelled ? or z; it is only
    legal inside casez labels and must be zero elsewhere.
    """

    value: int
    width: int | None = None
    signed: bool = False
    xz_mask: int = 0
    line: int = _pos()
    col: int = _pos()


@dataclass
class EIdent:
    name: str
    line: int = _pos()
    col: int = _pos()


@dataclass
class EUnary:
    op: str  # + - ! ~ & | ^ ~& ~| ~^
    operand: "Expr"
    line: int = _pos()
    col: int = _pos()


@dataclass
class EBinary:
    op: str  # + - * / % & | ^ && || == != < <= > >= << >> >>>
    left: "Expr"
    right: "Expr"
    line: int = _pos()
    col: int = _pos()


@dataclass
class ETernary:
    cond: "Expr"
    then: "Expr"
    other: "Expr"
    line: int = _pos()
    col: int = _pos()


@dataclass
class EIndex:
    """Single bit-select on a named net: name[idx]."""

    name: str
    index: "Expr"
    line: int = _pos()
    col: int = _pos()


@dataclass
class ERange:
    """Constant part-select on a named net: name[msb:lsb]."""

    name: str
    msb: "Expr"
    lsb: "Expr"
    line: int = _pos()
    col: int = _pos()


@dataclass
class EConcat:
    parts: list["Expr"]
    line: int = _pos()
    col: int = _pos()


@dataclass
class ERepl:
    count: "Expr"
    parts: list["Expr"]
    line: int = _pos()
    col: int = _pos()


Expr = Union[ENumber, EIdent, EUnary, EBinary, ETernary, EIndex, ERange, EConcat, ERepl]


# ---------------------------------------------------------------------------
# Statements


@dataclass
class SBlock:
    stmts: list["Stmt"]
    line: int = _pos()
    col: int = _pos()


@dataclass
class SIf:
    cond: Expr
    then: "Stmt"
    other: "Stmt | None" = None
    line: int = _pos()
    col: int = _pos()


@dataclass
class CaseItem:
    labels: list[Expr] | None  # None for the default arm
    body: "Stmt"
    line: int = _pos()
    col: int = _pos()


@dataclass
class SCase:
    kind: str  # "case" or "casez"
    subject: Expr
    items: list[CaseItem]
    line: int = _pos()
    col: int = _pos()


@dataclass
class SAssign:
    target: Expr  # EIdent, EIndex, ERange, or EConcat of those
    rhs: Expr
    blocking: bool
    line: int = _pos()
    col: int = _pos()


Stmt = Union[SBlock, SIf, SCase, SAssign]


# ---------------------------------------------------------------------------
# Module items


@dataclass
class AstPort:
    direction: str  # "input" or "output"
    name: str
    kind: str = "wire"  # "wire" or "reg"
    signed: bool = False
    msb: Expr | None = None
    lsb: Expr | None = None
    line: int = _pos()
    col: int = _pos()


@dataclass
class AstNet:
    kind: str  # "wire" or "reg"
    name: str
    signed: bool = False
    msb: Expr | None = None
    lsb: Expr | None = None
    line: int = _pos()
    col: int = _pos()


@dataclass
class AstParam:
    name: str
    value: Expr
    is_localparam: bool = False
    line: int = _pos()
    col: int = _pos()


@dataclass
class AstAssign:
    target: Expr
    rhs: Expr
    line: int = _pos()
    col: int = _pos()


@dataclass
class AstEdge:
    kind: str  # "posedge" or "negedge"
    signal: str
    line: int = _pos()
    col: int = _pos()


@dataclass
class AstAlways:
    edges: list[AstEdge]  # empty for combinational blocks
    body: Stmt
    line: int = _pos()
    col: int = _pos()


Item = Union[AstAssign, AstAlways]


@dataclass
class AstModule:
    name: str
    ports: list[AstPort]
    header_params: list[AstParam] = field(default_factory=list)
    body_params: list[AstParam] = field(default_factory=list)
    nets: list[AstNet] = field(default_factory=list)
    items: list[Item] = field(default_factory=list)
    line: int = _pos()
    col: int = _pos()

    def port(self, name: str) -> AstPort | None:
        for p in self.ports:
            if p.name == name:
                return p
        return None
