"""Subset legality checks that run on a parsed module."""

from __future__ import annotations

from rtlcross.diag import Diagnostic
from rtlcross.vl.ast_nodes import (
    AstAssign,
    AstModule,
    EBinary,
    EConcat,
    EIdent,
    EIndex,
    ENumber,
    ERange,
    ERepl,
    ETernary,
    EUnary,
    Expr,
    SAssign,
    SBlock,
    SCase,
    SIf,
    Stmt,
)


class UnsupportedFeature(Exception):
    """A construct that is valid Verilog but outside the supported subset."""

    def __init__(self, construct: str, line: int, col: int):
        super().__init__(f"unsupported construct: {construct}")
        self.construct = construct
        self.message = f"unsupported construct: {construct}"
        self.line = line
        self.col = col


def validate_subset(module: AstModule, origin: str = "<inline>") -> list[Diagnostic]:
    """Tree-level checks the grammar alone cannot express."""
    diags: list[Diagnostic] = []

    def err(message: str, line: int, col: int) -> None:
        diags.append(
            Diagnostic(
                severity="error", message=message, line=line, column=col, origin=origin
            )
        )

    def walk_expr(e: Expr, dontcare_ok: bool = False) -> None:
        if isinstance(e, ENumber):
            if e.xz_mask and not dontcare_ok:
                err(
                    "don't-care digits are only allowed in casez labels",
                    e.line,
                    e.col,
                )
        elif isinstance(e, EUnary):
            walk_expr(e.operand)
        elif isinstance(e, EBinary):
            walk_expr(e.left)
            walk_expr(e.right)
        elif isinstance(e, ETernary):
            walk_expr(e.cond)
            walk_expr(e.then)
            walk_expr(e.other)
        elif isinstance(e, EIndex):
            walk_expr(e.index)
        elif isinstance(e, ERange):
            walk_expr(e.msb)
            walk_expr(e.lsb)
        elif isinstance(e, (EConcat,)):
            for p in e.parts:
                walk_expr(p)
        elif isinstance(e, ERepl):
            walk_expr(e.count)
            for p in e.parts:
                walk_expr(p)

    def walk_stmt(s: Stmt) -> None:
        if isinstance(s, SBlock):
            for inner in s.stmts:
                walk_stmt(inner)
        elif isinstance(s, SIf):
            walk_expr(s.cond)
            walk_stmt(s.then)
            if s.other is not None:
                walk_stmt(s.other)
        elif isinstance(s, SCase):
            walk_expr(s.subject)
            allow_dc = s.kind == "casez"
            for item in s.items:
                if item.labels is not None:
                    for lab in item.labels:
                        if isinstance(lab, ENumber):
                            walk_expr(lab, dontcare_ok=allow_dc)
                        else:
                            walk_expr(lab)
                walk_stmt(item.body)
        elif isinstance(s, SAssign):
            walk_expr(s.target)
            walk_expr(s.rhs)

    for param in module.header_params + module.body_params:
        walk_expr(param.value)
    for port in module.ports:
        if port.msb is not None:
            walk_expr(port.msb)
            walk_expr(port.lsb)
    for net in module.nets:
        if net.msb is not None:
            walk_expr(net.msb)
            walk_expr(net.lsb)
    for item in module.items:
        if isinstance(item, AstAssign):
            walk_expr(item.target)
            walk_expr(item.rhs)
        else:
            walk_stmt(item.body)

    return diags
