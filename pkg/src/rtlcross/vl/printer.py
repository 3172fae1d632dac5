"""Pretty-printer for the Verilog AST.

print_module emits canonical source that parses back to an equal tree
(positions excluded from comparison), which is what the round-trip tests
lean on.
"""

from __future__ import annotations

from rtlcross.vl.ast_nodes import (
    AstAlways,
    AstAssign,
    AstModule,
    AstNet,
    AstParam,
    AstPort,
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

_PREC_TERNARY = 0
_PREC_UNARY = 11
_PREC_PRIMARY = 12

_BINARY_PREC: dict[str, int] = {
    "||": 1,
    "&&": 2,
    "|": 3,
    "^": 4,
    "&": 5,
    "==": 6, "!=": 6,
    "<": 7, "<=": 7, ">": 7, ">=": 7,
    "<<": 8, ">>": 8, ">>>": 8,
    "+": 9, "-": 9,
    "*": 10, "/": 10, "%": 10,
}


def print_module(module: AstModule) -> str:
    lines: list[str] = []
    header = f"module {module.name}"
    if module.header_params:
        params = ", ".join(
            f"parameter {p.name} = {print_expr(p.value)}" for p in module.header_params
        )
        header += f" #({params})"
    if module.ports:
        ports = ", ".join(_format_port(p) for p in module.ports)
        header += f" ({ports});"
    else:
        header += " ();"
    lines.append(header)

    for param in module.body_params:
        kw = "localparam" if param.is_localparam else "parameter"
        lines.append(f"    {kw} {param.name} = {print_expr(param.value)};")
    for net in module.nets:
        lines.append(f"    {_format_net(net)};")
    for item in module.items:
        if isinstance(item, AstAssign):
            lines.append(
                f"    assign {print_expr(item.target)} = {print_expr(item.rhs)};"
            )
        else:
            lines.extend(_format_always(item, indent=1))
    lines.append("endmodule")
    return "\n".join(lines) + "\n"


def _format_port(port: AstPort) -> str:
    parts = [port.direction, port.kind]
    if port.signed:
        parts.append("signed")
    if port.msb is not None:
        parts.append(f"[{print_expr(port.msb)}:{print_expr(port.lsb)}]")
    parts.append(port.name)
    return " ".join(parts)


def _format_net(net: AstNet) -> str:
    parts = [net.kind]
    if net.signed:
        parts.append("signed")
    if net.msb is not None:
        parts.append(f"[{print_expr(net.msb)}:{print_expr(net.lsb)}]")
    parts.append(net.name)
    return " ".join(parts)


def _format_always(item: AstAlways, indent: int) -> list[str]:
    pad = "    " * indent
    if item.edges:
        sens = " or ".join(f"{e.kind} {e.signal}" for e in item.edges)
    else:
        sens = "*"
    lines = [f"{pad}always @({sens})"]
    lines.extend(_format_stmt(item.body, indent + 1))
    return lines


def _format_stmt(stmt: Stmt, indent: int) -> list[str]:
    pad = "    " * indent
    if isinstance(stmt, SBlock):
        lines = [f"{pad}begin"]
        for inner in stmt.stmts:
            lines.extend(_format_stmt(inner, indent + 1))
        lines.append(f"{pad}end")
        return lines
    if isinstance(stmt, SAssign):
        op = "=" if stmt.blocking else "<="
        return [f"{pad}{print_expr(stmt.target)} {op} {print_expr(stmt.rhs)};"]
    if isinstance(stmt, SIf):
        lines = [f"{pad}if ({print_expr(stmt.cond)})"]
        lines.extend(_format_stmt(stmt.then, indent + 1))
        if stmt.other is not None:
            lines.append(f"{pad}else")
            lines.extend(_format_stmt(stmt.other, indent + 1))
        return lines
    if isinstance(stmt, SCase):
        lines = [f"{pad}{stmt.kind} ({print_expr(stmt.subject)})"]
        for item in stmt.items:
            if item.labels is None:
                lines.append(f"{pad}    default:")
            else:
                labels = ", ".join(print_expr(lab) for lab in item.labels)
                lines.append(f"{pad}    {labels}:")
            lines.extend(_format_stmt(item.body, indent + 2))
        lines.append(f"{pad}endcase")
        return lines
    raise TypeError(f"unknown statement node {type(stmt).__name__}")


def print_expr(expr: Expr) -> str:
    return _expr(expr)[0]


def _expr(e: Expr) -> tuple[str, int]:
    """Render an expression; returns (text, precedence of the root)."""
    if isinstance(e, ENumber):
        return _format_number(e), _PREC_PRIMARY
    if isinstance(e, EIdent):
        return e.name, _PREC_PRIMARY
    if isinstance(e, EIndex):
        return f"{e.name}[{print_expr(e.index)}]", _PREC_PRIMARY
    if isinstance(e, ERange):
        return f"{e.name}[{print_expr(e.msb)}:{print_expr(e.lsb)}]", _PREC_PRIMARY
    if isinstance(e, EConcat):
        inner = ", ".join(print_expr(p) for p in e.parts)
        return "{" + inner + "}", _PREC_PRIMARY
    if isinstance(e, ERepl):
        inner = ", ".join(print_expr(p) for p in e.parts)
        return "{" + print_expr(e.count) + "{" + inner + "}}", _PREC_PRIMARY
    if isinstance(e, EUnary):
        text, prec = _expr(e.operand)
        # Parenthesize any non-primary operand; adjacent unary operators
        # could otherwise re-lex as a different token (&& from & &).
        if prec < _PREC_PRIMARY:
            text = f"({text})"
        return f"{e.op}{text}", _PREC_UNARY
    if isinstance(e, EBinary):
        prec = _BINARY_PREC[e.op]
        left_text, left_prec = _expr(e.left)
        right_text, right_prec = _expr(e.right)
        if left_prec < prec:
            left_text = f"({left_text})"
        if right_prec <= prec:
            right_text = f"({right_text})"
        return f"{left_text} {e.op} {right_text}", prec
    if isinstance(e, ETernary):
        cond_text, cond_prec = _expr(e.cond)
        if cond_prec <= _PREC_TERNARY:
            cond_text = f"({cond_text})"
        then_text = print_expr(e.then)
        other_text = print_expr(e.other)
        return f"{cond_text} ? {then_text} : {other_text}", _PREC_TERNARY
    raise TypeError(f"unknown expression node {type(e).__name__}")


def _format_number(num: ENumber) -> str:
    if num.xz_mask:
        width = num.width
        if width is None:
            width = max((num.value | num.xz_mask).bit_length(), 1)
        digits = []
        for bit in range(width - 1, -1, -1):
            if (num.xz_mask >> bit) & 1:
                digits.append("?")
            else:
                digits.append(str((num.value >> bit) & 1))
        prefix = f"{num.width}'" if num.width is not None else "'"
        sign = "s" if num.signed else ""
        return f"{prefix}{sign}b{''.join(digits)}"
    if num.width is None:
        if num.signed:
            return str(num.value)
        return f"'d{num.value}"
    sign = "s" if num.signed else ""
    return f"{num.width}'{sign}d{num.value}"
