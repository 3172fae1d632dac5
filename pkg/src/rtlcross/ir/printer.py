"""Canonical IR text and design fingerprints.

The canonical form renames ports by position and internal nets by first
use, so two designs that differ only in identifier spelling (or in dead
declarations) produce the same fingerprint. Constants print in decimal;
resets print as a polarity marker on the process header.
"""

from __future__ import annotations

import hashlib

from rtlcross.ir.nodes import (
    AssignIR,
    CaseIR,
    DesignIR,
    IBinary,
    IBit,
    ICond,
    IConcat,
    IConst,
    IExpr,
    IExt,
    IfIR,
    INet,
    ISlice,
    IUnary,
    StmtIR,
    Target,
    TBit,
    TConcat,
    TSlice,
    TWhole,
)


def canonical_text(design: DesignIR) -> str:
    renamer = _Renamer(design)
    lines: list[str] = []

    ports = ", ".join(
        f"{p.direction} {renamer.name(p.name)}:{p.width}{'s' if p.signed else ''}"
        for p in design.ports
    )
    lines.append(f"design ({ports})")

    ordered = [design.procs[i] for i in design.comb_order]
    ordered += [p for p in design.procs if p.kind == "seq"]
    for proc in ordered:
        if proc.kind == "comb":
            lines.append("comb:")
        else:
            header = f"seq clk={renamer.name(proc.clock)}"
            if proc.reset is not None:
                pol = "low" if proc.reset.active_low else "high"
                header += f" reset={renamer.name(proc.reset.name)}/{pol}"
            lines.append(header + ":")
        _stmts(proc.body, renamer, lines, depth=1)
    return "\n".join(lines) + "\n"


def fingerprint(design: DesignIR) -> str:
    return hashlib.sha256(canonical_text(design).encode("utf-8")).hexdigest()


class _Renamer:
    def __init__(self, design: DesignIR):
        self.map: dict[str, str] = {}
        for i, port in enumerate(design.ports):
            self.map[port.name] = f"p{i}"
        self.next_internal = 0

    def name(self, original: str | None) -> str:
        if original is None:
            return "?"
        got = self.map.get(original)
        if got is None:
            got = f"n{self.next_internal}"
            self.next_internal += 1
            self.map[original] = got
        return got


def _stmts(body: list[StmtIR], r: _Renamer, lines: list[str], depth: int) -> None:
    pad = "  " * depth
    for st in body:
        if isinstance(st, AssignIR):
            arrow = "=" if st.blocking else "<="
            lines.append(f"{pad}{_target(st.target, r)} {arrow} {_expr(st.rhs, r)}")
        elif isinstance(st, IfIR):
            lines.append(f"{pad}if {_expr(st.cond, r)}:")
            _stmts(st.then, r, lines, depth + 1)
            if st.other:
                lines.append(f"{pad}else:")
                _stmts(st.other, r, lines, depth + 1)
        elif isinstance(st, CaseIR):
            lines.append(f"{pad}case {_expr(st.subject, r)}:")
            for arm in st.arms:
                if arm.patterns is None:
                    lines.append(f"{pad}  default:")
                else:
                    pats = ",".join(f"{v}/{c}" for v, c in arm.patterns)
                    lines.append(f"{pad}  arm {pats}:")
                _stmts(arm.body, r, lines, depth + 2)
        else:
            raise TypeError(f"unknown statement {type(st).__name__}")


def _target(t: Target, r: _Renamer) -> str:
    if isinstance(t, TWhole):
        return f"{r.name(t.name)}:{t.width}"
    if isinstance(t, TBit):
        return f"bit({r.name(t.name)}, {_expr(t.index, r)}, off{t.offset})"
    if isinstance(t, TSlice):
        return f"slice({r.name(t.name)}, {t.msb}, {t.lsb}, off{t.offset})"
    if isinstance(t, TConcat):
        inner = ", ".join(_target(p, r) for p in t.parts)
        return f"cat({inner})"
    raise TypeError(f"unknown target {type(t).__name__}")


def _expr(e: IExpr, r: _Renamer) -> str:
    if isinstance(e, IConst):
        return f"c{e.value}:{e.width}"
    if isinstance(e, INet):
        return f"{r.name(e.name)}:{e.width}{'s' if e.signed else ''}"
    if isinstance(e, IBit):
        return f"bit({r.name(e.name)}, {_expr(e.index, r)}, off{e.offset})"
    if isinstance(e, ISlice):
        return f"slice({r.name(e.name)}, {e.msb}, {e.lsb}, off{e.offset})"
    if isinstance(e, IExt):
        kind = "sx" if e.sign_extend else "zx"
        return f"{kind}({_expr(e.child, r)}, {e.width})"
    if isinstance(e, IUnary):
        return f"u[{e.op}]({_expr(e.operand, r)}, {e.width})"
    if isinstance(e, IBinary):
        flags = ""
        if e.signed:
            flags += ",s"
        if e.cmp_signed:
            flags += ",cs"
        return f"b[{e.op}]({_expr(e.left, r)}, {_expr(e.right, r)}, {e.width}{flags})"
    if isinstance(e, ICond):
        return (
            f"cond({_expr(e.cond, r)}, {_expr(e.then, r)}, "
            f"{_expr(e.other, r)}, {e.width})"
        )
    if isinstance(e, IConcat):
        inner = ", ".join(_expr(p, r) for p in e.parts)
        return f"cat({inner}):{e.width}"
    raise TypeError(f"unknown expression {type(e).__name__}")
