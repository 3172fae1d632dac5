"""Deterministic Python reference-model emission.

emit_reference turns a lowered design into standalone Python source
defining class TopModule with an eval(inputs) entry point: combinational
designs compute outputs directly, sequential designs follow the
compute-next-state-then-commit pattern with all state zero-initialized
in the constructor. emit_skeleton produces the matching fill-in shell
with the logic left out. Both are pure functions of the design: same IR
in, same bytes out.

All emitted arithmetic is unsigned with explicit two's-complement
wraparound masks; signed operations are expressed through sign-bit
tests and negate-under-mask, never native signed integers.
"""

from __future__ import annotations

import keyword
from dataclasses import dataclass, field

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
    mask,
)

_HELPERS = {
    "_ext": (
        "def _ext(v, w, fill):\n"
        "    return v | fill if v >> (w - 1) & 1 else v\n"
    ),
    "_bit": (
        "def _bit(v, i, msb, lsb):\n"
        "    if lsb <= i <= msb:\n"
        "        return (v >> (i - lsb)) & 1\n"
        "    return 0\n"
    ),
    "_sdiv": (
        "def _sdiv(a, b, w):\n"
        "    if b == 0:\n"
        "        return 0\n"
        "    m = (1 << w) - 1\n"
        "    s = 1 << (w - 1)\n"
        "    am = (m + 1 - a) & m if a & s else a\n"
        "    bm = (m + 1 - b) & m if b & s else b\n"
        "    q = am // bm\n"
        "    if (a ^ b) & s:\n"
        "        q = (m + 1 - q) & m\n"
        "    return q\n"
    ),
    "_smod": (
        "def _smod(a, b, w):\n"
        "    if b == 0:\n"
        "        return 0\n"
        "    m = (1 << w) - 1\n"
        "    s = 1 << (w - 1)\n"
        "    am = (m + 1 - a) & m if a & s else a\n"
        "    bm = (m + 1 - b) & m if b & s else b\n"
        "    r = am % bm\n"
        "    if a & s:\n"
        "        r = (m + 1 - r) & m\n"
        "    return r\n"
    ),
    "_asr": (
        "def _asr(v, w, n):\n"
        "    if n >= w:\n"
        "        n = w\n"
        "    m = (1 << w) - 1\n"
        "    out = v >> n\n"
        "    if v >> (w - 1) & 1:\n"
        "        out |= m ^ (m >> n)\n"
        "    return out\n"
    ),
}

_HELPER_ORDER = ["_ext", "_bit", "_sdiv", "_smod", "_asr"]


@dataclass(frozen=True)
class RefSource:
    """Emitted reference model plus the interface it must honor."""

    text: str
    class_name: str = "TopModule"
    # (name, direction, width) for every port, declaration order.
    port_manifest: tuple[tuple[str, str, int], ...] = field(default_factory=tuple)


def _hexmask(width: int) -> str:
    return f"0x{mask(width):X}"


class _Emitter:
    def __init__(self, design: DesignIR):
        self.design = design
        self.helpers: set[str] = set()
        self.idents = self._sanitize_names()
        self.temp_prefix = self._pick_temp_prefix()
        self.temp_count = 0

    def _sanitize_names(self) -> dict[str, str]:
        taken: set[str] = {"inputs", "self"} | set(_HELPERS)
        out: dict[str, str] = {}
        for name in self.design.nets:
            candidate = name
            while keyword.iskeyword(candidate) or candidate in taken:
                candidate += "_v"
            taken.add(candidate)
            out[name] = candidate
        return out

    def _pick_temp_prefix(self) -> str:
        prefix = "_"
        values = set(self.idents.values())
        while any(
            v.startswith(prefix + "t")
            or v.startswith(prefix + "nx")
            or v.startswith(prefix + "bl")
            for v in values
        ):
            prefix += "_"
        return prefix

    def new_temp(self) -> str:
        name = f"{self.temp_prefix}t{self.temp_count}"
        self.temp_count += 1
        return name

    def need(self, helper: str) -> str:
        self.helpers.add(helper)
        return helper

    # -- expressions ------------------------------------------------------

    def expr(self, e: IExpr, read) -> str:
        if isinstance(e, IConst):
            return str(e.value)
        if isinstance(e, INet):
            return read(e.name)
        if isinstance(e, IBit):
            net = self.design.nets[e.name]
            idx = e.index
            if isinstance(idx, IConst):
                shift = idx.value - e.offset
                if shift == 0:
                    return f"({read(e.name)} & 1)"
                return f"(({read(e.name)} >> {shift}) & 1)"
            fn = self.need("_bit")
            return (
                f"{fn}({read(e.name)}, {self.expr(idx, read)}, "
                f"{net.msb}, {net.lsb})"
            )
        if isinstance(e, ISlice):
            shift = e.lsb - e.offset
            m = _hexmask(e.width)
            if shift == 0:
                return f"({read(e.name)} & {m})"
            return f"(({read(e.name)} >> {shift}) & {m})"
        if isinstance(e, IExt):
            inner = self.expr(e.child, read)
            if not e.sign_extend:
                return inner
            fn = self.need("_ext")
            fill = mask(e.width) ^ mask(e.child.width)
            return f"{fn}({inner}, {e.child.width}, 0x{fill:X})"
        if isinstance(e, IUnary):
            return self._unary(e, read)
        if isinstance(e, IBinary):
            return self._binary(e, read)
        if isinstance(e, ICond):
            cond = self.expr(e.cond, read)
            then = self.expr(e.then, read)
            other = self.expr(e.other, read)
            return f"({then} if {cond} else {other})"
        if isinstance(e, IConcat):
            pieces = []
            shift = e.width
            for part in e.parts:
                shift -= part.width
                text = self.expr(part, read)
                if shift:
                    pieces.append(f"({text} << {shift})")
                else:
                    pieces.append(text)
            if len(pieces) == 1:
                return pieces[0]
            return "(" + " | ".join(pieces) + ")"
        raise TypeError(f"unknown expression {type(e).__name__}")

    def _unary(self, e: IUnary, read) -> str:
        inner = self.expr(e.operand, read)
        if e.op == "~":
            return f"(~{inner} & {_hexmask(e.width)})"
        if e.op == "-":
            return f"(-{inner} & {_hexmask(e.width)})"
        if e.op == "+":
            return inner
        w = e.operand.width
        if e.op == "!":
            return f"(0 if {inner} else 1)"
        if e.op == "&":
            return f"(1 if {inner} == {_hexmask(w)} else 0)"
        if e.op == "~&":
            return f"(0 if {inner} == {_hexmask(w)} else 1)"
        if e.op == "|":
            return f"(1 if {inner} else 0)"
        if e.op == "~|":
            return f"(0 if {inner} else 1)"
        if e.op == "^":
            return f'(bin({inner}).count("1") & 1)'
        if e.op == "~^":
            return f'(1 - (bin({inner}).count("1") & 1))'
        raise TypeError(f"unknown unary operator '{e.op}'")

    def _binary(self, e: IBinary, read) -> str:
        op = e.op
        left = self.expr(e.left, read)
        right = self.expr(e.right, read)
        m = _hexmask(e.width)
        if op == "+":
            return f"(({left} + {right}) & {m})"
        if op == "-":
            return f"(({left} - {right}) & {m})"
        if op == "*":
            return f"(({left} * {right}) & {m})"
        if op == "/":
            if e.signed:
                fn = self.need("_sdiv")
                return f"{fn}({left}, {right}, {e.width})"
            return f"({left} // {right} if {right} else 0)"
        if op == "%":
            if e.signed:
                fn = self.need("_smod")
                return f"{fn}({left}, {right}, {e.width})"
            return f"({left} % {right} if {right} else 0)"
        if op == "&":
            return f"({left} & {right})"
        if op == "|":
            return f"({left} | {right})"
        if op == "^":
            return f"({left} ^ {right})"
        if op == "<<":
            return f"(({left} << {right}) & {m} if {right} < {e.width} else 0)"
        if op == ">>":
            return f"({left} >> {right})"
        if op == ">>>":
            if e.signed:
                fn = self.need("_asr")
                return f"{fn}({left}, {e.width}, {right})"
            return f"({left} >> {right})"
        if op == "&&":
            return f"(1 if {left} and {right} else 0)"
        if op == "||":
            return f"(1 if {left} or {right} else 0)"
        if op in ("==", "!="):
            return f"(1 if {left} {op} {right} else 0)"
        if op in ("<", "<=", ">", ">="):
            if e.cmp_signed:
                flip = f"0x{1 << (e.left.width - 1):X}"
                left = f"({left} ^ {flip})"
                right = f"({right} ^ {flip})"
            return f"(1 if {left} {op} {right} else 0)"
        raise TypeError(f"unknown binary operator '{op}'")

    # -- statements -------------------------------------------------------

    def stmts(self, body: list[StmtIR], read, write, indent: str) -> list[str]:
        lines: list[str] = []
        for st in body:
            lines.extend(self.stmt(st, read, write, indent))
        return lines

    def stmt(self, st: StmtIR, read, write, indent: str) -> list[str]:
        if isinstance(st, AssignIR):
            return self.assign(st, read, write, indent)
        if isinstance(st, IfIR):
            if not st.then and not st.other:
                return []
            cond = self.expr(st.cond, read)
            lines: list[str] = []
            if st.then:
                lines.append(f"{indent}if {cond}:")
                lines.extend(self.stmts(st.then, read, write, indent + "    "))
                if st.other:
                    lines.append(f"{indent}else:")
                    lines.extend(self.stmts(st.other, read, write, indent + "    "))
            else:
                lines.append(f"{indent}if not {cond}:")
                lines.extend(self.stmts(st.other, read, write, indent + "    "))
            return lines
        if isinstance(st, CaseIR):
            return self.case(st, read, write, indent)
        raise TypeError(f"unknown statement {type(st).__name__}")

    def case(self, st: CaseIR, read, write, indent: str) -> list[str]:
        subject = self.new_temp()
        lines = [f"{indent}{subject} = {self.expr(st.subject, read)}"]
        width = st.subject.width
        default_body: list[StmtIR] | None = None
        first = True
        for arm in st.arms:
            if arm.patterns is None:
                if default_body is None:
                    default_body = arm.body
                continue
            tests = []
            for value, care in arm.patterns:
                if care == mask(width):
                    tests.append(f"{subject} == {value}")
                else:
                    tests.append(f"({subject} & 0x{care:X}) == {value}")
            cond = " or ".join(tests)
            kw = "if" if first else "elif"
            lines.append(f"{indent}{kw} {cond}:")
            body = self.stmts(arm.body, read, write, indent + "    ")
            lines.extend(body if body else [f"{indent}    pass"])
            first = False
        if default_body is not None:
            if first:
                # Only a default arm: it always runs.
                return lines + self.stmts(default_body, read, write, indent)
            lines.append(f"{indent}else:")
            body = self.stmts(default_body, read, write, indent + "    ")
            lines.extend(body if body else [f"{indent}    pass"])
        return lines

    def assign(self, st: AssignIR, read, write, indent: str) -> list[str]:
        rhs = self.expr(st.rhs, read)
        # Every emitted expression stays within mask(width), so the write
        # needs no extra mask when the widths already agree.
        if isinstance(st.target, TWhole) and st.rhs.width == st.target.width:
            dest = write(st.target.name)
            return [f"{indent}{dest} = {rhs}"]
        return self.write_target(st.target, rhs, read, write, indent)

    def write_target(
        self, target: Target, rhs: str, read, write, indent: str
    ) -> list[str]:
        if isinstance(target, TWhole):
            dest = write(target.name)
            return [f"{indent}{dest} = {rhs} & {_hexmask(target.width)}"]
        if isinstance(target, TBit):
            dest = write(target.name)
            cur = read(target.name)
            net = self.design.nets[target.name]
            idx = target.index
            if isinstance(idx, IConst):
                shift = idx.value - target.offset
                return [
                    f"{indent}{dest} = ({cur} & ~(1 << {shift})) | "
                    f"(({rhs} & 1) << {shift})"
                ]
            tmp = self.new_temp()
            lines = [f"{indent}{tmp} = {self.expr(idx, read)}"]
            lines.append(f"{indent}if {net.lsb} <= {tmp} <= {net.msb}:")
            lines.append(
                f"{indent}    {dest} = ({cur} & ~(1 << ({tmp} - {net.lsb}))) | "
                f"(({rhs} & 1) << ({tmp} - {net.lsb}))"
            )
            return lines
        if isinstance(target, TSlice):
            dest = write(target.name)
            cur = read(target.name)
            shift = target.lsb - target.offset
            field_mask = mask(target.width) << shift
            return [
                f"{indent}{dest} = ({cur} & ~0x{field_mask:X}) | "
                f"(({rhs} & {_hexmask(target.width)}) << {shift})"
            ]
        if isinstance(target, TConcat):
            tmp = self.new_temp()
            lines = [f"{indent}{tmp} = {rhs}"]
            shift = target.width
            for part in target.parts:
                shift -= part.width
                if shift:
                    part_rhs = f"({tmp} >> {shift})"
                else:
                    part_rhs = tmp
                lines.extend(self.write_target(part, part_rhs, read, write, indent))
            return lines
        raise TypeError(f"unknown target {type(target).__name__}")


def port_manifest(design: DesignIR) -> tuple[tuple[str, str, int], ...]:
    return tuple((p.name, p.direction, p.width) for p in design.ports)


def emit_reference(design: DesignIR) -> RefSource:
    em = _Emitter(design)
    if design.is_sequential:
        body = _emit_sequential(em)
    else:
        body = _emit_combinational(em)
    header = [_HELPERS[name] for name in _HELPER_ORDER if name in em.helpers]
    parts = ["\n".join(header)] if header else []
    parts.append(body)
    text = "\n\n".join(parts) + "\n"
    return RefSource(text=text, port_manifest=port_manifest(design))


def _input_bindings(em: _Emitter, indent: str) -> list[str]:
    lines = []
    for port in em.design.data_inputs:
        ident = em.idents[port.name]
        lines.append(
            f'{indent}{ident} = inputs.get("{port.name}", 0) & {_hexmask(port.width)}'
        )
    return lines


def _return_line(em: _Emitter, read, indent: str) -> str:
    items = ", ".join(f'"{p.name}": {read(p.name)}' for p in em.design.outputs)
    return f"{indent}return {{{items}}}"


def _emit_combinational(em: _Emitter) -> str:
    design = em.design

    def read(name: str) -> str:
        return em.idents[name]

    lines = ["class TopModule:", "    def eval(self, inputs):"]
    lines.extend(_input_bindings(em, "        "))
    for name, net in design.nets.items():
        if net.kind != "input":
            lines.append(f"        {em.idents[name]} = 0")
    for idx in design.comb_order:
        proc = design.procs[idx]
        lines.extend(em.stmts(proc.body, read, read, "        "))
    lines.append(_return_line(em, read, "        "))
    return "\n".join(lines)


def _emit_sequential(em: _Emitter) -> str:
    design = em.design
    input_names = {p.name for p in design.inputs}
    state_nets = [n for n in design.nets.values() if n.kind != "input"]

    def attr_read(name: str) -> str:
        if name in input_names:
            return em.idents[name]
        return f"self.{em.idents[name]}"

    lines = ["class TopModule:", "    def __init__(self):"]
    for net in state_nets:
        lines.append(f"        self.{em.idents[net.name]} = 0")

    data_inputs = [em.idents[p.name] for p in design.data_inputs]

    has_comb = bool(design.comb_order)
    if has_comb:
        args = ", ".join(["self"] + data_inputs)
        lines.append("")
        lines.append(f"    def _settle({args}):")
        for idx in design.comb_order:
            proc = design.procs[idx]
            lines.extend(em.stmts(proc.body, attr_read, attr_read, "        "))

    lines.append("")
    lines.append("    def eval(self, inputs):")
    lines.extend(_input_bindings(em, "        "))
    call_args = ", ".join(data_inputs)
    if has_comb:
        lines.append(f"        self._settle({call_args})")

    commits: list[tuple[str, str]] = []
    for proc in design.seq_procs:
        staged = {
            name: f"{em.temp_prefix}nx_{em.idents[name]}" for name in proc.targets
        }

        def write(name: str, staged=staged) -> str:
            return staged[name]

        for name in proc.targets:
            lines.append(f"        {staged[name]} = {attr_read(name)}")
        lines.extend(em.stmts(proc.body, attr_read, write, "        "))
        for name in proc.targets:
            commits.append((attr_read(name), staged[name]))

    for dest, src in commits:
        lines.append(f"        {dest} = {src}")
    if has_comb:
        lines.append(f"        self._settle({call_args})")
    lines.append(_return_line(em, attr_read, "        "))
    return "\n".join(lines)


def emit_skeleton(design: DesignIR) -> str:
    em = _Emitter(design)
    lines = ["class TopModule:", "    def __init__(self):"]
    state = sorted(
        {name for proc in design.seq_procs for name in proc.targets},
        key=list(design.nets).index,
    )
    if state:
        for name in state:
            lines.append(f"        self.{em.idents[name]} = 0")
    else:
        lines.append("        pass")
    lines.append("")
    lines.append("    def eval(self, inputs):")
    lines.extend(_input_bindings(em, "        "))
    if design.is_sequential:
        lines.append("        # TODO: implement sequential logic")
    else:
        lines.append("        # TODO: implement combinational logic")
    items = ", ".join(f'"{p.name}": ...' for p in design.outputs)
    lines.append(f"        return {{{items}}}")
    return "\n".join(lines) + "\n"
