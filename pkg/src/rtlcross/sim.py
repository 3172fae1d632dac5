"""Cycle-accurate two-state interpreter over the IR.

Combinational designs evaluate with eval_comb. Sequential designs
evaluate one clock period per eval_cycle call: settle combinational
logic, evaluate every clocked process against the pre-edge state, commit
all register updates at once, settle again, then sample the outputs.
All state powers up at zero.
"""

from __future__ import annotations

import json
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
    to_signed,
)


class SimError(Exception):
    pass


class Simulator:
    def __init__(self, design: DesignIR):
        self.design = design
        self.values: dict[str, int] = {name: 0 for name in design.nets}

    def reset_state(self) -> None:
        for name in self.values:
            self.values[name] = 0

    def step(self, inputs: dict[str, int]) -> dict[str, int]:
        if self.design.is_sequential:
            return self.eval_cycle(inputs)
        return self.eval_comb(inputs)

    def eval_comb(self, inputs: dict[str, int]) -> dict[str, int]:
        if self.design.is_sequential:
            raise SimError("eval_comb called on a sequential design")
        self._apply_inputs(inputs)
        self._settle()
        return self._sample()

    def eval_cycle(self, inputs: dict[str, int]) -> dict[str, int]:
        if not self.design.is_sequential:
            raise SimError("eval_cycle called on a combinational design")
        self._apply_inputs(inputs)
        self._settle()
        committed: dict[str, int] = {}
        for proc in self.design.seq_procs:
            local: dict[str, int] = {}
            staged: dict[str, int] = {}
            self._exec(proc.body, local, local, staged)
            committed.update(local)
            committed.update(staged)
        self.values.update(committed)
        self._settle()
        return self._sample()

    # -- internals --------------------------------------------------------

    def _apply_inputs(self, inputs: dict[str, int]) -> None:
        clocks = set(self.design.clock_names)
        for port in self.design.inputs:
            if port.name in clocks:
                continue
            if port.name not in inputs:
                raise SimError(f"missing input '{port.name}'")
            value = inputs[port.name]
            if not isinstance(value, int) or isinstance(value, bool):
                raise SimError(
                    f"input '{port.name}' must be an int, got {type(value).__name__}"
                )
            self.values[port.name] = value & mask(port.width)

    def _settle(self) -> None:
        for idx in self.design.comb_order:
            proc = self.design.procs[idx]
            self._exec(proc.body, None, self.values, None)

    def _sample(self) -> dict[str, int]:
        return {p.name: self.values[p.name] for p in self.design.outputs}

    def _read(self, name: str, overlay: dict[str, int] | None) -> int:
        if overlay is not None and name in overlay:
            return overlay[name]
        return self.values[name]

    def _exec(
        self,
        stmts: list[StmtIR],
        overlay: dict[str, int] | None,
        blocking_sink: dict[str, int],
        nb_sink: dict[str, int] | None,
    ) -> None:
        for st in stmts:
            if isinstance(st, AssignIR):
                value = self._eval(st.rhs, overlay)
                if st.blocking:
                    self._write(st.target, value, blocking_sink, overlay)
                else:
                    if nb_sink is None:
                        raise SimError("non-blocking assignment outside a clocked block")
                    self._write(st.target, value, nb_sink, None)
            elif isinstance(st, IfIR):
                if self._eval(st.cond, overlay):
                    self._exec(st.then, overlay, blocking_sink, nb_sink)
                else:
                    self._exec(st.other, overlay, blocking_sink, nb_sink)
            elif isinstance(st, CaseIR):
                subject = self._eval(st.subject, overlay)
                default_arm = None
                matched = False
                for arm in st.arms:
                    if arm.patterns is None:
                        if default_arm is None:
                            default_arm = arm
                        continue
                    if any((subject & care) == value for value, care in arm.patterns):
                        self._exec(arm.body, overlay, blocking_sink, nb_sink)
                        matched = True
                        break
                if not matched and default_arm is not None:
                    self._exec(default_arm.body, overlay, blocking_sink, nb_sink)
            else:
                raise SimError(f"unknown statement {type(st).__name__}")

    def _write(
        self,
        target: Target,
        value: int,
        sink: dict[str, int],
        overlay: dict[str, int] | None,
    ) -> None:
        if isinstance(target, TWhole):
            sink[target.name] = value & mask(target.width)
            return
        if isinstance(target, TConcat):
            for part in reversed(target.parts):
                self._write(part, value & mask(part.width), sink, overlay)
                value >>= part.width
            return
        net = self.design.nets[target.name]
        base = sink.get(target.name)
        if base is None:
            base = self._read(target.name, None)
        if isinstance(target, TBit):
            idx = self._eval(target.index, overlay) - target.offset
            if not 0 <= idx < net.width:
                return  # out-of-range write has no effect
            bit = value & 1
            sink[target.name] = (base & ~(1 << idx)) | (bit << idx)
            return
        if isinstance(target, TSlice):
            lo = target.lsb - target.offset
            w = target.width
            field_mask = mask(w) << lo
            sink[target.name] = (base & ~field_mask) | ((value & mask(w)) << lo)
            return
        raise SimError(f"unknown target {type(target).__name__}")

    def _eval(self, e: IExpr, overlay: dict[str, int] | None) -> int:
        if isinstance(e, IConst):
            return e.value
        if isinstance(e, INet):
            return self._read(e.name, overlay)
        if isinstance(e, IBit):
            net = self.design.nets[e.name]
            idx = self._eval(e.index, overlay) - e.offset
            if not 0 <= idx < net.width:
                return 0
            return (self._read(e.name, overlay) >> idx) & 1
        if isinstance(e, ISlice):
            return (self._read(e.name, overlay) >> (e.lsb - e.offset)) & mask(e.width)
        if isinstance(e, IExt):
            value = self._eval(e.child, overlay)
            if e.sign_extend and value >> (e.child.width - 1) & 1:
                value |= mask(e.width) ^ mask(e.child.width)
            return value & mask(e.width)
        if isinstance(e, IUnary):
            if e.op == "~":
                return ~self._eval(e.operand, overlay) & mask(e.width)
            if e.op == "-":
                return -self._eval(e.operand, overlay) & mask(e.width)
            if e.op == "+":
                return self._eval(e.operand, overlay)
            value = self._eval(e.operand, overlay)
            w = e.operand.width
            if e.op == "!":
                return 0 if value else 1
            if e.op == "&":
                return 1 if value == mask(w) else 0
            if e.op == "~&":
                return 0 if value == mask(w) else 1
            if e.op == "|":
                return 1 if value else 0
            if e.op == "~|":
                return 0 if value else 1
            ones = bin(value).count("1") & 1
            if e.op == "^":
                return ones
            if e.op == "~^":
                return 1 - ones
            raise SimError(f"unknown unary operator '{e.op}'")
        if isinstance(e, IBinary):
            return self._eval_binary(e, overlay)
        if isinstance(e, ICond):
            if self._eval(e.cond, overlay):
                return self._eval(e.then, overlay)
            return self._eval(e.other, overlay)
        if isinstance(e, IConcat):
            value = 0
            for part in e.parts:
                value = (value << part.width) | self._eval(part, overlay)
            return value
        raise SimError(f"unknown expression {type(e).__name__}")

    def _eval_binary(self, e: IBinary, overlay: dict[str, int] | None) -> int:
        op = e.op
        if op in ("&&", "||"):
            left = self._eval(e.left, overlay)
            if op == "&&":
                if not left:
                    return 0
                return 1 if self._eval(e.right, overlay) else 0
            if left:
                return 1
            return 1 if self._eval(e.right, overlay) else 0

        left = self._eval(e.left, overlay)
        right = self._eval(e.right, overlay)
        m = mask(e.width)

        if op == "+":
            return (left + right) & m
        if op == "-":
            return (left - right) & m
        if op == "*":
            return (left * right) & m
        if op in ("/", "%"):
            if right == 0:
                return 0
            if e.signed:
                ls = to_signed(left, e.width)
                rs = to_signed(right, e.width)
                q = abs(ls) // abs(rs)
                if (ls < 0) != (rs < 0):
                    q = -q
                if op == "/":
                    return q & m
                return (ls - q * rs) & m
            if op == "/":
                return left // right
            return left % right
        if op == "&":
            return left & right
        if op == "|":
            return left | right
        if op == "^":
            return left ^ right
        if op == "<<":
            if right >= e.width:
                return 0
            return (left << right) & m
        if op == ">>":
            if right >= e.width:
                return 0
            return left >> right
        if op == ">>>":
            if e.signed:
                shifted = to_signed(left, e.width) >> min(right, e.width)
                return shifted & m
            if right >= e.width:
                return 0
            return left >> right
        if op in ("==", "!=", "<", "<=", ">", ">="):
            if e.cmp_signed:
                cw = e.left.width
                left = to_signed(left, cw)
                right = to_signed(right, cw)
            if op == "==":
                return 1 if left == right else 0
            if op == "!=":
                return 1 if left != right else 0
            if op == "<":
                return 1 if left < right else 0
            if op == "<=":
                return 1 if left <= right else 0
            if op == ">":
                return 1 if left > right else 0
            return 1 if left >= right else 0
        raise SimError(f"unknown binary operator '{op}'")


@dataclass
class CycleRecord:
    inputs: dict[str, int]
    outputs: dict[str, int]


@dataclass
class WaveTrace:
    cycles: list[CycleRecord] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.cycles)


def run_trace(design: DesignIR, stimuli: list[dict[str, int]]) -> WaveTrace:
    """Run the design over the stimuli from the all-zero power-on state.

    One trace record per stimulus vector; state threads across cycles.
    """
    sim = Simulator(design)
    trace = WaveTrace()
    for vec in stimuli:
        outputs = sim.step(vec)
        recorded = {
            p.name: vec[p.name] & mask(p.width) for p in design.data_inputs
        }
        trace.cycles.append(CycleRecord(inputs=recorded, outputs=outputs))
    return trace


def trace_jsonl(trace: WaveTrace) -> str:
    """One JSON object per cycle: {"inputs": {...}, "outputs": {...}}."""
    lines = [
        json.dumps({"inputs": rec.inputs, "outputs": rec.outputs}, sort_keys=True)
        for rec in trace.cycles
    ]
    return "\n".join(lines) + ("\n" if lines else "")


def trace_vcd(trace: WaveTrace, widths: dict[str, int], top: str = "top") -> str:
    """Waveform-viewer export; comparisons never consume this format."""
    names = []
    for rec in trace.cycles[:1]:
        names = sorted(rec.inputs) + sorted(rec.outputs)
    codes = {name: chr(33 + i) for i, name in enumerate(names)}
    out = [
        "$timescale 1ns $end",
        f"$scope module {top} $end",
    ]
    for name in names:
        width = widths.get(name, 1)
        out.append(f"$var wire {width} {codes[name]} {name} $end")
    out.append("$upscope $end")
    out.append("$enddefinitions $end")
    for t, rec in enumerate(trace.cycles):
        out.append(f"#{t}")
        merged = {**rec.inputs, **rec.outputs}
        for name in names:
            width = widths.get(name, 1)
            value = merged[name]
            if width == 1:
                out.append(f"{value}{codes[name]}")
            else:
                out.append(f"b{value:b} {codes[name]}")
    out.append(f"#{len(trace.cycles)}")
    return "\n".join(out) + "\n"
