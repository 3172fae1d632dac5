"""Dataset conversion: raw Verilog sources into verified
(Verilog, Python reference) training pairs.

Every source yields exactly one record.  A record is `verified` only
when the emitted Python model reproduces the interpreter's trace on
every sampled (cycle, signal), otherwise it is `skipped` with the stage
that failed.  Records carry a structural fingerprint, invariant under
renaming and reformatting, used to drop benchmark-contaminated entries
and duplicates.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import asdict, dataclass, field
from typing import Callable, Iterable

from rtlcross.emit import emit_reference, port_manifest
from rtlcross.ir import nodes as ir
from rtlcross.ir.lower import lower_source
from rtlcross.sim import WaveTrace
from rtlcross.verify import (
    DEFAULT_TIMEOUT,
    CompileFailure,
    PortMismatch,
    Ran,
    RuntimeFailure,
    StimulusPlan,
    compare_traces,
    gen_stimuli,
    run_dut,
    run_reference,
    stimulus_ports,
)

CATEGORIES = ("fsm", "multi_cycle", "bit_arith", "other")


@dataclass
class DatasetRecord:
    record_id: str
    verilog: str
    reference: str
    manifest: tuple[tuple[str, str, int], ...]
    status: str  # "verified" | "skipped"
    skip_reason: str | None
    fingerprint: str
    category: str
    reasoning: str = ""

    def to_json(self) -> dict:
        data = asdict(self)
        data["manifest"] = [list(p) for p in self.manifest]
        return data

    @classmethod
    def from_json(cls, data: dict) -> "DatasetRecord":
        manifest = tuple((n, d, int(w)) for n, d, w in data.get("manifest", []))
        return cls(
            record_id=data["record_id"],
            verilog=data["verilog"],
            reference=data["reference"],
            manifest=manifest,
            status=data["status"],
            skip_reason=data.get("skip_reason"),
            fingerprint=data["fingerprint"],
            category=data["category"],
            reasoning=data.get("reasoning", ""),
        )


# --- fingerprinting -------------------------------------------------------

_LINE_COMMENT = re.compile(r"//[^\n]*")
_BLOCK_COMMENT = re.compile(r"/\*.*?\*/", re.DOTALL)
_WS = re.compile(r"\s+")


def normalized_text(source: str) -> str:
    text = _BLOCK_COMMENT.sub(" ", source)
    text = _LINE_COMMENT.sub(" ", text)
    return _WS.sub(" ", text).strip()


class _Canon:
    """Serializes a design with every signal name replaced by a stable
    index, so two designs differing only in identifiers (or layout)
    serialize identically."""

    def __init__(self, design: ir.DesignIR):
        self.ids: dict[str, int] = {}
        for p in design.ports:
            self._id(p.name)
        for name in design.nets:
            self._id(name)
        self.design = design

    def _id(self, name: str) -> int:
        if name not in self.ids:
            self.ids[name] = len(self.ids)
        return self.ids[name]

    def run(self) -> str:
        d = self.design
        parts = [
            "ports["
            + ",".join(f"{p.direction[0]}{p.width}" for p in d.ports)
            + "]"
        ]
        nets = sorted(d.nets.values(), key=lambda n: self.ids[n.name])
        parts.append(
            "nets["
            + ",".join(
                f"{self.ids[n.name]}:{n.kind[0]}{n.width}{int(n.signed)}@{n.msb}"
                for n in nets
            )
            + "]"
        )
        for proc in d.procs:
            clock = "" if proc.clock is None else str(self._id(proc.clock))
            reset = ""
            if proc.reset is not None:
                reset = f"{self._id(proc.reset.name)}~{int(proc.reset.active_low)}"
            body = "".join(self.stmt(s) for s in proc.body)
            parts.append(f"proc({proc.kind};{clock};{reset};{body})")
        return "|".join(parts)

    def stmt(self, s: ir.StmtIR) -> str:
        if isinstance(s, ir.AssignIR):
            return f"as({self.target(s.target)}={self.expr(s.rhs)};{int(s.blocking)})"
        if isinstance(s, ir.IfIR):
            then = "".join(self.stmt(x) for x in s.then)
            other = "".join(self.stmt(x) for x in s.other)
            return f"if({self.expr(s.cond)};{then};{other})"
        if isinstance(s, ir.CaseIR):
            arms = []
            for arm in s.arms:
                pats = (
                    "d"
                    if arm.patterns is None
                    else ",".join(f"{v}/{c}" for v, c in arm.patterns)
                )
                body = "".join(self.stmt(x) for x in arm.body)
                arms.append(f"[{pats}:{body}]")
            return f"case({self.expr(s.subject)};{''.join(arms)})"
        raise TypeError(f"unknown statement {s!r}")

    def target(self, t: ir.Target) -> str:
        if isinstance(t, ir.TWhole):
            return f"w{self._id(t.name)}"
        if isinstance(t, ir.TBit):
            return f"b{self._id(t.name)}[{self.expr(t.index)}]{t.offset}"
        if isinstance(t, ir.TSlice):
            return f"s{self._id(t.name)}[{t.msb}:{t.lsb}]{t.offset}"
        if isinstance(t, ir.TConcat):
            return "c{" + ",".join(self.target(p) for p in t.parts) + "}"
        raise TypeError(f"unknown target {t!r}")

    def expr(self, e: ir.IExpr) -> str:
        if isinstance(e, ir.IConst):
            return f"k{e.value}.{e.width}{int(e.signed)}"
        if isinstance(e, ir.INet):
            return f"n{self._id(e.name)}"
        if isinstance(e, ir.IBit):
            return f"bit(n{self._id(e.name)},{self.expr(e.index)},{e.offset})"
        if isinstance(e, ir.ISlice):
            return f"sl(n{self._id(e.name)},{e.msb},{e.lsb},{e.offset})"
        if isinstance(e, ir.IExt):
            return f"x({self.expr(e.child)},{e.width},{int(e.sign_extend)})"
        if isinstance(e, ir.IUnary):
            return f"u{e.op}({self.expr(e.operand)},{e.width})"
        if isinstance(e, ir.IBinary):
            sign = int(e.cmp_signed)
            return f"o{e.op}({self.expr(e.left)},{self.expr(e.right)},{e.width},{sign})"
        if isinstance(e, ir.ICond):
            return (
                f"c({self.expr(e.cond)},{self.expr(e.then)},"
                f"{self.expr(e.other)},{e.width})"
            )
        if isinstance(e, ir.IConcat):
            inner = ",".join(self.expr(p) for p in e.parts)
            return f"cat({inner},{e.width})"
        raise TypeError(f"unknown expression {e!r}")


def fingerprint(source: str) -> str:
    """Structural fingerprint of a Verilog source.

    Lowers the design and hashes a canonical, identifier-free
    serialization; a source that does not lower falls back to a hash of
    its comment-stripped, whitespace-collapsed text.
    """
    result = lower_source(source)
    if result.ok:
        canon = _Canon(result.design).run()
        return "ir:" + hashlib.sha256(canon.encode("utf-8")).hexdigest()
    norm = normalized_text(source)
    return "txt:" + hashlib.sha256(norm.encode("utf-8")).hexdigest()


# --- categorization -------------------------------------------------------

_ARITH_OPS = {"+", "-", "*", "/", "%", "<<", ">>", ">>>"}


def _walk_exprs(stmts: list[ir.StmtIR]):
    def exprs_of(e: ir.IExpr):
        yield e
        if isinstance(e, ir.IExt):
            yield from exprs_of(e.child)
        elif isinstance(e, ir.IUnary):
            yield from exprs_of(e.operand)
        elif isinstance(e, ir.IBinary):
            yield from exprs_of(e.left)
            yield from exprs_of(e.right)
        elif isinstance(e, ir.ICond):
            yield from exprs_of(e.cond)
            yield from exprs_of(e.then)
            yield from exprs_of(e.other)
        elif isinstance(e, ir.IConcat):
            for p in e.parts:
                yield from exprs_of(p)
        elif isinstance(e, (ir.IBit,)):
            yield from exprs_of(e.index)

    for s in stmts:
        if isinstance(s, ir.AssignIR):
            yield from exprs_of(s.rhs)
            if isinstance(s.target, ir.TBit):
                yield from exprs_of(s.target.index)
        elif isinstance(s, ir.IfIR):
            yield from exprs_of(s.cond)
            yield from _walk_exprs(s.then)
            yield from _walk_exprs(s.other)
        elif isinstance(s, ir.CaseIR):
            yield from exprs_of(s.subject)
            for arm in s.arms:
                yield from _walk_exprs(arm.body)


def categorize(design: ir.DesignIR) -> str:
    """Coarse structural tag: state machines, other clocked designs,
    combinational arithmetic, everything else."""
    has_case_in_seq = any(
        isinstance(s, ir.CaseIR)
        for proc in design.seq_procs
        for s in _iter_stmts(proc.body)
    )
    if design.is_sequential:
        return "fsm" if has_case_in_seq else "multi_cycle"
    for proc in design.procs:
        for e in _walk_exprs(proc.body):
            if isinstance(e, ir.IBinary) and e.op in _ARITH_OPS:
                return "bit_arith"
            if isinstance(e, ir.IConcat):
                return "bit_arith"
    return "other"


def _iter_stmts(stmts: list[ir.StmtIR]):
    for s in stmts:
        yield s
        if isinstance(s, ir.IfIR):
            yield from _iter_stmts(s.then)
            yield from _iter_stmts(s.other)
        elif isinstance(s, ir.CaseIR):
            for arm in s.arms:
                yield from _iter_stmts(arm.body)


# --- conversion -----------------------------------------------------------


def convert_one(
    record_id: str,
    source: str,
    plan: StimulusPlan,
    *,
    shim_cmd: list[str] | None = None,
    timeout: float = DEFAULT_TIMEOUT,
) -> DatasetRecord:
    fp = fingerprint(source)
    result = lower_source(source)
    if not result.ok:
        errors = [str(d) for d in result.diagnostics if d.is_error]
        return DatasetRecord(
            record_id=record_id,
            verilog=source,
            reference="",
            manifest=(),
            status="skipped",
            skip_reason=f"compile: {errors[0] if errors else 'lowering failed'}",
            fingerprint=fp,
            category="other",
        )
    design = result.design
    manifest = port_manifest(design)
    category = categorize(design)
    src = emit_reference(design)

    def skipped(reason: str) -> DatasetRecord:
        return DatasetRecord(
            record_id=record_id,
            verilog=source,
            reference=src.text,
            manifest=manifest,
            status="skipped",
            skip_reason=reason,
            fingerprint=fp,
            category=category,
        )

    stimuli = gen_stimuli(stimulus_ports(manifest), plan)
    dut = run_dut(design, stimuli)
    if isinstance(dut, RuntimeFailure):
        return skipped(f"interpret: {dut.detail}")
    ref = run_reference(src, stimuli, shim_cmd=shim_cmd, timeout=timeout)
    if isinstance(ref, CompileFailure):
        return skipped(f"emit: {ref.detail}")
    if isinstance(ref, RuntimeFailure):
        return skipped(f"reference: {ref.detail}")
    if isinstance(ref, PortMismatch):
        return skipped(f"reference ports: {ref.detail}")
    report = compare_traces(dut, ref)
    if isinstance(report, PortMismatch):
        return skipped(f"compare: {report.detail}")
    if report.items:
        return skipped(
            f"mismatch: {len(report.items)}/{report.total_compared} samples disagree"
        )
    return DatasetRecord(
        record_id=record_id,
        verilog=source,
        reference=src.text,
        manifest=manifest,
        status="verified",
        skip_reason=None,
        fingerprint=fp,
        category=category,
    )


def convert_corpus(
    sources: Iterable[tuple[str, str]],
    plan: StimulusPlan = StimulusPlan(),
    *,
    shim_cmd: list[str] | None = None,
    timeout: float = DEFAULT_TIMEOUT,
    annotate: Callable[[DatasetRecord], str] | None = None,
) -> list[DatasetRecord]:
    """Convert (id, verilog) pairs into dataset records, one per input,
    continuing past per-design failures."""
    records = []
    for record_id, source in sources:
        try:
            record = convert_one(
                record_id, source, plan, shim_cmd=shim_cmd, timeout=timeout
            )
        except Exception as exc:
            record = DatasetRecord(
                record_id=record_id,
                verilog=source,
                reference="",
                manifest=(),
                status="skipped",
                skip_reason=f"internal: {type(exc).__name__}: {exc}",
                fingerprint=fingerprint(source),
                category="other",
            )
        if annotate is not None:
            record.reasoning = annotate(record)
        records.append(record)
    return records


# --- contamination filtering ---------------------------------------------


@dataclass
class FilterReport:
    kept: list[DatasetRecord] = field(default_factory=list)
    contaminated: list[DatasetRecord] = field(default_factory=list)
    duplicates: list[DatasetRecord] = field(default_factory=list)


def contamination_filter(
    records: list[DatasetRecord], benchmarks: Iterable[str]
) -> FilterReport:
    """Drop records whose fingerprint matches any benchmark source and
    deduplicate the rest, keeping the first of each fingerprint."""
    bench_fps = {fingerprint(text) for text in benchmarks}
    report = FilterReport()
    seen: set[str] = set()
    for record in records:
        if record.fingerprint in bench_fps:
            report.contaminated.append(record)
            continue
        if record.fingerprint in seen:
            report.duplicates.append(record)
            continue
        seen.add(record.fingerprint)
        report.kept.append(record)
    return report


# --- serialization --------------------------------------------------------


def write_jsonl(records: Iterable[DatasetRecord], path: str) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for record in records:
            handle.write(json.dumps(record.to_json(), sort_keys=True) + "\n")


def read_jsonl(path: str) -> list[DatasetRecord]:
    records = []
    with open(path, "r", encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if line:
                records.append(DatasetRecord.from_json(json.loads(line)))
    return records


def summarize(records: list[DatasetRecord]) -> dict:
    """Counts by status, category, and skip stage."""
    summary = {
        "total": len(records),
        "verified": 0,
        "skipped": 0,
        "categories": {},
        "skip_stages": {},
    }
    for record in records:
        if record.status == "verified":
            summary["verified"] += 1
            summary["categories"][record.category] = (
                summary["categories"].get(record.category, 0) + 1
            )
        else:
            summary["skipped"] += 1
            stage = (record.skip_reason or "unknown").split(":", 1)[0]
            summary["skip_stages"][stage] = summary["skip_stages"].get(stage, 0) + 1
    return summary
