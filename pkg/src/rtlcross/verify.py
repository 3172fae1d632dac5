"""Differential cross-verification of a Verilog design against a
Python reference model.

Both sides consume the same seeded stimulus stream: the design runs on
the in-process interpreter, the Python model runs out of process behind
the ``pyshim`` wire protocol, and the two output traces are compared
cycle by cycle.  A run classifies each side into a failure tier
(compile, runtime, port interface) or a completed run with a match
ratio, which is what the reward layer consumes.
"""

from __future__ import annotations

import json
import os
import shlex
import shutil
import subprocess
import sys
import tempfile
from dataclasses import dataclass, field

from rtlcross.ir.lower import lower_source
from rtlcross.ir.nodes import DesignIR, PortIR, mask, reset_polarity
from rtlcross.prng import Xoshiro256StarStar
from rtlcross.emit import RefSource
from rtlcross.sim import CycleRecord, SimError, Simulator, WaveTrace

DEFAULT_TIMEOUT = 10.0


class VerifyError(Exception):
    pass


@dataclass(frozen=True)
class StimulusPlan:
    """How many vectors to drive, from which seed, and how many leading
    vectors hold reset asserted."""

    num_vectors: int = 1000
    seed: int = 42
    reset_cycles: int = 2

    def __post_init__(self) -> None:
        if self.num_vectors < 1:
            raise ValueError("num_vectors must be at least 1")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")
        if not 0 <= self.reset_cycles < self.num_vectors:
            raise ValueError("reset_cycles must be in [0, num_vectors)")


# Failure tiers, least to most successful.  `Ran` carries the fraction
# of (cycle, signal) samples that agreed.


@dataclass(frozen=True)
class CompileFailure:
    detail: str


@dataclass(frozen=True)
class RuntimeFailure:
    detail: str
    cycle: int | None = None


@dataclass(frozen=True)
class PortMismatch:
    detail: str


@dataclass(frozen=True)
class Ran:
    match_ratio: float


FailureTier = CompileFailure | RuntimeFailure | PortMismatch | Ran


def tier_ratio(tier: FailureTier) -> float:
    """Match ratio of a completed run, 0.0 for any failure tier."""
    return tier.match_ratio if isinstance(tier, Ran) else 0.0


def describe_tier(tier: FailureTier) -> str:
    if isinstance(tier, CompileFailure):
        return f"compile error: {tier.detail}"
    if isinstance(tier, RuntimeFailure):
        if tier.cycle is None:
            return f"runtime error: {tier.detail}"
        return f"runtime error at cycle {tier.cycle}: {tier.detail}"
    if isinstance(tier, PortMismatch):
        return f"port mismatch: {tier.detail}"
    return f"ran, match ratio {tier.match_ratio:.4f}"


@dataclass(frozen=True)
class MismatchItem:
    test_index: int
    signal: str
    got: int
    exp: int
    inputs: dict[str, int] = field(hash=False, default_factory=dict)


@dataclass
class MismatchReport:
    """Every disagreeing (cycle, signal) sample, ordered by cycle then
    signal name, plus the totals the ratio is computed from."""

    items: list[MismatchItem]
    total_compared: int
    num_vectors: int

    @property
    def match_ratio(self) -> float:
        if self.total_compared == 0:
            return 1.0
        return 1.0 - len(self.items) / self.total_compared


def _looks_like_clock(name: str) -> bool:
    lower = name.lower()
    return lower.startswith("clk") or lower.startswith("clock")


def manifest_ports(manifest: tuple[tuple[str, str, int], ...]) -> list[PortIR]:
    return [PortIR(name=n, direction=d, width=w) for n, d, w in manifest]


def stimulus_ports(manifest: tuple[tuple[str, str, int], ...]) -> list[PortIR]:
    """Input ports that carry data: everything except clocks, whose
    edges are implied by the harness."""
    return [
        p
        for p in manifest_ports(manifest)
        if p.direction == "input" and not _looks_like_clock(p.name)
    ]


def gen_stimuli(ports: list[PortIR], plan: StimulusPlan) -> list[dict[str, int]]:
    """Draw one value per input port per vector, in port order, from a
    stream seeded by the plan.

    Reset-named one-bit inputs are not drawn: they are held asserted for
    the first `reset_cycles` vectors and deasserted afterwards, honoring
    the active-low naming convention.
    """
    rng = Xoshiro256StarStar(plan.seed)
    resets: dict[str, bool] = {}
    for p in ports:
        if p.direction != "input":
            continue
        pol = reset_polarity(p.name)
        if pol is not None and p.width == 1:
            resets[p.name] = pol
    vectors: list[dict[str, int]] = []
    for i in range(plan.num_vectors):
        vec: dict[str, int] = {}
        for p in ports:
            if p.direction != "input":
                continue
            active_low = resets.get(p.name)
            if active_low is None:
                vec[p.name] = rng.draw(p.width)
            else:
                asserted = i < plan.reset_cycles
                vec[p.name] = int(asserted == (not active_low))
        vectors.append(vec)
    return vectors


def run_dut(design: DesignIR, stimuli: list[dict[str, int]]) -> WaveTrace | RuntimeFailure:
    """Interpret the design over the stimulus stream, classifying any
    mid-run interpreter fault as a runtime failure at its cycle."""
    sim = Simulator(design)
    trace = WaveTrace()
    for i, vec in enumerate(stimuli):
        try:
            outputs = sim.step(vec)
        except SimError as exc:
            return RuntimeFailure(str(exc), cycle=i)
        inputs = {p.name: vec[p.name] & mask(p.width) for p in design.data_inputs}
        trace.cycles.append(CycleRecord(inputs=inputs, outputs=outputs))
    return trace


def shim_command() -> list[str]:
    """Command line for the reference-model host process.  Overridable
    through the RTLCROSS_SHIM environment variable."""
    override = os.environ.get("RTLCROSS_SHIM")
    if override:
        return shlex.split(override)
    return [sys.executable, "-m", "pyshim"]


def _parse_reply(line: str) -> dict | None:
    try:
        reply = json.loads(line)
    except ValueError:
        return None
    return reply if isinstance(reply, dict) else None


def run_reference(
    src: RefSource,
    stimuli: list[dict[str, int]],
    *,
    shim_cmd: list[str] | None = None,
    timeout: float = DEFAULT_TIMEOUT,
) -> WaveTrace | FailureTier:
    """Run a Python reference model over the stimulus stream in a fresh
    shim subprocess and collect its output trace.

    All frames are written up front and the exchange is collected in one
    shot, so a wedged model is bounded by the timeout rather than by a
    pipe deadlock.
    """
    cmd = list(shim_cmd) if shim_cmd is not None else shim_command()
    workdir = tempfile.mkdtemp(prefix="refmodel_")
    # Stable basename so compile errors read the same across runs.
    path = os.path.join(workdir, "model.py")
    try:
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(src.text)
        ports = [
            {"name": n, "dir": d, "width": w} for n, d, w in src.port_manifest
        ]
        frames = [{"cmd": "load", "source_path": path, "ports": ports}]
        frames.extend({"cmd": "eval", "inputs": vec} for vec in stimuli)
        frames.append({"cmd": "quit"})
        payload = "".join(json.dumps(f) + "\n" for f in frames)
        try:
            proc = subprocess.run(
                cmd,
                input=payload,
                capture_output=True,
                text=True,
                timeout=timeout,
            )
        except subprocess.TimeoutExpired:
            return RuntimeFailure("timeout")
        except OSError as exc:
            return RuntimeFailure(f"failed to launch shim: {exc}")
    finally:
        shutil.rmtree(workdir, ignore_errors=True)

    lines = [ln for ln in proc.stdout.splitlines() if ln.strip()]
    if not lines:
        detail = f"shim produced no replies (exit status {proc.returncode})"
        return RuntimeFailure(detail)

    first = _parse_reply(lines[0])
    if first is None:
        return RuntimeFailure("unparseable shim reply to load")
    if first.get("ok") is False:
        return CompileFailure(str(first.get("detail", "load failed")))
    if first.get("ok") is not True:
        return RuntimeFailure(f"unexpected shim reply to load: {lines[0]!r}")

    trace = WaveTrace()
    for i, vec in enumerate(stimuli):
        index = 1 + i
        if index >= len(lines):
            detail = f"shim exited early (exit status {proc.returncode})"
            return RuntimeFailure(detail, cycle=i)
        reply = _parse_reply(lines[index])
        if reply is None:
            return RuntimeFailure("unparseable shim reply", cycle=i)
        if "outputs" in reply and isinstance(reply["outputs"], dict):
            outputs = {str(k): int(v) for k, v in reply["outputs"].items()}
            trace.cycles.append(CycleRecord(inputs=dict(vec), outputs=outputs))
            continue
        error = reply.get("error")
        if isinstance(error, dict):
            detail = str(error.get("detail", ""))
            stage = error.get("stage")
            if stage == "port":
                return PortMismatch(detail)
            cycle = error.get("cycle")
            return RuntimeFailure(detail, cycle=cycle if isinstance(cycle, int) else i)
        return RuntimeFailure(f"unrecognized shim reply: {lines[index]!r}", cycle=i)
    return trace


def compare_traces(dut: WaveTrace, ref: WaveTrace) -> MismatchReport | PortMismatch:
    """Compare two traces sample by sample.  Differing trace lengths or
    output signal sets are an interface-level failure, not a mismatch
    count.  Swapping the operands swaps got/exp and preserves totals."""
    if len(dut) != len(ref):
        return PortMismatch(f"trace lengths differ: {len(dut)} vs {len(ref)}")
    items: list[MismatchItem] = []
    signals: list[str] | None = None
    for i, (d, r) in enumerate(zip(dut.cycles, ref.cycles)):
        if set(d.outputs) != set(r.outputs):
            extra = sorted(set(d.outputs) ^ set(r.outputs))
            return PortMismatch(
                f"output signals differ at cycle {i}: {', '.join(extra)}"
            )
        if signals is None:
            signals = sorted(d.outputs)
        for s in signals:
            if d.outputs[s] != r.outputs[s]:
                items.append(
                    MismatchItem(
                        test_index=i,
                        signal=s,
                        got=d.outputs[s],
                        exp=r.outputs[s],
                        inputs=dict(d.inputs),
                    )
                )
    total = len(dut) * (len(signals) if signals is not None else 0)
    return MismatchReport(items=items, total_compared=total, num_vectors=len(dut))


MAX_SHOWN_MISMATCHES = 5
MAX_DIAGNOSTIC_CHARS = 2000


def render_diagnostics(report: MismatchReport) -> str:
    """Render a mismatch report as the feedback text shown to an agent:
    a summary line, up to five concrete mismatches with their inputs,
    and a closing admonition.  Truncated to 2000 characters."""
    if not report.items:
        return "No mismatches detected."
    lines = [
        f"Verilog vs Python: {len(report.items)}/{report.total_compared} "
        f"mismatches across {report.num_vectors} test vectors.",
        "First mismatches (got = your Verilog, exp = peer Python):",
    ]
    for item in report.items[:MAX_SHOWN_MISMATCHES]:
        lines.append(
            f"  Test {item.test_index}, signal `{item.signal}': "
            f"got={item.got}, exp={item.exp}"
        )
        shown = ", ".join(f"{k}={v}" for k, v in item.inputs.items())
        lines.append(f"    (inputs: {shown})")
    if len(report.items) > MAX_SHOWN_MISMATCHES:
        lines.append(f"  ...(up to {MAX_SHOWN_MISMATCHES} mismatches shown)...")
    lines.append("Check your logic carefully. Either you or the Python agent is wrong ---")
    lines.append("only change your code if you think your previous code is wrong.")
    return "\n".join(lines)[:MAX_DIAGNOSTIC_CHARS]


@dataclass
class PairOutcome:
    """Joint result of one Verilog/Python verification run."""

    verilog_tier: FailureTier
    python_tier: FailureTier
    report: MismatchReport | None = None
    dut_trace: WaveTrace | None = None
    ref_trace: WaveTrace | None = None

    @property
    def match_ratio(self) -> float:
        return self.report.match_ratio if self.report is not None else 0.0

    @property
    def agreed(self) -> bool:
        return self.report is not None and not self.report.items


def render_outcome(outcome: PairOutcome) -> str:
    """Feedback text for an outcome: the mismatch diagnostics when both
    sides ran, otherwise a plain statement of which side failed how."""
    if outcome.report is not None:
        return render_diagnostics(outcome.report)
    lines = []
    if not isinstance(outcome.verilog_tier, Ran):
        lines.append(f"Verilog side failed: {describe_tier(outcome.verilog_tier)}")
    if not isinstance(outcome.python_tier, Ran):
        lines.append(f"Python side failed: {describe_tier(outcome.python_tier)}")
    return "\n".join(lines)[:MAX_DIAGNOSTIC_CHARS]


def _interface_diff(
    actual: list[PortIR], manifest: tuple[tuple[str, str, int], ...]
) -> str | None:
    """None if the design interface matches the manifest, else a short
    description of the differences."""
    want = {n: (d, w) for n, d, w in manifest}
    got = {p.name: (p.direction, p.width) for p in actual}
    if want == got:
        return None
    problems = []
    for name in sorted(set(want) - set(got)):
        problems.append(f"missing port '{name}'")
    for name in sorted(set(got) - set(want)):
        problems.append(f"unexpected port '{name}'")
    for name in sorted(set(want) & set(got)):
        if want[name] != got[name]:
            problems.append(
                f"port '{name}' is {got[name][0]} width {got[name][1]}, "
                f"expected {want[name][0]} width {want[name][1]}"
            )
    return "; ".join(problems)


def compile_dut(
    verilog_text: str, manifest: tuple[tuple[str, str, int], ...]
) -> DesignIR | CompileFailure | PortMismatch:
    """Lower Verilog text and check its interface against the problem's
    port manifest."""
    result = lower_source(verilog_text)
    if not result.ok:
        errors = [str(d) for d in result.diagnostics if d.is_error]
        return CompileFailure(errors[0] if errors else "lowering failed")
    diff = _interface_diff(result.design.ports, manifest)
    if diff is not None:
        return PortMismatch(diff)
    return result.design


def verify_pair(
    verilog_text: str,
    python_text: str,
    manifest: tuple[tuple[str, str, int], ...],
    plan: StimulusPlan,
    *,
    shim_cmd: list[str] | None = None,
    timeout: float = DEFAULT_TIMEOUT,
) -> PairOutcome:
    """Cross-verify one Verilog candidate against one Python candidate.

    Stimuli are generated once from the problem's port manifest, so both
    sides see the identical stream.  Each side is classified on its own;
    traces are compared only when both sides complete, and a completed
    side paired with a failed one scores a match ratio of zero.
    """
    stimuli = gen_stimuli(stimulus_ports(manifest), plan)

    design = compile_dut(verilog_text, manifest)
    dut: WaveTrace | FailureTier
    if isinstance(design, DesignIR):
        dut = run_dut(design, stimuli)
    else:
        dut = design

    src = RefSource(text=python_text, port_manifest=tuple(manifest))
    ref = run_reference(src, stimuli, shim_cmd=shim_cmd, timeout=timeout)
    return combine_outcome(dut, ref)


def combine_outcome(
    dut: WaveTrace | FailureTier, ref: WaveTrace | FailureTier
) -> PairOutcome:
    """Join two independently classified sides into one outcome.  When
    both completed, their traces are compared and each side carries the
    shared match ratio; a completed side paired with a failed one ran
    without agreeing on anything, so it carries ratio zero."""
    dut_trace = dut if isinstance(dut, WaveTrace) else None
    ref_trace = ref if isinstance(ref, WaveTrace) else None

    if dut_trace is not None and ref_trace is not None:
        compared = compare_traces(dut_trace, ref_trace)
        if isinstance(compared, PortMismatch):
            # Both sides honored the same manifest, so this indicates an
            # internal harness fault rather than a candidate fault.
            raise VerifyError(f"inconsistent traces: {compared.detail}")
        tier = Ran(compared.match_ratio)
        return PairOutcome(
            verilog_tier=tier,
            python_tier=tier,
            report=compared,
            dut_trace=dut_trace,
            ref_trace=ref_trace,
        )

    v_tier = Ran(0.0) if dut_trace is not None else dut
    p_tier = Ran(0.0) if ref_trace is not None else ref
    assert not isinstance(v_tier, WaveTrace) and not isinstance(p_tier, WaveTrace)
    return PairOutcome(
        verilog_tier=v_tier,
        python_tier=p_tier,
        report=None,
        dut_trace=dut_trace,
        ref_trace=ref_trace,
    )
