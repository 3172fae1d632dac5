"""Multi-turn cross-verification session between two isolated agents.

Each turn both agents sample `best_of` candidates from their own prompt,
every Verilog/Python pairing is evaluated differentially, and the
highest-agreement pair becomes the session's acceptance if it strictly
improves on the best so far.  Prompts for later turns carry the agent's
own previous attempts and the rendered mismatch values; candidate code
never crosses between agents, and an assertion enforces that.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from rtlcross.emit import RefSource
from rtlcross.ir.nodes import DesignIR
from rtlcross.orchestrate.agents import AgentEndpoint, AgentError, extract_code
from rtlcross.orchestrate.prompts import build_prompt
from rtlcross.rewards import RewardWeights, local_reward
from rtlcross.sim import WaveTrace
from rtlcross.verify import (
    DEFAULT_TIMEOUT,
    CompileFailure,
    FailureTier,
    PairOutcome,
    Ran,
    StimulusPlan,
    combine_outcome,
    compile_dut,
    describe_tier,
    gen_stimuli,
    render_outcome,
    run_dut,
    run_reference,
    stimulus_ports,
)


class IsolationError(Exception):
    """A prompt was about to carry one agent's code to the other."""


@dataclass(frozen=True)
class Problem:
    """One verification task: the behavior text shown to both agents,
    the authoritative port manifest, and the Python skeleton handed to
    the reference agent."""

    problem_id: str
    description: str
    manifest: tuple[tuple[str, str, int], ...]
    skeleton: str = ""


@dataclass(frozen=True)
class SessionConfig:
    best_of: int = 3
    max_turns: int = 3
    plan: StimulusPlan = StimulusPlan()
    weights: RewardWeights = RewardWeights()
    clip_eps: float = 0.2
    group_size: int = 4
    backtrack: bool = True
    shim_cmd: tuple[str, ...] | None = None
    timeout: float = DEFAULT_TIMEOUT

    def __post_init__(self) -> None:
        if self.best_of < 1:
            raise ValueError("best_of must be at least 1")
        if self.max_turns < 1:
            raise ValueError("max_turns must be at least 1")
        if self.group_size < 2:
            raise ValueError("group_size must be at least 2")
        if not 0.0 < self.clip_eps < 1.0:
            raise ValueError("clip_eps must be in (0, 1)")


@dataclass
class Candidate:
    """One sampled completion and the code block extracted from it."""

    raw: str
    code: str | None


# Maps (verilog codes, python codes) to the full pairwise outcome
# matrix.  Injectable so tests can avoid real compilation runs.
MatrixEvaluator = Callable[
    [list[str | None], list[str | None]], list[list[PairOutcome]]
]


class CandidateEvaluator:
    """Runs each candidate once over a shared stimulus stream, then
    joins pairs by comparing the cached traces."""

    def __init__(
        self,
        manifest: tuple[tuple[str, str, int], ...],
        plan: StimulusPlan,
        *,
        shim_cmd: Sequence[str] | None = None,
        timeout: float = DEFAULT_TIMEOUT,
    ):
        self.manifest = tuple(manifest)
        self.plan = plan
        self.shim_cmd = list(shim_cmd) if shim_cmd is not None else None
        self.timeout = timeout
        self.stimuli = gen_stimuli(stimulus_ports(self.manifest), plan)

    def prep_verilog(self, code: str | None) -> WaveTrace | FailureTier:
        if code is None:
            return CompileFailure("no verilog code block in completion")
        design = compile_dut(code, self.manifest)
        if not isinstance(design, DesignIR):
            return design
        return run_dut(design, self.stimuli)

    def prep_reference(self, code: str | None) -> WaveTrace | FailureTier:
        if code is None:
            return CompileFailure("no python code block in completion")
        src = RefSource(text=code, port_manifest=self.manifest)
        return run_reference(
            src, self.stimuli, shim_cmd=self.shim_cmd, timeout=self.timeout
        )

    def __call__(
        self, v_codes: list[str | None], p_codes: list[str | None]
    ) -> list[list[PairOutcome]]:
        v_solos = [self.prep_verilog(c) for c in v_codes]
        p_solos = [self.prep_reference(c) for c in p_codes]
        return [[combine_outcome(v, p) for p in p_solos] for v in v_solos]


def select_best_pair(ratios: list[list[float]]) -> tuple[int, int]:
    """Index of the highest match ratio, first in row-major order on
    ties."""
    if not ratios or not ratios[0]:
        raise ValueError("empty ratio matrix")
    width = len(ratios[0])
    best = (0, 0)
    best_ratio = ratios[0][0]
    for i, row in enumerate(ratios):
        if len(row) != width:
            raise ValueError("ragged ratio matrix")
        for j, ratio in enumerate(row):
            if ratio > best_ratio:
                best = (i, j)
                best_ratio = ratio
    return best


def assert_isolation(prompt_text: str, peer_codes: Iterable[str]) -> None:
    """Raise if any peer code string occurs verbatim in a prompt."""
    for code in peer_codes:
        snippet = code.strip()
        if snippet and snippet in prompt_text:
            raise IsolationError("peer code leaked into a prompt")


def sample_completions(
    agent: AgentEndpoint, system: str, user: str, n: int
) -> list[str]:
    """Sample n completions, retrying each transport failure twice
    before giving up on the turn."""
    outs = []
    for _ in range(n):
        failure: AgentError | None = None
        for _ in range(3):
            try:
                outs.append(agent.complete(system, user))
                break
            except AgentError as exc:
                failure = exc
        else:
            assert failure is not None
            raise failure
    return outs


def _numbered_tail(history: list[str]) -> list[tuple[int, str]]:
    return [(i + 1, text) for i, text in enumerate(history)][-2:]


def _candidate_tier(outcomes: list[PairOutcome], side: str) -> FailureTier:
    """A candidate's tier across its pairings: its own failure, or a
    completed run carrying the best ratio any peer gave it."""
    tiers = [
        o.verilog_tier if side == "verilog" else o.python_tier for o in outcomes
    ]
    first = tiers[0]
    if not isinstance(first, Ran):
        return first
    return Ran(max(t.match_ratio for t in tiers if isinstance(t, Ran)))


@dataclass
class TurnRecord:
    turn: int
    skipped: str | None
    v_candidates: list[Candidate]
    p_candidates: list[Candidate]
    ratios: list[list[float]]
    selected: tuple[int, int] | None
    outcome: PairOutcome | None
    accepted: bool
    accepted_ratio: float | None


@dataclass
class SessionResult:
    problem_id: str
    records: list[TurnRecord] = field(default_factory=list)
    accepted_verilog: str | None = None
    accepted_python: str | None = None
    accepted_outcome: PairOutcome | None = None
    log: list[dict] = field(default_factory=list)

    @property
    def accepted_ratio(self) -> float | None:
        if self.accepted_outcome is None:
            return None
        return self.accepted_outcome.match_ratio

    @property
    def agreed(self) -> bool:
        return self.accepted_outcome is not None and self.accepted_outcome.agreed

    @property
    def turns_run(self) -> int:
        return len(self.records)


def _sha(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]


def _candidate_log(
    cands: list[Candidate],
    outcomes: list[list[PairOutcome]],
    side: str,
) -> list[dict]:
    entries = []
    for idx, cand in enumerate(cands):
        if side == "verilog":
            row = outcomes[idx]
        else:
            row = [outcomes[i][idx] for i in range(len(outcomes))]
        tier = _candidate_tier(row, side)
        best_ratio = max(o.match_ratio for o in row)
        entries.append(
            {
                "hash": _sha(cand.raw),
                "code": cand.code,
                "tier": describe_tier(tier),
                "best_ratio": best_ratio,
                "local_reward": local_reward(tier),
            }
        )
    return entries


def run_session(
    v_agent: AgentEndpoint,
    p_agent: AgentEndpoint,
    problem: Problem,
    config: SessionConfig = SessionConfig(),
    *,
    log_path: str | None = None,
    evaluate_matrix: MatrixEvaluator | None = None,
) -> SessionResult:
    """Drive the two agents until their best pair fully agrees or the
    turn budget runs out.

    Acceptance only moves to a strictly better pair while backtracking
    is on; a transport failure or an all-compile-failure turn is
    recorded, skipped, and leaves the prior acceptance standing.
    """
    if v_agent.role != "verilog":
        raise ValueError("v_agent must have the verilog role")
    if p_agent.role != "reference":
        raise ValueError("p_agent must have the reference role")
    if evaluate_matrix is None:
        evaluate_matrix = CandidateEvaluator(
            problem.manifest,
            config.plan,
            shim_cmd=config.shim_cmd,
            timeout=config.timeout,
        )

    result = SessionResult(problem_id=problem.problem_id)
    v_history: list[str] = []
    p_history: list[str] = []
    diagnostics = ""
    accepted_ratio: float | None = None

    def record_turn(record: TurnRecord, extra: dict) -> None:
        result.records.append(record)
        entry = {
            "problem": problem.problem_id,
            "turn": record.turn,
            "skipped": record.skipped,
            "selected": list(record.selected) if record.selected else None,
            "accepted": record.accepted,
            "accepted_ratio": record.accepted_ratio,
        }
        entry.update(extra)
        result.log.append(entry)

    for turn in range(config.max_turns):
        v_system, v_user = build_prompt(
            "verilog",
            problem.description,
            problem.manifest,
            attempts=_numbered_tail(v_history),
            diagnostics=diagnostics,
        )
        p_system, p_user = build_prompt(
            "reference",
            problem.description,
            problem.manifest,
            skeleton=problem.skeleton,
            attempts=_numbered_tail(p_history),
            diagnostics=diagnostics,
        )
        peer_of_v = p_history + [
            c.code for r in result.records for c in r.p_candidates if c.code
        ]
        peer_of_p = v_history + [
            c.code for r in result.records for c in r.v_candidates if c.code
        ]
        assert_isolation(v_system + "\n" + v_user, peer_of_v)
        assert_isolation(p_system + "\n" + p_user, peer_of_p)

        try:
            v_raws = sample_completions(v_agent, v_system, v_user, config.best_of)
            p_raws = sample_completions(p_agent, p_system, p_user, config.best_of)
        except AgentError as exc:
            record_turn(
                TurnRecord(
                    turn=turn,
                    skipped=f"transport failure: {exc}",
                    v_candidates=[],
                    p_candidates=[],
                    ratios=[],
                    selected=None,
                    outcome=None,
                    accepted=False,
                    accepted_ratio=accepted_ratio,
                ),
                {"verilog": [], "python": [], "ratios": []},
            )
            continue

        v_cands = [Candidate(raw, extract_code(raw, "verilog")) for raw in v_raws]
        p_cands = [Candidate(raw, extract_code(raw, "python")) for raw in p_raws]
        outcomes = evaluate_matrix(
            [c.code for c in v_cands], [c.code for c in p_cands]
        )
        ratios = [[o.match_ratio for o in row] for row in outcomes]

        log_extra = {
            "verilog": _candidate_log(v_cands, outcomes, "verilog"),
            "python": _candidate_log(p_cands, outcomes, "reference"),
            "ratios": ratios,
        }

        v_all_compile = all(
            isinstance(row[0].verilog_tier, CompileFailure) for row in outcomes
        )
        p_all_compile = all(
            isinstance(o.python_tier, CompileFailure) for o in outcomes[0]
        )
        if v_all_compile and p_all_compile:
            record_turn(
                TurnRecord(
                    turn=turn,
                    skipped="every candidate failed to compile",
                    v_candidates=v_cands,
                    p_candidates=p_cands,
                    ratios=ratios,
                    selected=None,
                    outcome=None,
                    accepted=False,
                    accepted_ratio=accepted_ratio,
                ),
                log_extra,
            )
            continue

        i, j = select_best_pair(ratios)
        outcome = outcomes[i][j]
        ratio = ratios[i][j]

        if accepted_ratio is None:
            take = True
        elif config.backtrack:
            take = ratio > accepted_ratio
        else:
            take = True
        if take:
            result.accepted_verilog = v_cands[i].code
            result.accepted_python = p_cands[j].code
            result.accepted_outcome = outcome
            accepted_ratio = ratio
            if v_cands[i].code is not None:
                v_history.append(v_cands[i].code)
            if p_cands[j].code is not None:
                p_history.append(p_cands[j].code)
            diagnostics = render_outcome(outcome)

        record_turn(
            TurnRecord(
                turn=turn,
                skipped=None,
                v_candidates=v_cands,
                p_candidates=p_cands,
                ratios=ratios,
                selected=(i, j),
                outcome=outcome,
                accepted=take,
                accepted_ratio=accepted_ratio,
            ),
            log_extra,
        )

        if result.agreed:
            break

    if log_path is not None:
        with open(log_path, "w", encoding="utf-8") as handle:
            for entry in result.log:
                handle.write(json.dumps(entry, sort_keys=True) + "\n")
    return result
