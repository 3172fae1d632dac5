"""Group-relative policy update utilities.

A turn samples K candidates per agent from a shared prompt prefix,
scores every cross pairing, and normalizes each agent's K rewards into
zero-mean advantages.  Grouping across the K siblings of one turn is
what keeps the advantage signal alive: grouping per accepted attempt
would leave groups of size one, whose advantages are identically zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from rtlcross.orchestrate.agents import AgentEndpoint, extract_code
from rtlcross.orchestrate.prompts import build_prompt
from rtlcross.orchestrate.session import (
    Candidate,
    CandidateEvaluator,
    MatrixEvaluator,
    Problem,
    SessionConfig,
    _candidate_tier,
    _numbered_tail,
    sample_completions,
    select_best_pair,
)
from rtlcross.rewards import fix_bonus, local_reward
from rtlcross.sim import WaveTrace
from rtlcross.verify import MismatchReport, PairOutcome, render_outcome

STD_FLOOR = 1e-8


def group_advantages(rewards: Sequence[float]) -> list[float]:
    """Standardize a group of rewards: subtract the mean, divide by the
    population standard deviation.  A (near-)constant group carries no
    preference signal, so it maps to all zeros."""
    if not rewards:
        raise ValueError("empty reward group")
    k = len(rewards)
    mean = sum(rewards) / k
    variance = sum((r - mean) ** 2 for r in rewards) / k
    std = math.sqrt(variance)
    if std < STD_FLOOR:
        return [0.0] * k
    return [(r - mean) / std for r in rewards]


def clipped_objective(
    logp_new: Sequence[float],
    logp_old: Sequence[float],
    advantages: Sequence[float],
    eps: float = 0.2,
) -> float:
    """Clipped surrogate loss over one group.

    Per sample: min(r * A, clip(r, 1 - eps, 1 + eps) * A) with
    r = exp(logp_new - logp_old); the loss is the negated mean.
    """
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must be in (0, 1)")
    if not len(logp_new) == len(logp_old) == len(advantages):
        raise ValueError("mismatched group lengths")
    if not logp_new:
        raise ValueError("empty group")
    total = 0.0
    for new, old, adv in zip(logp_new, logp_old, advantages):
        ratio = math.exp(new - old)
        if not (math.isfinite(ratio) and math.isfinite(adv)):
            raise ValueError("non-finite ratio or advantage")
        clipped = min(max(ratio, 1.0 - eps), 1.0 + eps)
        total += min(ratio * adv, clipped * adv)
    return -total / len(advantages)


@dataclass
class XGrpoState:
    """Shared prefix carried between turns: the accepted attempts per
    agent and the diagnostics rendered from the accepted pair."""

    v_history: list[str] = field(default_factory=list)
    p_history: list[str] = field(default_factory=list)
    diagnostics: str = ""
    accepted: PairOutcome | None = None


@dataclass
class XGrpoTurn:
    turn: int
    v_candidates: list[Candidate]
    p_candidates: list[Candidate]
    ratios: list[list[float]]
    selected: tuple[int, int]
    outcome: PairOutcome
    v_rewards: list[float]
    p_rewards: list[float]
    v_advantages: list[float]
    p_advantages: list[float]


def _side_rewards(
    cands: list[Candidate],
    outcomes: list[list[PairOutcome]],
    side: str,
    config: SessionConfig,
    golden: WaveTrace | None,
    prev_report: MismatchReport | None,
) -> list[float]:
    weights = config.weights
    rewards = []
    for idx in range(len(cands)):
        if side == "verilog":
            row = outcomes[idx]
        else:
            row = [outcomes[i][idx] for i in range(len(outcomes))]
        best = max(row, key=lambda o: o.match_ratio)
        best_ratio = best.match_ratio
        tier = _candidate_tier(row, side)
        fix = 0
        if (
            golden is not None
            and prev_report is not None
            and best.dut_trace is not None
            and best.ref_trace is not None
        ):
            fix = fix_bonus(prev_report, best.dut_trace, best.ref_trace, golden)
        rewards.append(
            weights.delta_local * local_reward(tier)
            + weights.delta_match * best_ratio
            + weights.delta_fix * fix
        )
    return rewards


def sample_xgrpo_turn(
    v_agent: AgentEndpoint,
    p_agent: AgentEndpoint,
    problem: Problem,
    state: XGrpoState,
    *,
    config: SessionConfig = SessionConfig(),
    turn: int = 0,
    evaluate_matrix: MatrixEvaluator | None = None,
    golden: WaveTrace | None = None,
    prev_report: MismatchReport | None = None,
) -> XGrpoTurn:
    """Sample one group-structured turn and advance the shared prefix.

    Both agents draw `group_size` candidates from identical prompts,
    the K by K pairing matrix is scored, each candidate's reward blends
    its execution tier, its best pairing ratio, and (when a golden trace
    and a previous report exist) the fix bonus, and each agent's group
    is standardized into advantages.  The best pair of the turn becomes
    the next shared prefix.
    """
    if evaluate_matrix is None:
        evaluate_matrix = CandidateEvaluator(
            problem.manifest,
            config.plan,
            shim_cmd=config.shim_cmd,
            timeout=config.timeout,
        )
    k = config.group_size

    v_system, v_user = build_prompt(
        "verilog",
        problem.description,
        problem.manifest,
        attempts=_numbered_tail(state.v_history),
        diagnostics=state.diagnostics,
    )
    p_system, p_user = build_prompt(
        "reference",
        problem.description,
        problem.manifest,
        skeleton=problem.skeleton,
        attempts=_numbered_tail(state.p_history),
        diagnostics=state.diagnostics,
    )

    v_raws = sample_completions(v_agent, v_system, v_user, k)
    p_raws = sample_completions(p_agent, p_system, p_user, k)
    v_cands = [Candidate(raw, extract_code(raw, "verilog")) for raw in v_raws]
    p_cands = [Candidate(raw, extract_code(raw, "python")) for raw in p_raws]

    outcomes = evaluate_matrix([c.code for c in v_cands], [c.code for c in p_cands])
    ratios = [[o.match_ratio for o in row] for row in outcomes]

    v_rewards = _side_rewards(v_cands, outcomes, "verilog", config, golden, prev_report)
    p_rewards = _side_rewards(p_cands, outcomes, "reference", config, golden, prev_report)

    i, j = select_best_pair(ratios)
    outcome = outcomes[i][j]
    if v_cands[i].code is not None:
        state.v_history.append(v_cands[i].code)
    if p_cands[j].code is not None:
        state.p_history.append(p_cands[j].code)
    state.diagnostics = render_outcome(outcome)
    state.accepted = outcome

    return XGrpoTurn(
        turn=turn,
        v_candidates=v_cands,
        p_candidates=p_cands,
        ratios=ratios,
        selected=(i, j),
        outcome=outcome,
        v_rewards=v_rewards,
        p_rewards=p_rewards,
        v_advantages=group_advantages(v_rewards),
        p_advantages=group_advantages(p_rewards),
    )
