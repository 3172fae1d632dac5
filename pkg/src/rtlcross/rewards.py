"""Reward shaping for cross-verified code generation.

A candidate earns a local reward from how far its run got (compile,
run, interface, full run scaled by agreement), a bonus for fixing a
previously mismatched sample, and a match component from the agreement
ratio against its peer or against a golden trace when one exists.  The
weighted sum is the scalar used for ranking and policy updates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, TypeVar

from rtlcross.sim import WaveTrace
from rtlcross.verify import (
    CompileFailure,
    FailureTier,
    MismatchReport,
    PortMismatch,
    Ran,
    RuntimeFailure,
)

T = TypeVar("T")


@dataclass(frozen=True)
class RewardWeights:
    delta_local: float = 10.0
    delta_fix: float = 0.2
    delta_match: float = 0.5


@dataclass(frozen=True)
class RewardBreakdown:
    """One candidate's reward components and their weighted total.
    `match_source` records whether the match ratio came from the peer
    cross-check or from a golden trace."""

    local: float
    fix: float
    match: float
    total: float
    match_source: str = "cross"


def local_reward(tier: FailureTier) -> float:
    """Ladder of execution progress: 0 for a compile failure, 0.1 for a
    runtime failure, 0.2 for an interface mismatch, and 0.2 + 0.8 * c
    for a completed run with match ratio c."""
    if isinstance(tier, CompileFailure):
        return 0.0
    if isinstance(tier, RuntimeFailure):
        return 0.1
    if isinstance(tier, PortMismatch):
        return 0.2
    if isinstance(tier, Ran):
        return 0.2 + 0.8 * tier.match_ratio
    raise TypeError(f"not a failure tier: {tier!r}")


def fix_bonus(
    previous: MismatchReport | None,
    dut: WaveTrace,
    ref: WaveTrace,
    golden: WaveTrace,
) -> int:
    """1 if at least one sample that mismatched in the previous round
    now agrees on all three traces, else 0.

    The three traces must cover the same cycles; an empty or missing
    previous report earns nothing.
    """
    if previous is None or not previous.items:
        return 0
    if not len(dut) == len(ref) == len(golden):
        raise ValueError("traces must cover the same number of cycles")
    for item in previous.items:
        if item.test_index >= len(dut):
            raise ValueError(
                f"previous report cycle {item.test_index} is beyond the traces"
            )
        d = dut.cycles[item.test_index].outputs.get(item.signal)
        r = ref.cycles[item.test_index].outputs.get(item.signal)
        g = golden.cycles[item.test_index].outputs.get(item.signal)
        if d is not None and d == r == g:
            return 1
    return 0


def aggregate_reward(
    local: float,
    fix: float,
    match: float,
    weights: RewardWeights = RewardWeights(),
    match_source: str = "cross",
) -> RewardBreakdown:
    """Combine the three components with the configured weights."""
    total = (
        weights.delta_local * local
        + weights.delta_fix * fix
        + weights.delta_match * match
    )
    return RewardBreakdown(
        local=local,
        fix=fix,
        match=match,
        total=total,
        match_source=match_source,
    )


def pass_at_k(n: int, c: int, k: int) -> float:
    """Probability that at least one of k samples drawn without
    replacement from n attempts, c of them correct, is correct."""
    if not 0 <= c <= n:
        raise ValueError("need 0 <= c <= n")
    if not 1 <= k <= n:
        raise ValueError("need 1 <= k <= n")
    # Exact rational arithmetic; a float difference would already lose
    # ulps on cases as small as (10, 3, 1).
    miss = Fraction(math.comb(n - c, k), math.comb(n, k))
    return float(1 - miss)


def curate_rl_set(
    items: Iterable[tuple[T, float]],
    lo: float = 0.1,
    hi: float = 0.9,
) -> list[T]:
    """Keep problems whose empirical pass rate sits inside [lo, hi]:
    hard enough to teach, easy enough to reward."""
    if not 0.0 <= lo <= hi <= 1.0:
        raise ValueError("need 0 <= lo <= hi <= 1")
    kept = []
    for item, rate in items:
        if not 0.0 <= rate <= 1.0:
            raise ValueError(f"pass rate out of range: {rate!r}")
        if lo <= rate <= hi:
            kept.append(item)
    return kept
