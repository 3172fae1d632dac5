"""Multi-turn orchestration of a Verilog agent and a Python
reference-model agent verified against each other.

The two agents never see each other's code.  Each turn both sample
candidates, every cross pairing is verified differentially, the best
pair is selected, and mismatch diagnostics (values only) feed the next
turn's prompts.  Group-relative advantage utilities for policy updates
live in `groups`.
"""

from rtlcross.orchestrate.agents import (
    AgentEndpoint,
    AgentError,
    ChatAgent,
    MockAgent,
    ScriptedAgent,
    extract_code,
    make_agent,
)
from rtlcross.orchestrate.groups import (
    XGrpoTurn,
    clipped_objective,
    group_advantages,
    sample_xgrpo_turn,
)
from rtlcross.orchestrate.prompts import build_prompt, refine_instruction, system_prompt
from rtlcross.orchestrate.session import (
    Candidate,
    CandidateEvaluator,
    IsolationError,
    Problem,
    SessionConfig,
    SessionResult,
    TurnRecord,
    run_session,
    select_best_pair,
)

__all__ = [
    "AgentEndpoint",
    "AgentError",
    "Candidate",
    "CandidateEvaluator",
    "ChatAgent",
    "IsolationError",
    "MockAgent",
    "Problem",
    "ScriptedAgent",
    "SessionConfig",
    "SessionResult",
    "TurnRecord",
    "XGrpoTurn",
    "build_prompt",
    "clipped_objective",
    "extract_code",
    "group_advantages",
    "make_agent",
    "refine_instruction",
    "run_session",
    "sample_xgrpo_turn",
    "select_best_pair",
    "system_prompt",
]
