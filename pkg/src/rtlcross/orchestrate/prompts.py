"""Prompt assembly for the two agent roles.

The fixed texts (system prompts, refinement instructions) live as
package data so they can be diffed against committed copies; this module
stitches them together with the per-problem interface description and,
on retry turns, the agent's own previous attempts plus the rendered
mismatch diagnostics.  Peer code never enters a prompt.
"""

from __future__ import annotations

from importlib import resources
from typing import Sequence

ROLES = ("verilog", "reference")

MAX_ATTEMPT_CHARS = 1500
MAX_HISTORY_ATTEMPTS = 2

_CODE_LANG = {"verilog": "verilog", "reference": "python"}
_TRUNCATION_MARKER = {
    "verilog": "// ...(code truncated)...",
    "reference": "# ...(code truncated)...",
}
_ATTEMPT_NOUN = {"verilog": "Verilog", "reference": "Python"}


def _check_role(role: str) -> None:
    if role not in ROLES:
        raise ValueError(f"unknown role {role!r}")


def load_template(name: str) -> str:
    return (resources.files("rtlcross") / "prompts" / name).read_text(
        encoding="utf-8"
    )


def system_prompt(role: str) -> str:
    _check_role(role)
    name = "verilog_system.txt" if role == "verilog" else "reference_system.txt"
    return load_template(name).rstrip("\n")


def refine_instruction(role: str) -> str:
    _check_role(role)
    name = "verilog_refine.txt" if role == "verilog" else "reference_refine.txt"
    return load_template(name).rstrip("\n")


def interface_block(manifest: Sequence[tuple[str, str, int]]) -> str:
    """One line per port: `- input a (10 bits)`, width suffix omitted
    for one-bit ports."""
    lines = []
    for name, direction, width in manifest:
        suffix = "" if width == 1 else f" ({width} bits)"
        lines.append(f"  - {direction} {name}{suffix}")
    return "\n".join(lines)


def verilog_user_prompt(description: str, manifest: Sequence[tuple[str, str, int]]) -> str:
    return (
        "I would like you to implement a module named TopModule with the "
        "following interface. All input and output ports are one bit "
        "unless otherwise specified.\n\n"
        f"{interface_block(manifest)}\n\n"
        f"{description.strip()}"
    )


def reference_user_prompt(
    description: str,
    manifest: Sequence[tuple[str, str, int]],
    skeleton: str,
) -> str:
    return (
        f"{description.strip()}\n\n"
        "Interface (all ports one bit unless otherwise specified):\n"
        f"{interface_block(manifest)}\n\n"
        "Complete this skeleton:\n"
        "```python\n"
        f"{skeleton.rstrip()}\n"
        "```\n\n"
        "Answer:"
    )


def previous_code_fragment(role: str, attempts: Sequence[tuple[int, str]]) -> str:
    """Re-inject the agent's own most recent attempts, each truncated to
    1500 characters with a marker line when cut."""
    _check_role(role)
    if not attempts:
        return ""
    lang = _CODE_LANG[role]
    noun = _ATTEMPT_NOUN[role]
    parts = [f"Your previous {noun} attempts:"]
    for number, code in attempts[-MAX_HISTORY_ATTEMPTS:]:
        body = code.rstrip()
        if len(body) > MAX_ATTEMPT_CHARS:
            body = body[:MAX_ATTEMPT_CHARS] + "\n" + _TRUNCATION_MARKER[role]
        parts.append(f"Attempt {number}:")
        parts.append(f"```{lang}\n{body}\n```")
    return "\n".join(parts)


def error_log_fragment(diagnostics: str) -> str:
    if not diagnostics:
        return ""
    return f"Previous verification error:\n{diagnostics}"


def build_prompt(
    role: str,
    description: str,
    manifest: Sequence[tuple[str, str, int]],
    *,
    skeleton: str = "",
    attempts: Sequence[tuple[int, str]] = (),
    diagnostics: str = "",
) -> tuple[str, str]:
    """Full (system, user) message pair for one role.

    With no attempts and no diagnostics this is the plain single-turn
    prompt; otherwise the previous-code fragment, the error log, and the
    refinement instruction are appended to the user message.
    """
    _check_role(role)
    if role == "verilog":
        user = verilog_user_prompt(description, manifest)
    else:
        user = reference_user_prompt(description, manifest, skeleton)
    fragments = [
        previous_code_fragment(role, attempts),
        error_log_fragment(diagnostics),
    ]
    if any(fragments):
        fragments.append(refine_instruction(role))
        user = "\n\n".join([user] + [f for f in fragments if f])
    return system_prompt(role), user
