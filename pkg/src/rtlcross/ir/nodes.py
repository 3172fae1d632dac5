"""Width-resolved IR node definitions.

Every expression node carries the width it evaluates at and its
signedness. Widening is explicit (IExt), so evaluation never has to
re-derive context rules; lowering settles them once.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

# ---------------------------------------------------------------------------
# Expressions


@dataclass(frozen=True)
class IConst:
    value: int  # already masked to width
    width: int
    signed: bool = False


@dataclass(frozen=True)
class INet:
    name: str
    width: int
    signed: bool = False


@dataclass(frozen=True)
class IBit:
    """Dynamic bit-select; offset is the declared lsb of the net."""

    name: str
    index: "IExpr"
    offset: int = 0
    width: int = 1
    signed: bool = False


@dataclass(frozen=True)
class ISlice:
    """Constant part-select in declared bit positions (msb >= lsb)."""

    name: str
    msb: int
    lsb: int
    offset: int = 0
    width: int = 0
    signed: bool = False


@dataclass(frozen=True)
class IExt:
    """Widen child from child.width to width, sign-extending when asked."""

    child: "IExpr"
    width: int
    sign_extend: bool = False
    signed: bool = False


@dataclass(frozen=True)
class IUnary:
    # "~" "-" "+" keep the operand width; "!" and the reductions
    # "&" "|" "^" "~&" "~|" "~^" produce one bit from a self-sized operand.
    op: str
    operand: "IExpr"
    width: int
    signed: bool = False


@dataclass(frozen=True)
class IBinary:
    # Arithmetic and bitwise ops evaluate at width with both operands
    # already widened. Comparisons produce one bit; cmp_signed records
    # whether operand bits are compared as two's-complement values.
    op: str
    left: "IExpr"
    right: "IExpr"
    width: int
    signed: bool = False
    cmp_signed: bool = False


@dataclass(frozen=True)
class ICond:
    cond: "IExpr"
    then: "IExpr"
    other: "IExpr"
    width: int
    signed: bool = False


@dataclass(frozen=True)
class IConcat:
    parts: tuple["IExpr", ...]  # most significant part first
    width: int
    signed: bool = False


IExpr = Union[IConst, INet, IBit, ISlice, IExt, IUnary, IBinary, ICond, IConcat]


# ---------------------------------------------------------------------------
# Assignment targets


@dataclass(frozen=True)
class TWhole:
    name: str
    width: int


@dataclass(frozen=True)
class TBit:
    name: str
    index: IExpr
    offset: int = 0
    width: int = 1


@dataclass(frozen=True)
class TSlice:
    name: str
    msb: int
    lsb: int
    offset: int = 0
    width: int = 0


@dataclass(frozen=True)
class TConcat:
    parts: tuple["Target", ...]  # most significant part first
    width: int = 0


Target = Union[TWhole, TBit, TSlice, TConcat]


# ---------------------------------------------------------------------------
# Statements and processes


@dataclass
class AssignIR:
    target: Target
    rhs: IExpr
    blocking: bool = True


@dataclass
class IfIR:
    cond: IExpr
    then: list["StmtIR"] = field(default_factory=list)
    other: list["StmtIR"] = field(default_factory=list)


@dataclass
class ArmIR:
    # patterns is None for the default arm; each pattern is
    # (value, care_mask) at the case comparison width.
    patterns: list[tuple[int, int]] | None
    body: list["StmtIR"] = field(default_factory=list)


@dataclass
class CaseIR:
    subject: IExpr
    arms: list[ArmIR] = field(default_factory=list)


StmtIR = Union[AssignIR, IfIR, CaseIR]


@dataclass(frozen=True)
class ResetIR:
    name: str
    active_low: bool


@dataclass
class ProcIR:
    kind: str  # "comb" or "seq"
    body: list[StmtIR]
    clock: str | None = None
    reset: ResetIR | None = None
    targets: list[str] = field(default_factory=list)  # dedup, first-write order
    ext_reads: list[str] = field(default_factory=list)  # sorted
    line: int = 0


@dataclass(frozen=True)
class NetIR:
    name: str
    width: int
    signed: bool
    kind: str  # "input" | "output" | "wire" | "reg"
    msb: int = 0
    lsb: int = 0


@dataclass(frozen=True)
class PortIR:
    name: str
    direction: str  # "input" | "output"
    width: int
    signed: bool = False


@dataclass
class DesignIR:
    name: str
    ports: list[PortIR]
    nets: dict[str, NetIR]
    procs: list[ProcIR]
    comb_order: list[int]  # indices into procs, evaluation order
    params: dict[str, int] = field(default_factory=dict)

    @property
    def inputs(self) -> list[PortIR]:
        return [p for p in self.ports if p.direction == "input"]

    @property
    def outputs(self) -> list[PortIR]:
        return [p for p in self.ports if p.direction == "output"]

    @property
    def seq_procs(self) -> list[ProcIR]:
        return [p for p in self.procs if p.kind == "seq"]

    @property
    def is_sequential(self) -> bool:
        return any(p.kind == "seq" for p in self.procs)

    @property
    def clock_names(self) -> tuple[str, ...]:
        """Distinct clock signals, first-use order. All of them fire on
        every evaluated cycle."""
        seen: list[str] = []
        for p in self.procs:
            if p.kind == "seq" and p.clock is not None and p.clock not in seen:
                seen.append(p.clock)
        return tuple(seen)

    @property
    def reset(self) -> ResetIR | None:
        for p in self.procs:
            if p.kind == "seq" and p.reset is not None:
                return p.reset
        return None

    @property
    def data_inputs(self) -> list[PortIR]:
        """Input ports excluding clocks; the harness implies the edges."""
        clocks = set(self.clock_names)
        return [p for p in self.inputs if p.name not in clocks]

    def reset_port(self) -> ResetIR | None:
        """The reset input, from the sensitivity lists or, for synchronous
        resets, from the port naming convention."""
        found = self.reset
        if found is not None:
            return found
        clocks = set(self.clock_names)
        for p in self.inputs:
            if p.name in clocks or p.width != 1:
                continue
            pol = reset_polarity(p.name)
            if pol is not None:
                return ResetIR(name=p.name, active_low=pol)
        return None


_RESET_BASES = ("rst", "reset", "areset", "arst")


def reset_polarity(name: str) -> bool | None:
    """None if the name does not look like a reset; else True for active-low."""
    lower = name.lower()
    for suffix in ("_n", "_ni", "n"):
        if lower.endswith(suffix) and lower[: -len(suffix)] in _RESET_BASES:
            return True
    if lower in _RESET_BASES:
        return False
    return None


def mask(width: int) -> int:
    return (1 << width) - 1


def to_signed(value: int, width: int) -> int:
    value &= mask(width)
    if value & (1 << (width - 1)):
        return value - (1 << width)
    return value
