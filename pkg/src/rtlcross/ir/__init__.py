"""Width-resolved intermediate representation and lowering."""

from rtlcross.ir.lower import LowerResult, lower_module, lower_source
from rtlcross.ir.nodes import (
    ArmIR,
    AssignIR,
    CaseIR,
    DesignIR,
    IBinary,
    IBit,
    ICond,
    IConcat,
    IConst,
    IExt,
    IfIR,
    INet,
    ISlice,
    IUnary,
    NetIR,
    PortIR,
    ProcIR,
    ResetIR,
    TBit,
    TConcat,
    TSlice,
    TWhole,
)
from rtlcross.ir.printer import canonical_text, fingerprint

__all__ = [
    "ArmIR",
    "AssignIR",
    "CaseIR",
    "DesignIR",
    "IBinary",
    "IBit",
    "ICond",
    "IConcat",
    "IConst",
    "IExt",
    "IfIR",
    "INet",
    "ISlice",
    "IUnary",
    "LowerResult",
    "NetIR",
    "PortIR",
    "ProcIR",
    "ResetIR",
    "TBit",
    "TConcat",
    "TSlice",
    "TWhole",
    "canonical_text",
    "fingerprint",
    "lower_module",
    "lower_source",
]
