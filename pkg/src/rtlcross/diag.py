"""Source units and positioned diagnostics shared across the pipeline."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class SourceUnit:
    """A piece of Verilog source text plus a label for diagnostics."""

    text: str
    origin: str = "<inline>"

    @classmethod
    def from_file(cls, path: str) -> "SourceUnit":
        with open(path, "r", encoding="utf-8") as fh:
            return cls(text=fh.read(), origin=path)


@dataclass(frozen=True)
class Diagnostic:
    """A positioned message. ``error`` severity aborts lowering."""

    severity: str  # "error" | "warning"
    message: str
    line: int = 1
    column: int = 1
    origin: str = "<inline>"

    def __str__(self) -> str:
        return f"{self.origin}:{self.line}:{self.column}: {self.severity}: {self.message}"

    @property
    def is_error(self) -> bool:
        return self.severity == "error"


def has_errors(diags: list[Diagnostic]) -> bool:
    return any(d.is_error for d in diags)


@dataclass
class DiagnosticSink:
    """Collects diagnostics during a pipeline stage."""

    origin: str = "<inline>"
    items: list[Diagnostic] = field(default_factory=list)

    def error(self, message: str, line: int = 1, column: int = 1) -> Diagnostic:
        d = Diagnostic("error", message, line, column, self.origin)
        self.items.append(d)
        return d

    def warning(self, message: str, line: int = 1, column: int = 1) -> Diagnostic:
        d = Diagnostic("warning", message, line, column, self.origin)
        self.items.append(d)
        return d

    @property
    def failed(self) -> bool:
        return has_errors(self.items)
