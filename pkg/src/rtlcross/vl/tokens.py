"""Token types for the supported Verilog subset."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum, auto


class T(Enum):
    # Literals
    NUMBER = auto()         # 42, 8'hFF, 4'b10?1 (maskable digits only in casez labels)
    STRING = auto()         # "..." (lexed so skipping works; never accepted by the grammar)
    IDENT = auto()
    SYS_IDENT = auto()      # $display and friends

    # Keywords
    MODULE = auto()
    ENDMODULE = auto()
    INPUT = auto()
    OUTPUT = auto()
    INOUT = auto()
    WIRE = auto()
    REG = auto()
    INTEGER = auto()
    REAL = auto()
    PARAMETER = auto()
    LOCALPARAM = auto()
    ASSIGN = auto()
    ALWAYS = auto()
    INITIAL = auto()
    BEGIN = auto()
    END = auto()
    IF = auto()
    ELSE = auto()
    CASE = auto()
    CASEX = auto()
    CASEZ = auto()
    ENDCASE = auto()
    DEFAULT = auto()
    FOR = auto()
    WHILE = auto()
    REPEAT = auto()
    FOREVER = auto()
    GENERATE = auto()
    ENDGENERATE = auto()
    GENVAR = auto()
    FUNCTION = auto()
    ENDFUNCTION = auto()
    TASK = auto()
    ENDTASK = auto()
    POSEDGE = auto()
    NEGEDGE = auto()
    OR_KW = auto()          # "or" inside sensitivity lists
    SIGNED = auto()
    WAIT = auto()
    DEFPARAM = auto()
    SPECIFY = auto()
    ENDSPECIFY = auto()

    # Operators
    PLUS = auto()
    MINUS = auto()
    STAR = auto()
    SLASH = auto()
    PERCENT = auto()
    AMP = auto()
    PIPE = auto()
    CARET = auto()
    TILDE = auto()
    BANG = auto()
    LSHIFT = auto()
    RSHIFT = auto()
    ARSHIFT = auto()        # >>>
    LAND = auto()
    LOR = auto()
    EQ = auto()             # ==
    NEQ = auto()            # !=
    CASE_EQ = auto()        # === (lexed for error reporting; out of subset)
    CASE_NEQ = auto()       # !==
    LT = auto()
    LE = auto()             # <= (also the non-blocking assignment arrow)
    GT = auto()
    GE = auto()
    QUESTION = auto()
    COLON = auto()
    AT = auto()
    HASH = auto()

    # Delimiters
    LPAREN = auto()
    RPAREN = auto()
    LBRACKET = auto()
    RBRACKET = auto()
    LBRACE = auto()
    RBRACE = auto()
    SEMI = auto()
    COMMA = auto()
    DOT = auto()
    ASSIGN_OP = auto()      # =

    EOF = auto()


@dataclass(frozen=True)
class Token:
    type: T
    value: str
    line: int
    col: int

    def __repr__(self) -> str:  # pragma: no cover - debug aid
        return f"Token({self.type.name}, {self.value!r}, L{self.line}:{self.col})"


KEYWORDS: dict[str, T] = {
    "module": T.MODULE,
    "endmodule": T.ENDMODULE,
    "input": T.INPUT,
    "output": T.OUTPUT,
    "inout": T.INOUT,
    "wire": T.WIRE,
    "reg": T.REG,
    "integer": T.INTEGER,
    "real": T.REAL,
    "parameter": T.PARAMETER,
    "localparam": T.LOCALPARAM,
    "assign": T.ASSIGN,
    "always": T.ALWAYS,
    "initial": T.INITIAL,
    "begin": T.BEGIN,
    "end": T.END,
    "if": T.IF,
    "else": T.ELSE,
    "case": T.CASE,
    "casex": T.CASEX,
    "casez": T.CASEZ,
    "endcase": T.ENDCASE,
    "default": T.DEFAULT,
    "for": T.FOR,
    "while": T.WHILE,
    "repeat": T.REPEAT,
    "forever": T.FOREVER,
    "generate": T.GENERATE,
    "endgenerate": T.ENDGENERATE,
    "genvar": T.GENVAR,
    "function": T.FUNCTION,
    "endfunction": T.ENDFUNCTION,
    "task": T.TASK,
    "endtask": T.ENDTASK,
    "posedge": T.POSEDGE,
    "negedge": T.NEGEDGE,
    "or": T.OR_KW,
    "signed": T.SIGNED,
    "wait": T.WAIT,
    "defparam": T.DEFPARAM,
    "specify": T.SPECIFY,
    "endspecify": T.ENDSPECIFY,
}
