"""Recursive-descent parser for the supported Verilog subset.

Produces an AstModule plus diagnostics. Constructs outside the subset
(instantiation, generate, delays, initial blocks, loops, x literals, ...)
are rejected with a positioned message rather than silently mis-read.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from rtlcross.diag import Diagnostic, SourceUnit
from rtlcross.vl.ast_nodes import (
    AstAlways,
    AstAssign,
    AstEdge,
    AstModule,
    AstNet,
    AstParam,
    AstPort,
    CaseItem,
    EBinary,
    EConcat,
    EIdent,
    EIndex,
    ENumber,
    ERange,
    ERepl,
    ETernary,
    EUnary,
    Expr,
    SAssign,
    SBlock,
    SCase,
    SIf,
    Stmt,
)
from rtlcross.vl.lexer import LexError, tokenize
from rtlcross.vl.tokens import T, Token
from rtlcross.vl.validate import UnsupportedFeature, validate_subset


class ParseError(Exception):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(message)
        self.message = message
        self.line = line
        self.col = col


@dataclass
class ParseResult:
    module: AstModule | None
    diagnostics: list[Diagnostic] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.module is not None and not any(d.is_error for d in self.diagnostics)


def parse_module(source: SourceUnit | str) -> ParseResult:
    """Parse one module. Never raises; problems land in diagnostics."""
    if isinstance(source, str):
        source = SourceUnit(source)
    try:
        tokens = tokenize(source.text)
        module = _Parser(tokens).parse()
    except (LexError, ParseError, UnsupportedFeature) as exc:
        diag = Diagnostic(
            severity="error",
            message=exc.message,
            line=exc.line,
            column=exc.col,
            origin=source.origin,
        )
        return ParseResult(module=None, diagnostics=[diag])
    diags = validate_subset(module, origin=source.origin)
    return ParseResult(module=module, diagnostics=diags)


# Binary operator precedence tiers, loosest first. Each tier maps token
# type to the operator spelling stored on EBinary.
_BINARY_TIERS: list[dict[T, str]] = [
    {T.LOR: "||"},
    {T.LAND: "&&"},
    {T.PIPE: "|"},
    {T.CARET: "^"},
    {T.AMP: "&"},
    {T.EQ: "==", T.NEQ: "!="},
    {T.LT: "<", T.LE: "<=", T.GT: ">", T.GE: ">="},
    {T.LSHIFT: "<<", T.RSHIFT: ">>", T.ARSHIFT: ">>>"},
    {T.PLUS: "+", T.MINUS: "-"},
    {T.STAR: "*", T.SLASH: "/", T.PERCENT: "%"},
]

_UNSUPPORTED_ITEMS: dict[T, str] = {
    T.INITIAL: "initial block",
    T.GENERATE: "generate block",
    T.GENVAR: "genvar declaration",
    T.FUNCTION: "function declaration",
    T.TASK: "task declaration",
    T.DEFPARAM: "defparam",
    T.SPECIFY: "specify block",
    T.INTEGER: "integer variable",
    T.REAL: "real variable",
}

_UNSUPPORTED_STMTS: dict[T, str] = {
    T.FOR: "for loop",
    T.WHILE: "while loop",
    T.REPEAT: "repeat loop",
    T.FOREVER: "forever loop",
    T.WAIT: "wait statement",
    T.CASEX: "casex statement",
}


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    # -- token helpers ----------------------------------------------------

    def peek(self, offset: int = 0) -> Token:
        idx = min(self.pos + offset, len(self.tokens) - 1)
        return self.tokens[idx]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.type is not T.EOF:
            self.pos += 1
        return tok

    def check(self, ttype: T) -> bool:
        return self.peek().type is ttype

    def match(self, *ttypes: T) -> Token | None:
        if self.peek().type in ttypes:
            return self.advance()
        return None

    def expect(self, ttype: T, what: str) -> Token:
        tok = self.peek()
        if tok.type is not ttype:
            shown = tok.value if tok.value else tok.type.name.lower()
            raise ParseError(f"expected {what}, found {shown!r}", tok.line, tok.col)
        return self.advance()

    def fail(self, message: str, tok: Token | None = None) -> ParseError:
        tok = tok or self.peek()
        return ParseError(message, tok.line, tok.col)

    def unsupported(self, construct: str, tok: Token | None = None) -> UnsupportedFeature:
        tok = tok or self.peek()
        return UnsupportedFeature(construct, tok.line, tok.col)

    # -- module -----------------------------------------------------------

    def parse(self) -> AstModule:
        mod_tok = self.expect(T.MODULE, "'module'")
        name = self.expect(T.IDENT, "module name").value
        module = AstModule(name=name, ports=[], line=mod_tok.line, col=mod_tok.col)

        if self.check(T.HASH):
            self.advance()
            self.parse_param_header(module)

        undeclared: list[str] = []  # non-ANSI port names awaiting a direction
        if self.match(T.LPAREN):
            self.parse_port_list(module, undeclared)
            self.expect(T.RPAREN, "')'")
        self.expect(T.SEMI, "';' after module header")

        while not self.check(T.ENDMODULE):
            if self.check(T.EOF):
                raise self.fail("missing 'endmodule'")
            self.parse_module_item(module, undeclared)

        end_tok = self.expect(T.ENDMODULE, "'endmodule'")
        for pname in undeclared:
            if module.port(pname) is None:
                raise ParseError(
                    f"port '{pname}' is never given a direction",
                    end_tok.line,
                    end_tok.col,
                )
        if not self.check(T.EOF):
            raise self.unsupported("multiple modules in one source")
        return module

    def parse_param_header(self, module: AstModule) -> None:
        self.expect(T.LPAREN, "'(' after '#'")
        while True:
            if self.check(T.PARAMETER):
                self.advance()
            if self.check(T.LBRACKET):
                raise self.unsupported("ranged parameter")
            if self.check(T.SIGNED):
                raise self.unsupported("signed parameter")
            name_tok = self.expect(T.IDENT, "parameter name")
            self.expect(T.ASSIGN_OP, "'=' in parameter")
            value = self.parse_expr()
            module.header_params.append(
                AstParam(
                    name=name_tok.value,
                    value=value,
                    is_localparam=False,
                    line=name_tok.line,
                    col=name_tok.col,
                )
            )
            if not self.match(T.COMMA):
                break
        self.expect(T.RPAREN, "')' after parameters")

    def parse_port_list(self, module: AstModule, undeclared: list[str]) -> None:
        if self.check(T.RPAREN):
            return
        ansi = self.peek().type in (T.INPUT, T.OUTPUT, T.INOUT)
        if ansi:
            last: AstPort | None = None
            while True:
                last = self.parse_ansi_port(module, last)
                if not self.match(T.COMMA):
                    break
        else:
            while True:
                tok = self.expect(T.IDENT, "port name")
                if tok.value in undeclared:
                    raise ParseError(
                        f"duplicate port '{tok.value}'", tok.line, tok.col
                    )
                undeclared.append(tok.value)
                if not self.match(T.COMMA):
                    break

    def parse_ansi_port(self, module: AstModule, last: AstPort | None) -> AstPort:
        tok = self.peek()
        if tok.type is T.INOUT:
            raise self.unsupported("inout port")
        if tok.type in (T.INPUT, T.OUTPUT):
            direction = self.advance().value
            kind = "wire"
            if self.match(T.REG):
                kind = "reg"
            elif self.match(T.WIRE):
                pass
            signed = self.match(T.SIGNED) is not None
            msb, lsb = self.parse_opt_range()
            name_tok = self.expect(T.IDENT, "port name")
            port = AstPort(
                direction=direction,
                name=name_tok.value,
                kind=kind,
                signed=signed,
                msb=msb,
                lsb=lsb,
                line=name_tok.line,
                col=name_tok.col,
            )
        else:
            # Bare name continues the previous port declaration.
            if last is None:
                raise self.fail("expected port direction")
            name_tok = self.expect(T.IDENT, "port name")
            port = AstPort(
                direction=last.direction,
                name=name_tok.value,
                kind=last.kind,
                signed=last.signed,
                msb=last.msb,
                lsb=last.lsb,
                line=name_tok.line,
                col=name_tok.col,
            )
        if module.port(port.name) is not None:
            raise ParseError(f"duplicate port '{port.name}'", port.line, port.col)
        module.ports.append(port)
        return port

    def parse_opt_range(self) -> tuple[Expr | None, Expr | None]:
        if not self.match(T.LBRACKET):
            return None, None
        msb = self.parse_expr()
        self.expect(T.COLON, "':' in range")
        lsb = self.parse_expr()
        self.expect(T.RBRACKET, "']' after range")
        return msb, lsb

    # -- module items -----------------------------------------------------

    def parse_module_item(self, module: AstModule, undeclared: list[str]) -> None:
        tok = self.peek()
        if tok.type in _UNSUPPORTED_ITEMS:
            raise self.unsupported(_UNSUPPORTED_ITEMS[tok.type])
        if tok.type in (T.INPUT, T.OUTPUT, T.INOUT):
            self.parse_port_decl(module, undeclared)
        elif tok.type in (T.WIRE, T.REG):
            self.parse_net_decl(module)
        elif tok.type in (T.PARAMETER, T.LOCALPARAM):
            self.parse_param_item(module)
        elif tok.type is T.ASSIGN:
            self.parse_assign_item(module)
        elif tok.type is T.ALWAYS:
            self.parse_always_item(module)
        elif tok.type is T.IDENT:
            raise self.unsupported("module instantiation")
        elif tok.type is T.SYS_IDENT:
            raise self.unsupported(f"system task {tok.value}")
        else:
            shown = tok.value if tok.value else tok.type.name.lower()
            raise self.fail(f"unexpected {shown!r} at module level")

    def parse_port_decl(self, module: AstModule, undeclared: list[str]) -> None:
        tok = self.advance()
        if tok.type is T.INOUT:
            raise self.unsupported("inout port", tok)
        direction = tok.value
        kind = "wire"
        if self.match(T.REG):
            kind = "reg"
        elif self.match(T.WIRE):
            pass
        signed = self.match(T.SIGNED) is not None
        msb, lsb = self.parse_opt_range()
        while True:
            name_tok = self.expect(T.IDENT, "port name")
            name = name_tok.value
            if name not in undeclared:
                raise ParseError(
                    f"'{name}' is not listed in the module header",
                    name_tok.line,
                    name_tok.col,
                )
            if module.port(name) is not None:
                raise ParseError(
                    f"port '{name}' declared twice", name_tok.line, name_tok.col
                )
            module.ports.append(
                AstPort(
                    direction=direction,
                    name=name,
                    kind=kind,
                    signed=signed,
                    msb=msb,
                    lsb=lsb,
                    line=name_tok.line,
                    col=name_tok.col,
                )
            )
            if not self.match(T.COMMA):
                break
        self.expect(T.SEMI, "';' after port declaration")
        # Keep header order for the final port list.
        module.ports.sort(key=lambda p: undeclared.index(p.name) if p.name in undeclared else -1)

    def parse_net_decl(self, module: AstModule) -> None:
        kind_tok = self.advance()
        kind = kind_tok.value
        signed = self.match(T.SIGNED) is not None
        msb, lsb = self.parse_opt_range()
        while True:
            name_tok = self.expect(T.IDENT, "net name")
            name = name_tok.value
            port = module.port(name)
            if port is not None:
                # A separate reg/wire declaration refines an existing port.
                if kind == "reg":
                    port.kind = "reg"
                if signed:
                    port.signed = True
                if msb is not None and port.msb is not None and (msb, lsb) != (port.msb, port.lsb):
                    raise ParseError(
                        f"range of '{name}' differs from its port declaration",
                        name_tok.line,
                        name_tok.col,
                    )
                if msb is not None and port.msb is None:
                    port.msb, port.lsb = msb, lsb
            else:
                if any(n.name == name for n in module.nets):
                    raise ParseError(
                        f"net '{name}' declared twice", name_tok.line, name_tok.col
                    )
                module.nets.append(
                    AstNet(
                        kind=kind,
                        name=name,
                        signed=signed,
                        msb=msb,
                        lsb=lsb,
                        line=name_tok.line,
                        col=name_tok.col,
                    )
                )
            if self.check(T.ASSIGN_OP):
                eq_tok = self.advance()
                if kind == "reg":
                    raise self.unsupported("reg declaration initializer", eq_tok)
                rhs = self.parse_expr()
                module.items.append(
                    AstAssign(
                        target=EIdent(name, line=name_tok.line, col=name_tok.col),
                        rhs=rhs,
                        line=name_tok.line,
                        col=name_tok.col,
                    )
                )
            if not self.match(T.COMMA):
                break
        self.expect(T.SEMI, "';' after net declaration")

    def parse_param_item(self, module: AstModule) -> None:
        kw = self.advance()
        is_local = kw.type is T.LOCALPARAM
        if self.check(T.LBRACKET):
            raise self.unsupported("ranged parameter")
        if self.check(T.SIGNED):
            raise self.unsupported("signed parameter")
        while True:
            name_tok = self.expect(T.IDENT, "parameter name")
            self.expect(T.ASSIGN_OP, "'=' in parameter")
            value = self.parse_expr()
            module.body_params.append(
                AstParam(
                    name=name_tok.value,
                    value=value,
                    is_localparam=is_local,
                    line=name_tok.line,
                    col=name_tok.col,
                )
            )
            if not self.match(T.COMMA):
                break
        self.expect(T.SEMI, "';' after parameter")

    def parse_assign_item(self, module: AstModule) -> None:
        kw = self.advance()
        if self.check(T.HASH):
            raise self.unsupported("delay control")
        while True:
            target = self.parse_lvalue()
            self.expect(T.ASSIGN_OP, "'=' in assign")
            rhs = self.parse_expr()
            module.items.append(
                AstAssign(target=target, rhs=rhs, line=kw.line, col=kw.col)
            )
            if not self.match(T.COMMA):
                break
        self.expect(T.SEMI, "';' after assign")

    def parse_always_item(self, module: AstModule) -> None:
        kw = self.advance()
        if self.check(T.HASH):
            raise self.unsupported("delay control")
        if not self.check(T.AT):
            raise self.unsupported("always block without sensitivity list", kw)
        self.advance()
        edges = self.parse_sensitivity()
        body = self.parse_stmt()
        module.items.append(AstAlways(edges=edges, body=body, line=kw.line, col=kw.col))

    def parse_sensitivity(self) -> list[AstEdge]:
        # @* without parentheses
        if self.match(T.STAR):
            return []
        self.expect(T.LPAREN, "'(' after '@'")
        if self.match(T.STAR):
            self.expect(T.RPAREN, "')' after '*'")
            return []
        edges: list[AstEdge] = []
        level_names = False
        while True:
            tok = self.peek()
            if tok.type in (T.POSEDGE, T.NEGEDGE):
                kind = self.advance().value
                sig = self.expect(T.IDENT, "signal after edge keyword")
                edges.append(AstEdge(kind=kind, signal=sig.value, line=tok.line, col=tok.col))
            elif tok.type is T.IDENT:
                # Explicit level-sensitive list; treated as combinational.
                self.advance()
                level_names = True
            else:
                raise self.fail("expected sensitivity item")
            if not self.match(T.OR_KW) and not self.match(T.COMMA):
                break
        self.expect(T.RPAREN, "')' after sensitivity list")
        if edges and level_names:
            raise ParseError(
                "sensitivity list mixes edges with plain signals",
                self.peek().line,
                self.peek().col,
            )
        return edges

    # -- statements -------------------------------------------------------

    def parse_stmt(self) -> Stmt:
        tok = self.peek()
        if tok.type in _UNSUPPORTED_STMTS:
            raise self.unsupported(_UNSUPPORTED_STMTS[tok.type])
        if tok.type is T.HASH:
            raise self.unsupported("delay control")
        if tok.type is T.AT:
            raise self.unsupported("event control inside a statement")
        if tok.type is T.SYS_IDENT:
            raise self.unsupported(f"system task {tok.value}")
        if tok.type is T.BEGIN:
            self.advance()
            if self.check(T.COLON):
                self.advance()
                self.expect(T.IDENT, "block label")
            stmts: list[Stmt] = []
            while not self.check(T.END):
                if self.check(T.EOF):
                    raise self.fail("missing 'end'")
                stmts.append(self.parse_stmt())
            self.advance()
            return SBlock(stmts=stmts, line=tok.line, col=tok.col)
        if tok.type is T.SEMI:
            self.advance()
            return SBlock(stmts=[], line=tok.line, col=tok.col)
        if tok.type is T.IF:
            self.advance()
            self.expect(T.LPAREN, "'(' after 'if'")
            cond = self.parse_expr()
            self.expect(T.RPAREN, "')' after condition")
            then = self.parse_stmt()
            other: Stmt | None = None
            if self.match(T.ELSE):
                other = self.parse_stmt()
            return SIf(cond=cond, then=then, other=other, line=tok.line, col=tok.col)
        if tok.type in (T.CASE, T.CASEZ):
            return self.parse_case()
        if tok.type in (T.IDENT, T.LBRACE):
            target = self.parse_lvalue()
            op = self.peek()
            if op.type is T.ASSIGN_OP:
                self.advance()
                blocking = True
            elif op.type is T.LE:
                self.advance()
                blocking = False
            else:
                raise self.fail("expected '=' or '<=' after assignment target")
            if self.check(T.HASH):
                raise self.unsupported("delay control")
            rhs = self.parse_expr()
            self.expect(T.SEMI, "';' after assignment")
            return SAssign(
                target=target, rhs=rhs, blocking=blocking, line=tok.line, col=tok.col
            )
        shown = tok.value if tok.value else tok.type.name.lower()
        raise self.fail(f"unexpected {shown!r} in statement position")

    def parse_case(self) -> SCase:
        kw = self.advance()
        kind = kw.value
        self.expect(T.LPAREN, "'(' after 'case'")
        subject = self.parse_expr()
        self.expect(T.RPAREN, "')' after case subject")
        items: list[CaseItem] = []
        saw_default = False
        while not self.check(T.ENDCASE):
            if self.check(T.EOF):
                raise self.fail("missing 'endcase'")
            item_tok = self.peek()
            if self.match(T.DEFAULT):
                if saw_default:
                    raise ParseError(
                        "multiple default arms in case", item_tok.line, item_tok.col
                    )
                saw_default = True
                self.match(T.COLON)
                body = self.parse_stmt()
                items.append(CaseItem(labels=None, body=body, line=item_tok.line, col=item_tok.col))
            else:
                labels = [self.parse_expr()]
                while self.match(T.COMMA):
                    labels.append(self.parse_expr())
                self.expect(T.COLON, "':' after case label")
                body = self.parse_stmt()
                items.append(
                    CaseItem(labels=labels, body=body, line=item_tok.line, col=item_tok.col)
                )
        self.advance()
        return SCase(kind=kind, subject=subject, items=items, line=kw.line, col=kw.col)

    def parse_lvalue(self) -> Expr:
        tok = self.peek()
        if tok.type is T.LBRACE:
            self.advance()
            parts = [self.parse_lvalue()]
            while self.match(T.COMMA):
                parts.append(self.parse_lvalue())
            self.expect(T.RBRACE, "'}' after concatenation target")
            return EConcat(parts=parts, line=tok.line, col=tok.col)
        name_tok = self.expect(T.IDENT, "assignment target")
        if self.check(T.LBRACKET):
            self.check_indexed_select()
            self.advance()
            first = self.parse_expr()
            if self.match(T.COLON):
                lsb = self.parse_expr()
                self.expect(T.RBRACKET, "']' after part-select")
                return ERange(
                    name=name_tok.value, msb=first, lsb=lsb,
                    line=name_tok.line, col=name_tok.col,
                )
            self.expect(T.RBRACKET, "']' after bit-select")
            return EIndex(
                name=name_tok.value, index=first, line=name_tok.line, col=name_tok.col
            )
        return EIdent(name=name_tok.value, line=name_tok.line, col=name_tok.col)

    def check_indexed_select(self) -> None:
        """Reject [base +: w] / [base -: w] with a targeted message."""
        depth = 0
        k = self.pos
        while k < len(self.tokens):
            t = self.tokens[k]
            if t.type is T.LBRACKET:
                depth += 1
            elif t.type is T.RBRACKET:
                depth -= 1
                if depth == 0:
                    return
            elif t.type is T.SEMI or t.type is T.EOF:
                return
            elif depth == 1 and t.type in (T.PLUS, T.MINUS):
                nxt = self.tokens[min(k + 1, len(self.tokens) - 1)]
                if nxt.type is T.COLON:
                    raise UnsupportedFeature("indexed part-select", t.line, t.col)
            k += 1

    # -- expressions ------------------------------------------------------

    def parse_expr(self) -> Expr:
        return self.parse_ternary()

    def parse_ternary(self) -> Expr:
        cond = self.parse_binary(0)
        if self.check(T.QUESTION):
            q = self.advance()
            then = self.parse_ternary()
            self.expect(T.COLON, "':' in conditional")
            other = self.parse_ternary()
            return ETernary(cond=cond, then=then, other=other, line=q.line, col=q.col)
        return cond

    def parse_binary(self, tier: int) -> Expr:
        if tier >= len(_BINARY_TIERS):
            return self.parse_unary()
        ops = _BINARY_TIERS[tier]
        left = self.parse_binary(tier + 1)
        while self.peek().type in ops:
            op_tok = self.advance()
            right = self.parse_binary(tier + 1)
            left = EBinary(
                op=ops[op_tok.type], left=left, right=right,
                line=op_tok.line, col=op_tok.col,
            )
        return left

    def parse_unary(self) -> Expr:
        tok = self.peek()
        unary_map = {
            T.PLUS: "+", T.MINUS: "-", T.BANG: "!", T.TILDE: "~",
            T.AMP: "&", T.PIPE: "|", T.CARET: "^",
        }
        if tok.type is T.TILDE and self.peek(1).type in (T.AMP, T.PIPE, T.CARET):
            self.advance()
            second = self.advance()
            op = "~" + {T.AMP: "&", T.PIPE: "|", T.CARET: "^"}[second.type]
            operand = self.parse_unary()
            return EUnary(op=op, operand=operand, line=tok.line, col=tok.col)
        if tok.type in unary_map:
            self.advance()
            operand = self.parse_unary()
            return EUnary(op=unary_map[tok.type], operand=operand, line=tok.line, col=tok.col)
        if tok.type in (T.CASE_EQ, T.CASE_NEQ):
            raise self.unsupported(f"operator {tok.value}")
        return self.parse_primary()

    def parse_primary(self) -> Expr:
        tok = self.peek()
        if tok.type is T.NUMBER:
            return self.parse_number()
        if tok.type is T.STRING:
            raise self.unsupported("string literal")
        if tok.type is T.SYS_IDENT:
            raise self.unsupported(f"system function {tok.value}")
        if tok.type is T.IDENT:
            name_tok = self.advance()
            nxt = self.peek()
            if nxt.type is T.LPAREN:
                raise self.unsupported("function call", name_tok)
            if nxt.type is T.DOT:
                raise self.unsupported("hierarchical reference", name_tok)
            if nxt.type is T.LBRACKET:
                self.check_indexed_select()
                self.advance()
                first = self.parse_expr()
                if self.match(T.COLON):
                    lsb = self.parse_expr()
                    self.expect(T.RBRACKET, "']' after part-select")
                    return ERange(
                        name=name_tok.value, msb=first, lsb=lsb,
                        line=name_tok.line, col=name_tok.col,
                    )
                self.expect(T.RBRACKET, "']' after bit-select")
                return EIndex(
                    name=name_tok.value, index=first,
                    line=name_tok.line, col=name_tok.col,
                )
            return EIdent(name=name_tok.value, line=name_tok.line, col=name_tok.col)
        if tok.type is T.LPAREN:
            self.advance()
            inner = self.parse_expr()
            self.expect(T.RPAREN, "')'")
            return inner
        if tok.type is T.LBRACE:
            return self.parse_concat()
        shown = tok.value if tok.value else tok.type.name.lower()
        raise self.fail(f"expected expression, found {shown!r}")

    def parse_concat(self) -> Expr:
        open_tok = self.advance()
        first = self.parse_expr()
        if self.check(T.LBRACE):
            # Replication: {count{item, item, ...}}
            self.advance()
            parts = [self.parse_expr()]
            while self.match(T.COMMA):
                parts.append(self.parse_expr())
            self.expect(T.RBRACE, "'}' closing replication body")
            self.expect(T.RBRACE, "'}' closing replication")
            return ERepl(count=first, parts=parts, line=open_tok.line, col=open_tok.col)
        parts = [first]
        while self.match(T.COMMA):
            parts.append(self.parse_expr())
        self.expect(T.RBRACE, "'}' after concatenation")
        return EConcat(parts=parts, line=open_tok.line, col=open_tok.col)

    def parse_number(self) -> ENumber:
        tok = self.advance()
        raw = tok.value
        if "'" not in raw and self.check(T.NUMBER) and self.peek().value.startswith("'"):
            # Size and base lexed apart ("4 'b0011"); stitch them together.
            raw += self.advance().value
        return decode_number(raw, tok.line, tok.col)


def decode_number(raw: str, line: int, col: int) -> ENumber:
    """Decode a literal's spelling into value/width/sign/don't-care mask."""
    if "'" not in raw:
        digits = raw.replace("_", "")
        if not digits.isdigit():
            raise ParseError(f"malformed number {raw!r}", line, col)
        # Plain decimals are signed 32-bit values in the source language.
        return ENumber(value=int(digits), width=None, signed=True, line=line, col=col)

    size_part, rest = raw.split("'", 1)
    width: int | None = None
    if size_part:
        width = int(size_part.replace("_", ""))
        if width <= 0:
            raise ParseError("literal width must be positive", line, col)
    signed = False
    if rest and rest[0].lower() == "s":
        signed = True
        rest = rest[1:]
    if not rest:
        raise ParseError(f"malformed number {raw!r}", line, col)
    base_char = rest[0].lower()
    digits = rest[1:].replace("_", "")
    if not digits:
        raise ParseError(f"based literal {raw!r} has no digits", line, col)

    radix = {"b": 2, "o": 8, "d": 10, "h": 16}[base_char]
    bits_per_digit = {2: 1, 8: 3, 16: 4}.get(radix, 0)
    value = 0
    xz_mask = 0
    for ch in digits:
        low = ch.lower()
        if low == "x":
            raise UnsupportedFeature("x literal digit", line, col)
        if low in ("z", "?"):
            if radix == 10:
                raise ParseError(
                    "z digit is not allowed in a decimal literal", line, col
                )
            value = value << bits_per_digit
            xz_mask = (xz_mask << bits_per_digit) | ((1 << bits_per_digit) - 1)
            continue
        try:
            digit = int(ch, radix)
        except ValueError:
            raise ParseError(
                f"digit {ch!r} is not valid in base {radix}", line, col
            ) from None
        if radix == 10:
            value = value * 10 + digit
            if xz_mask:
                raise ParseError(
                    "z digit is not allowed in a decimal literal", line, col
                )
        else:
            value = (value << bits_per_digit) | digit
            xz_mask <<= bits_per_digit
    if width is not None:
        mask = (1 << width) - 1
        value &= mask
        xz_mask &= mask
    return ENumber(
        value=value, width=width, signed=signed, xz_mask=xz_mask, line=line, col=col
    )
