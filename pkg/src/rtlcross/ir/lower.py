"""Lowering from the parsed AST to the width-resolved IR.

This pass evaluates parameters, resolves net widths, runs the width and
signedness inference, classifies always blocks into combinational and
clocked processes, and enforces the structural rules that make the
two-state cycle semantics well defined (aligned posedge clocks, at most
one reset, no latches, no combinational feedback, one driver per net).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from rtlcross.diag import Diagnostic, SourceUnit
from rtlcross.ir import order as ir_order
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
    IExpr,
    IExt,
    IfIR,
    INet,
    ISlice,
    IUnary,
    NetIR,
    PortIR,
    ProcIR,
    ResetIR,
    StmtIR,
    Target,
    TBit,
    TConcat,
    TSlice,
    TWhole,
    mask,
    reset_polarity,
)
from rtlcross.vl.ast_nodes import (
    AstAlways,
    AstAssign,
    AstModule,
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
from rtlcross.vl.parser import parse_module

MAX_PORT_WIDTH = 64
MAX_NET_WIDTH = 4096


class LowerError(Exception):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        super().__init__(message)
        self.message = message
        self.line = line
        self.col = col


class NotConst(Exception):
    pass


@dataclass
class LowerResult:
    design: DesignIR | None
    diagnostics: list[Diagnostic] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.design is not None and not any(d.is_error for d in self.diagnostics)


def lower_source(
    source: SourceUnit | str, param_overrides: dict[str, int] | None = None
) -> LowerResult:
    """Parse and lower in one step; all problems land in diagnostics."""
    if isinstance(source, str):
        source = SourceUnit(source)
    parsed = parse_module(source)
    if not parsed.ok:
        return LowerResult(design=None, diagnostics=parsed.diagnostics)
    result = lower_module(
        parsed.module, origin=source.origin, param_overrides=param_overrides
    )
    result.diagnostics = parsed.diagnostics + result.diagnostics
    return result


def lower_module(
    module: AstModule,
    origin: str = "<inline>",
    param_overrides: dict[str, int] | None = None,
) -> LowerResult:
    lowerer = _Lowerer(module, origin, param_overrides)
    try:
        design = lowerer.run()
    except LowerError as exc:
        lowerer.diags.append(
            Diagnostic(
                severity="error",
                message=exc.message,
                line=exc.line,
                column=exc.col,
                origin=origin,
            )
        )
        return LowerResult(design=None, diagnostics=lowerer.diags)
    return LowerResult(design=design, diagnostics=lowerer.diags)


@dataclass
class _BodyInfo:
    targets: list[str] = field(default_factory=list)
    ext_reads: set[str] = field(default_factory=set)
    all_reads: set[str] = field(default_factory=set)
    must_assigned: set[str] = field(default_factory=set)


class _Lowerer:
    def __init__(
        self,
        module: AstModule,
        origin: str,
        param_overrides: dict[str, int] | None = None,
    ):
        self.module = module
        self.origin = origin
        self.overrides = dict(param_overrides or {})
        self.diags: list[Diagnostic] = []
        self.params: dict[str, int] = {}
        self.nets: dict[str, NetIR] = {}
        self.ports: list[PortIR] = []

    def warn(self, message: str, line: int = 0, col: int = 0) -> None:
        self.diags.append(
            Diagnostic(
                severity="warning",
                message=message,
                line=line,
                column=col,
                origin=self.origin,
            )
        )

    # -- driver ----------------------------------------------------------

    def run(self) -> DesignIR:
        self.eval_params()
        self.build_nets()

        procs: list[ProcIR] = []
        infos: list[_BodyInfo] = []
        for item in self.module.items:
            if isinstance(item, AstAssign):
                proc, info = self.lower_continuous(item)
            else:
                proc, info = self.lower_always(item)
            procs.append(proc)
            infos.append(info)

        self.check_drivers(procs, infos)
        self.classify_clocks(procs, infos)
        self.check_latches(procs, infos)

        comb_idx = [i for i, p in enumerate(procs) if p.kind == "comb"]
        try:
            comb_order = ir_order.order_comb(procs, comb_idx)
        except ir_order.CycleError as exc:
            raise LowerError(exc.message) from None

        design = DesignIR(
            name=self.module.name,
            ports=self.ports,
            nets=self.nets,
            procs=procs,
            comb_order=comb_order,
            params=dict(self.params),
        )
        self.check_undriven(design, procs)
        return design

    # -- parameters and nets ---------------------------------------------

    def eval_params(self) -> None:
        for param in self.module.header_params + self.module.body_params:
            if param.name in self.params:
                raise LowerError(
                    f"parameter '{param.name}' defined twice", param.line, param.col
                )
            try:
                value = self.const_value(param.value)
            except NotConst:
                raise LowerError(
                    f"parameter '{param.name}' is not a constant expression",
                    param.line,
                    param.col,
                ) from None
            self.params[param.name] = self.overrides.get(param.name, value)
        unknown = sorted(set(self.overrides) - set(self.params))
        if unknown:
            raise LowerError(f"no parameter '{unknown[0]}' to override")

    def resolve_range(
        self, msb: Expr | None, lsb: Expr | None, what: str, line: int, col: int
    ) -> tuple[int, int, int]:
        """Returns (width, msb, lsb) for a declaration range."""
        if msb is None:
            return 1, 0, 0
        try:
            hi = self.const_value(msb)
            lo = self.const_value(lsb)
        except NotConst:
            raise LowerError(
                f"range of {what} is not constant", line, col
            ) from None
        if lo < 0 or hi < 0:
            raise LowerError(f"range of {what} has a negative bound", line, col)
        if hi < lo:
            raise LowerError(
                f"ascending bit range on {what} is not supported", line, col
            )
        width = hi - lo + 1
        if width > MAX_NET_WIDTH:
            raise LowerError(f"{what} is wider than {MAX_NET_WIDTH} bits", line, col)
        return width, hi, lo

    def build_nets(self) -> None:
        for port in self.module.ports:
            if port.name in self.params:
                raise LowerError(
                    f"'{port.name}' is both a port and a parameter",
                    port.line,
                    port.col,
                )
            width, hi, lo = self.resolve_range(
                port.msb, port.lsb, f"port '{port.name}'", port.line, port.col
            )
            if port.direction == "input" and width > MAX_PORT_WIDTH:
                raise LowerError(
                    f"input port '{port.name}' is wider than {MAX_PORT_WIDTH} bits",
                    port.line,
                    port.col,
                )
            kind = "input" if port.direction == "input" else "output"
            self.nets[port.name] = NetIR(
                name=port.name,
                width=width,
                signed=port.signed,
                kind=kind,
                msb=hi,
                lsb=lo,
            )
            self.ports.append(
                PortIR(
                    name=port.name,
                    direction=port.direction,
                    width=width,
                    signed=port.signed,
                )
            )
        for net in self.module.nets:
            if net.name in self.params:
                raise LowerError(
                    f"'{net.name}' is both a net and a parameter", net.line, net.col
                )
            width, hi, lo = self.resolve_range(
                net.msb, net.lsb, f"net '{net.name}'", net.line, net.col
            )
            self.nets[net.name] = NetIR(
                name=net.name,
                width=width,
                signed=net.signed,
                kind=net.kind,
                msb=hi,
                lsb=lo,
            )
        if not any(p.direction == "output" for p in self.ports):
            raise LowerError(
                f"module '{self.module.name}' has no outputs",
                self.module.line,
                self.module.col,
            )
        # reg-ness of ports comes from the AST merge done in the parser
        for port in self.module.ports:
            if port.kind == "reg":
                old = self.nets[port.name]
                if port.direction == "input":
                    raise LowerError(
                        f"input port '{port.name}' cannot be a reg",
                        port.line,
                        port.col,
                    )
                self.nets[port.name] = NetIR(
                    name=old.name,
                    width=old.width,
                    signed=old.signed,
                    kind="output",
                    msb=old.msb,
                    lsb=old.lsb,
                )

    def is_reg(self, name: str) -> bool:
        net = self.nets[name]
        if net.kind == "reg":
            return True
        if net.kind == "output":
            port = self.module.port(name)
            return port is not None and port.kind == "reg"
        return False

    # -- constant expressions --------------------------------------------

    def const_value(self, e: Expr) -> int:
        """Evaluate a constant expression to a plain integer."""
        value, _ = self.const_pair(e)
        return value

    def const_pair(self, e: Expr) -> tuple[int, int]:
        """(value, width) with value possibly negative; width for packing."""
        if isinstance(e, ENumber):
            width = e.width if e.width is not None else 32
            value = e.value
            if e.signed and e.width is not None and value >> (width - 1) & 1:
                value -= 1 << width
            return value, width
        if isinstance(e, EIdent):
            if e.name in self.params:
                return self.params[e.name], 32
            raise NotConst()
        if isinstance(e, EUnary):
            v, w = self.const_pair(e.operand)
            if e.op == "+":
                return v, w
            if e.op == "-":
                return -v, w
            if e.op == "~":
                return ~v, w
            if e.op == "!":
                return (0 if v else 1), 1
            folded = v & mask(w)
            if e.op in ("&", "~&"):
                r = 1 if folded == mask(w) else 0
                return (r if e.op == "&" else 1 - r), 1
            if e.op in ("|", "~|"):
                r = 1 if folded else 0
                return (r if e.op == "|" else 1 - r), 1
            if e.op in ("^", "~^"):
                r = bin(folded).count("1") & 1
                return (r if e.op == "^" else 1 - r), 1
            raise NotConst()
        if isinstance(e, EBinary):
            lv, lw = self.const_pair(e.left)
            rv, rw = self.const_pair(e.right)
            w = max(lw, rw)
            op = e.op
            if op == "+":
                return lv + rv, w
            if op == "-":
                return lv - rv, w
            if op == "*":
                return lv * rv, w
            if op in ("/", "%"):
                if rv == 0:
                    raise LowerError(
                        "division by zero in constant expression", e.line, e.col
                    )
                q = abs(lv) // abs(rv)
                if (lv < 0) != (rv < 0):
                    q = -q
                if op == "/":
                    return q, w
                return lv - q * rv, w
            if op == "&":
                return lv & rv, w
            if op == "|":
                return lv | rv, w
            if op == "^":
                return lv ^ rv, w
            if op == "<<":
                if rv < 0 or rv > 10_000:
                    raise LowerError("shift amount out of range", e.line, e.col)
                return lv << rv, w
            if op in (">>", ">>>"):
                if rv < 0 or rv > 10_000:
                    raise LowerError("shift amount out of range", e.line, e.col)
                return lv >> rv, w
            if op == "&&":
                return (1 if lv and rv else 0), 1
            if op == "||":
                return (1 if lv or rv else 0), 1
            if op == "==":
                return (1 if lv == rv else 0), 1
            if op == "!=":
                return (1 if lv != rv else 0), 1
            if op == "<":
                return (1 if lv < rv else 0), 1
            if op == "<=":
                return (1 if lv <= rv else 0), 1
            if op == ">":
                return (1 if lv > rv else 0), 1
            if op == ">=":
                return (1 if lv >= rv else 0), 1
            raise NotConst()
        if isinstance(e, ETernary):
            cv, _ = self.const_pair(e.cond)
            return self.const_pair(e.then if cv else e.other)
        if isinstance(e, EConcat):
            value = 0
            total = 0
            for part in e.parts:
                pv, pw = self.const_pair(part)
                value = (value << pw) | (pv & mask(pw))
                total += pw
            return value, total
        if isinstance(e, ERepl):
            count, _ = self.const_pair(e.count)
            if count <= 0:
                raise LowerError(
                    "replication count must be positive", e.line, e.col
                )
            value = 0
            total = 0
            for part in e.parts:
                pv, pw = self.const_pair(part)
                value = (value << pw) | (pv & mask(pw))
                total += pw
            out = 0
            for _ in range(count):
                out = (out << total) | value
            return out, total * count
        raise NotConst()

    def try_const(self, e: Expr) -> int | None:
        try:
            return self.const_value(e)
        except NotConst:
            return None

    # -- width and sign analysis -----------------------------------------

    def lookup_net(self, name: str, line: int, col: int) -> NetIR:
        net = self.nets.get(name)
        if net is None:
            if name in self.params:
                raise LowerError(
                    f"parameter '{name}' cannot be indexed", line, col
                )
            raise LowerError(f"undeclared identifier '{name}'", line, col)
        return net

    def self_width(self, e: Expr) -> int:
        if isinstance(e, ENumber):
            return e.width if e.width is not None else 32
        if isinstance(e, EIdent):
            if e.name in self.params:
                return 32
            return self.lookup_net(e.name, e.line, e.col).width
        if isinstance(e, EUnary):
            if e.op in ("~", "-", "+"):
                return self.self_width(e.operand)
            return 1
        if isinstance(e, EBinary):
            op = e.op
            if op in ("&&", "||", "==", "!=", "<", "<=", ">", ">="):
                return 1
            if op in ("<<", ">>", ">>>"):
                return self.self_width(e.left)
            return max(self.self_width(e.left), self.self_width(e.right))
        if isinstance(e, ETernary):
            return max(self.self_width(e.then), self.self_width(e.other))
        if isinstance(e, EIndex):
            self.lookup_net(e.name, e.line, e.col)
            return 1
        if isinstance(e, ERange):
            _, hi, lo = self.slice_bounds(e)
            return hi - lo + 1
        if isinstance(e, EConcat):
            return sum(self.concat_part_width(p) for p in e.parts)
        if isinstance(e, ERepl):
            count = self.repl_count(e)
            return count * sum(self.concat_part_width(p) for p in e.parts)
        raise LowerError("unsupported expression", getattr(e, "line", 0), getattr(e, "col", 0))

    def concat_part_width(self, e: Expr) -> int:
        if isinstance(e, ENumber) and e.width is None:
            raise LowerError(
                "unsized literal inside a concatenation", e.line, e.col
            )
        return self.self_width(e)

    def repl_count(self, e: ERepl) -> int:
        count = self.try_const(e.count)
        if count is None:
            raise LowerError(
                "replication count must be constant", e.line, e.col
            )
        if count <= 0:
            raise LowerError("replication count must be positive", e.line, e.col)
        inner = sum(self.concat_part_width(p) for p in e.parts)
        if count * inner > MAX_NET_WIDTH:
            raise LowerError("replication result is too wide", e.line, e.col)
        return count

    def self_signed(self, e: Expr) -> bool:
        if isinstance(e, ENumber):
            return e.signed
        if isinstance(e, EIdent):
            if e.name in self.params:
                return True
            return self.lookup_net(e.name, e.line, e.col).signed
        if isinstance(e, EUnary):
            if e.op in ("~", "-", "+"):
                return self.self_signed(e.operand)
            return False
        if isinstance(e, EBinary):
            op = e.op
            if op in ("&&", "||", "==", "!=", "<", "<=", ">", ">="):
                return False
            if op in ("<<", ">>", ">>>"):
                return self.self_signed(e.left)
            return self.self_signed(e.left) and self.self_signed(e.right)
        if isinstance(e, ETernary):
            return self.self_signed(e.then) and self.self_signed(e.other)
        return False  # selects, concats, replications are unsigned

    def slice_bounds(self, e: ERange) -> tuple[NetIR, int, int]:
        net = self.lookup_net(e.name, e.line, e.col)
        hi = self.try_const(e.msb)
        lo = self.try_const(e.lsb)
        if hi is None or lo is None:
            raise LowerError(
                "part-select bounds must be constant", e.line, e.col
            )
        if hi < lo:
            raise LowerError(
                f"part-select [{hi}:{lo}] is ascending", e.line, e.col
            )
        if lo < net.lsb or hi > net.msb:
            raise LowerError(
                f"part-select [{hi}:{lo}] is outside '{net.name}'"
                f"[{net.msb}:{net.lsb}]",
                e.line,
                e.col,
            )
        return net, hi, lo

    # -- expression lowering ---------------------------------------------

    def widen(self, ir: IExpr, width: int, sign_ctx: bool) -> IExpr:
        if ir.width == width:
            return ir
        if ir.width > width:
            raise LowerError("internal width inference error")
        if isinstance(ir, IConst):
            value = ir.value
            if sign_ctx and value >> (ir.width - 1) & 1:
                value |= mask(width) ^ mask(ir.width)
            return IConst(value=value, width=width, signed=sign_ctx)
        return IExt(child=ir, width=width, sign_extend=sign_ctx, signed=sign_ctx)

    def lower_self_det(self, e: Expr) -> IExpr:
        return self.lower_ctx(e, self.self_width(e), self.self_signed(e))

    def lower_ctx(self, e: Expr, width: int, sign_ctx: bool) -> IExpr:
        if isinstance(e, ENumber):
            if e.xz_mask:
                raise LowerError(
                    "don't-care digits are only allowed in casez labels",
                    e.line,
                    e.col,
                )
            w0 = e.width if e.width is not None else 32
            value = e.value & mask(w0)
            node = IConst(value=value, width=w0, signed=e.signed)
            return self.widen(node, width, sign_ctx)
        if isinstance(e, EIdent):
            if e.name in self.params:
                node = IConst(
                    value=self.params[e.name] & mask(32), width=32, signed=True
                )
                return self.widen(node, width, sign_ctx)
            net = self.lookup_net(e.name, e.line, e.col)
            node = INet(name=net.name, width=net.width, signed=net.signed)
            return self.widen(node, width, sign_ctx)
        if isinstance(e, EUnary):
            if e.op in ("~", "-", "+"):
                inner = self.lower_ctx(e.operand, width, sign_ctx)
                return IUnary(op=e.op, operand=inner, width=width, signed=sign_ctx)
            inner = self.lower_self_det(e.operand)
            node = IUnary(op=e.op, operand=inner, width=1)
            return self.widen(node, width, sign_ctx)
        if isinstance(e, EBinary):
            op = e.op
            if op in ("+", "-", "*", "/", "%", "&", "|", "^"):
                left = self.lower_ctx(e.left, width, sign_ctx)
                right = self.lower_ctx(e.right, width, sign_ctx)
                return IBinary(
                    op=op, left=left, right=right, width=width, signed=sign_ctx
                )
            if op in ("<<", ">>", ">>>"):
                left = self.lower_ctx(e.left, width, sign_ctx)
                amount = self.lower_self_det(e.right)
                return IBinary(
                    op=op, left=left, right=amount, width=width, signed=sign_ctx
                )
            if op in ("==", "!=", "<", "<=", ">", ">="):
                cw = max(self.self_width(e.left), self.self_width(e.right))
                cs = self.self_signed(e.left) and self.self_signed(e.right)
                left = self.lower_ctx(e.left, cw, cs)
                right = self.lower_ctx(e.right, cw, cs)
                node = IBinary(
                    op=op, left=left, right=right, width=1, cmp_signed=cs
                )
                return self.widen(node, width, sign_ctx)
            if op in ("&&", "||"):
                left = self.lower_self_det(e.left)
                right = self.lower_self_det(e.right)
                node = IBinary(op=op, left=left, right=right, width=1)
                return self.widen(node, width, sign_ctx)
            raise LowerError(f"unsupported operator '{op}'", e.line, e.col)
        if isinstance(e, ETernary):
            cond = self.lower_self_det(e.cond)
            then = self.lower_ctx(e.then, width, sign_ctx)
            other = self.lower_ctx(e.other, width, sign_ctx)
            return ICond(
                cond=cond, then=then, other=other, width=width, signed=sign_ctx
            )
        if isinstance(e, EIndex):
            net = self.lookup_net(e.name, e.line, e.col)
            idx = self.try_const(e.index)
            if idx is not None and not (net.lsb <= idx <= net.msb):
                raise LowerError(
                    f"bit index {idx} is outside '{net.name}'"
                    f"[{net.msb}:{net.lsb}]",
                    e.line,
                    e.col,
                )
            index_ir = self.lower_self_det(e.index)
            node = IBit(name=net.name, index=index_ir, offset=net.lsb)
            return self.widen(node, width, sign_ctx)
        if isinstance(e, ERange):
            net, hi, lo = self.slice_bounds(e)
            node = ISlice(
                name=net.name,
                msb=hi,
                lsb=lo,
                offset=net.lsb,
                width=hi - lo + 1,
            )
            return self.widen(node, width, sign_ctx)
        if isinstance(e, EConcat):
            parts = tuple(self.lower_concat_part(p) for p in e.parts)
            total = sum(p.width for p in parts)
            node = IConcat(parts=parts, width=total)
            return self.widen(node, width, sign_ctx)
        if isinstance(e, ERepl):
            count = self.repl_count(e)
            parts = tuple(self.lower_concat_part(p) for p in e.parts)
            node = IConcat(parts=parts * count, width=count * sum(p.width for p in parts))
            return self.widen(node, width, sign_ctx)
        raise LowerError(
            "unsupported expression", getattr(e, "line", 0), getattr(e, "col", 0)
        )

    def lower_concat_part(self, e: Expr) -> IExpr:
        if isinstance(e, ENumber) and e.width is None:
            raise LowerError(
                "unsized literal inside a concatenation", e.line, e.col
            )
        return self.lower_self_det(e)

    # -- statement lowering ----------------------------------------------

    def lower_target(self, e: Expr, procedural: bool) -> Target:
        if isinstance(e, EIdent):
            net = self.lookup_target_net(e)
            self.check_target_kind(net, procedural, e.line, e.col)
            return TWhole(name=net.name, width=net.width)
        if isinstance(e, EIndex):
            net = self.lookup_target_net(e)
            self.check_target_kind(net, procedural, e.line, e.col)
            idx = self.try_const(e.index)
            if idx is not None and not (net.lsb <= idx <= net.msb):
                raise LowerError(
                    f"bit index {idx} is outside '{net.name}'"
                    f"[{net.msb}:{net.lsb}]",
                    e.line,
                    e.col,
                )
            return TBit(name=net.name, index=self.lower_self_det(e.index), offset=net.lsb)
        if isinstance(e, ERange):
            net, hi, lo = self.slice_bounds(e)
            self.check_target_kind(net, procedural, e.line, e.col)
            return TSlice(
                name=net.name, msb=hi, lsb=lo, offset=net.lsb, width=hi - lo + 1
            )
        if isinstance(e, EConcat):
            parts = tuple(self.lower_target(p, procedural) for p in e.parts)
            seen: set[str] = set()
            for part in parts:
                for name in _target_names(part):
                    if name in seen:
                        raise LowerError(
                            f"'{name}' appears twice in a concatenation target",
                            e.line,
                            e.col,
                        )
                    seen.add(name)
            return TConcat(parts=parts, width=sum(p.width for p in parts))
        raise LowerError(
            "invalid assignment target", getattr(e, "line", 0), getattr(e, "col", 0)
        )

    def lookup_target_net(self, e: Expr) -> NetIR:
        name = e.name  # type: ignore[union-attr]
        if name in self.params:
            raise LowerError(f"assignment to parameter '{name}'", e.line, e.col)
        return self.lookup_net(name, e.line, e.col)

    def check_target_kind(
        self, net: NetIR, procedural: bool, line: int, col: int
    ) -> None:
        if net.kind == "input":
            raise LowerError(f"assignment to input port '{net.name}'", line, col)
        reg = self.is_reg(net.name)
        if procedural and not reg:
            raise LowerError(
                f"procedural assignment to wire '{net.name}'; declare it as reg",
                line,
                col,
            )
        if not procedural and reg:
            raise LowerError(
                f"continuous assignment to reg '{net.name}'", line, col
            )

    def lower_stmt(self, s: Stmt, comb: bool, out: list[StmtIR]) -> None:
        if isinstance(s, SBlock):
            for inner in s.stmts:
                self.lower_stmt(inner, comb, out)
            return
        if isinstance(s, SAssign):
            blocking = s.blocking
            if comb and not blocking:
                raise LowerError(
                    "non-blocking assignment in a combinational block",
                    s.line,
                    s.col,
                )
            if not comb and blocking:
                self.warn(
                    "blocking assignment in a clocked block is treated as "
                    "non-blocking",
                    s.line,
                    s.col,
                )
                blocking = False
            target = self.lower_target(s.target, procedural=True)
            region_w = max(_target_width(target), self.self_width(s.rhs))
            rhs = self.lower_ctx(s.rhs, region_w, self.self_signed(s.rhs))
            out.append(AssignIR(target=target, rhs=rhs, blocking=blocking))
            return
        if isinstance(s, SIf):
            cond = self.lower_self_det(s.cond)
            node = IfIR(cond=cond)
            self.lower_stmt(s.then, comb, node.then)
            if s.other is not None:
                self.lower_stmt(s.other, comb, node.other)
            out.append(node)
            return
        if isinstance(s, SCase):
            out.append(self.lower_case(s, comb))
            return
        raise LowerError("unsupported statement", getattr(s, "line", 0), getattr(s, "col", 0))

    def lower_case(self, s: SCase, comb: bool) -> StmtIR:
        widths = [self.self_width(s.subject)]
        signs = [self.self_signed(s.subject)]
        label_const: dict[int, tuple[int, int] | None] = {}
        all_const = True
        labels_flat: list[Expr] = []
        for item in s.items:
            if item.labels is None:
                continue
            for lab in item.labels:
                widths.append(self.self_width(lab))
                signs.append(self.self_signed(lab))
                labels_flat.append(lab)
                if isinstance(lab, ENumber):
                    label_const[id(lab)] = (lab.value, lab.xz_mask, lab.width, lab.signed)  # type: ignore[assignment]
                else:
                    cval = self.try_const(lab)
                    if cval is None:
                        all_const = False
                        if s.kind == "casez":
                            raise LowerError(
                                "casez labels must be constants", lab.line, lab.col
                            )
                    label_const[id(lab)] = None if cval is None else (cval, 0, None, True)  # type: ignore[assignment]

        case_w = max(widths)
        case_s = all(signs)
        subject_ir = self.lower_ctx(s.subject, case_w, case_s)

        if all_const:
            arms: list[ArmIR] = []
            for item in s.items:
                if item.labels is None:
                    arm = ArmIR(patterns=None)
                else:
                    patterns = []
                    for lab in item.labels:
                        patterns.append(
                            self.label_pattern(lab, label_const[id(lab)], case_w, case_s)
                        )
                    arm = ArmIR(patterns=patterns)
                self.lower_stmt(item.body, comb, arm.body)
                arms.append(arm)
            return CaseIR(subject=subject_ir, arms=arms)

        # Some labels are nets: rewrite the case as an if/else chain.
        chain_root: IfIR | None = None
        chain_tail: IfIR | None = None
        default_body: list[StmtIR] = []
        has_default = False
        for item in s.items:
            if item.labels is None:
                has_default = True
                self.lower_stmt(item.body, comb, default_body)
                continue
            conds = []
            for lab in item.labels:
                lab_ir = self.lower_ctx(lab, case_w, case_s)
                conds.append(
                    IBinary(
                        op="==",
                        left=subject_ir,
                        right=lab_ir,
                        width=1,
                        cmp_signed=case_s,
                    )
                )
            cond: IExpr = conds[0]
            for extra in conds[1:]:
                cond = IBinary(op="||", left=cond, right=extra, width=1)
            node = IfIR(cond=cond)
            self.lower_stmt(item.body, comb, node.then)
            if chain_tail is None:
                chain_root = chain_tail = node
            else:
                chain_tail.other.append(node)
                chain_tail = node
        if chain_root is None:
            # Only a default arm: the body runs unconditionally.
            wrapper = IfIR(cond=IConst(value=1, width=1), then=default_body)
            return wrapper
        if has_default and chain_tail is not None:
            chain_tail.other.extend(default_body)
        return chain_root

    def label_pattern(
        self,
        lab: Expr,
        info: tuple | None,
        case_w: int,
        case_s: bool,
    ) -> tuple[int, int]:
        if info is None:
            raise LowerError("case label is not constant", lab.line, lab.col)
        value, xz, lit_width, lit_signed = info
        w0 = lit_width if lit_width is not None else 32
        value &= mask(w0)
        xz &= mask(w0)
        if w0 < case_w:
            if case_s and lit_signed and value >> (w0 - 1) & 1:
                value |= mask(case_w) ^ mask(w0)
        else:
            value &= mask(case_w)
            xz &= mask(case_w)
        care = mask(case_w) & ~xz
        return value & care, care

    # -- items -----------------------------------------------------------

    def lower_continuous(self, item: AstAssign) -> tuple[ProcIR, _BodyInfo]:
        target = self.lower_target(item.target, procedural=False)
        region_w = max(_target_width(target), self.self_width(item.rhs))
        rhs = self.lower_ctx(item.rhs, region_w, self.self_signed(item.rhs))
        body: list[StmtIR] = [AssignIR(target=target, rhs=rhs, blocking=True)]
        proc = ProcIR(kind="comb", body=body, line=item.line)
        info = analyze_body(body)
        proc.targets = info.targets
        proc.ext_reads = sorted(info.ext_reads)
        return proc, info

    def lower_always(self, item: AstAlways) -> tuple[ProcIR, _BodyInfo]:
        is_comb = not item.edges
        body: list[StmtIR] = []
        self.lower_stmt(item.body, comb=is_comb, out=body)
        proc = ProcIR(kind="comb" if is_comb else "seq", body=body, line=item.line)
        info = analyze_body(body)
        proc.targets = info.targets
        proc.ext_reads = sorted(info.ext_reads)
        if not is_comb:
            self.classify_edges(item, proc, info)
        return proc, info

    def classify_edges(
        self, item: AstAlways, proc: ProcIR, info: _BodyInfo
    ) -> None:
        edges = item.edges
        if len(edges) > 2:
            raise LowerError(
                "sensitivity list has more than two edges", item.line, item.col
            )
        if len(edges) == 1:
            edge = edges[0]
            if edge.kind != "posedge":
                raise LowerError(
                    "negedge clocking is not supported", edge.line, edge.col
                )
            proc.clock = edge.signal
            proc.reset = None
            return
        first, second = edges
        candidates = [e for e in edges if reset_polarity(e.signal) is not None]
        if len(candidates) == 1:
            reset_edge = candidates[0]
        else:
            reset_edge = self.reset_from_body(item, proc)
            if reset_edge is None:
                raise LowerError(
                    "cannot tell the clock from the reset in the sensitivity "
                    "list; use a conventional reset name",
                    item.line,
                    item.col,
                )
        clock_edge = second if reset_edge is first else first
        if clock_edge.kind != "posedge":
            raise LowerError(
                "negedge clocking is not supported", clock_edge.line, clock_edge.col
            )
        active_low = reset_edge.kind == "negedge"
        named = reset_polarity(reset_edge.signal)
        if named is not None and named != active_low:
            self.warn(
                f"reset '{reset_edge.signal}' edge polarity disagrees with "
                "its name; the edge wins",
                reset_edge.line,
                reset_edge.col,
            )
        proc.clock = clock_edge.signal
        proc.reset = ResetIR(name=reset_edge.signal, active_low=active_low)

    def reset_from_body(self, item: AstAlways, proc: ProcIR):
        body = item.body
        while isinstance(body, SBlock) and len(body.stmts) == 1:
            body = body.stmts[0]
        if not isinstance(body, SIf):
            return None
        cond_nets: set[str] = set()
        _ast_idents(body.cond, cond_nets)
        edge_names = {e.signal for e in item.edges}
        hits = cond_nets & edge_names
        if len(hits) == 1:
            name = hits.pop()
            for e in item.edges:
                if e.signal == name:
                    return e
        return None

    # -- design-level checks ---------------------------------------------

    def check_drivers(self, procs: list[ProcIR], infos: list[_BodyInfo]) -> None:
        # net -> list of (proc index, whole-or-dynamic, const ranges)
        drivers: dict[str, list[tuple[int, bool, list[tuple[int, int]]]]] = {}
        for i, (proc, info) in enumerate(zip(procs, infos)):
            per_net: dict[str, tuple[bool, list[tuple[int, int]]]] = {}
            for st in _iter_assigns(proc.body):
                for tgt in _leaf_targets(st.target):
                    name = tgt.name
                    whole, ranges = per_net.get(name, (False, []))
                    if isinstance(tgt, TWhole):
                        whole = True
                    elif isinstance(tgt, TSlice):
                        ranges.append((tgt.msb, tgt.lsb))
                    elif isinstance(tgt, TBit) and isinstance(tgt.index, IConst):
                        ranges.append((tgt.index.value, tgt.index.value))
                    else:
                        whole = True  # dynamic bit counts as a full driver
                    per_net[name] = (whole, ranges)
            for name, (whole, ranges) in per_net.items():
                drivers.setdefault(name, []).append((i, whole, ranges))

        for name, lst in drivers.items():
            if len(lst) <= 1:
                continue
            # Multiple continuous assigns may drive disjoint constant slices;
            # anything else is a multiple-driver error.
            if any(whole for _, whole, _ in lst) or any(
                not _is_plain_assign(procs[i]) for i, _, _ in lst
            ):
                line = procs[lst[1][0]].line
                raise LowerError(
                    f"'{name}' is driven from more than one place", line, 0
                )
            covered: list[tuple[int, int]] = []
            for _, _, ranges in lst:
                covered.extend(ranges)
            covered.sort(key=lambda r: r[1])
            for (amsb, _alsb), (_bmsb, blsb) in zip(covered, covered[1:]):
                if amsb >= blsb:
                    line = procs[lst[1][0]].line
                    raise LowerError(
                        f"bits of '{name}' are driven more than once", line, 0
                    )

    def classify_clocks(self, procs: list[ProcIR], infos: list[_BodyInfo]) -> None:
        # Every clock fires on every evaluated cycle, so several clock
        # signals are fine; they just alias the same edge.
        clocks: list[str] = []
        for p in procs:
            if p.kind == "seq" and p.clock is not None and p.clock not in clocks:
                clocks.append(p.clock)
        resets = {p.reset for p in procs if p.kind == "seq" and p.reset is not None}
        if len(resets) > 1:
            names = ", ".join(sorted(r.name for r in resets))
            raise LowerError(f"more than one reset signal: {names}")
        if not clocks:
            return
        for clock in clocks:
            net = self.nets.get(clock)
            if net is None or net.kind != "input":
                raise LowerError(f"clock '{clock}' must be an input port")
            if net.width != 1:
                raise LowerError(f"clock '{clock}' must be one bit wide")
        for reset in resets:
            rnet = self.nets.get(reset.name)
            if rnet is None or rnet.kind != "input":
                raise LowerError(f"reset '{reset.name}' must be an input port")
            if rnet.width != 1:
                raise LowerError(f"reset '{reset.name}' must be one bit wide")
        for proc, info in zip(procs, infos):
            for clock in clocks:
                if clock in info.all_reads:
                    raise LowerError(
                        f"clock '{clock}' is read as data", proc.line, 0
                    )

    def check_latches(self, procs: list[ProcIR], infos: list[_BodyInfo]) -> None:
        for proc, info in zip(procs, infos):
            if proc.kind != "comb":
                continue
            for name in info.targets:
                if name not in info.must_assigned:
                    raise LowerError(
                        f"latch inferred for '{name}': it is not assigned on "
                        "every path through the combinational block; assign a "
                        "default value first",
                        proc.line,
                        0,
                    )
            for name in info.targets:
                if name in info.ext_reads:
                    raise LowerError(
                        f"combinational feedback on '{name}'", proc.line, 0
                    )

    def check_undriven(self, design: DesignIR, procs: list[ProcIR]) -> None:
        driven: set[str] = set()
        for proc in procs:
            driven.update(proc.targets)
        read: set[str] = set()
        for proc in procs:
            read.update(proc.ext_reads)
        for net in design.nets.values():
            if net.kind == "input" or net.name in driven:
                continue
            if net.kind == "output":
                self.warn(f"output '{net.name}' is never driven; it reads as 0")
            elif net.name in read:
                self.warn(f"'{net.name}' is read but never driven; it reads as 0")


# ---------------------------------------------------------------------------
# Body analysis helpers


def _target_width(t: Target) -> int:
    return t.width


def _target_names(t: Target) -> list[str]:
    if isinstance(t, TConcat):
        out: list[str] = []
        for p in t.parts:
            out.extend(_target_names(p))
        return out
    return [t.name]


def _leaf_targets(t: Target):
    if isinstance(t, TConcat):
        for p in t.parts:
            yield from _leaf_targets(p)
    else:
        yield t


def _whole_assigned(t: Target) -> list[str]:
    if isinstance(t, TWhole):
        return [t.name]
    if isinstance(t, TConcat):
        out: list[str] = []
        for p in t.parts:
            out.extend(_whole_assigned(p))
        return out
    return []


def _iter_assigns(stmts: list[StmtIR]):
    for st in stmts:
        if isinstance(st, AssignIR):
            yield st
        elif isinstance(st, IfIR):
            yield from _iter_assigns(st.then)
            yield from _iter_assigns(st.other)
        elif isinstance(st, CaseIR):
            for arm in st.arms:
                yield from _iter_assigns(arm.body)


def _is_plain_assign(proc: ProcIR) -> bool:
    return (
        proc.kind == "comb"
        and len(proc.body) == 1
        and isinstance(proc.body[0], AssignIR)
    )


def _expr_nets(e: IExpr, into: set[str]) -> None:
    if isinstance(e, INet):
        into.add(e.name)
    elif isinstance(e, IBit):
        into.add(e.name)
        _expr_nets(e.index, into)
    elif isinstance(e, ISlice):
        into.add(e.name)
    elif isinstance(e, IExt):
        _expr_nets(e.child, into)
    elif isinstance(e, IUnary):
        _expr_nets(e.operand, into)
    elif isinstance(e, IBinary):
        _expr_nets(e.left, into)
        _expr_nets(e.right, into)
    elif isinstance(e, ICond):
        _expr_nets(e.cond, into)
        _expr_nets(e.then, into)
        _expr_nets(e.other, into)
    elif isinstance(e, IConcat):
        for p in e.parts:
            _expr_nets(p, into)


def analyze_body(body: list[StmtIR]) -> _BodyInfo:
    info = _BodyInfo()

    def note_read(e: IExpr, assigned: set[str]) -> None:
        nets: set[str] = set()
        _expr_nets(e, nets)
        info.all_reads.update(nets)
        info.ext_reads.update(n for n in nets if n not in assigned)

    def note_target(t: Target, assigned: set[str]) -> None:
        if isinstance(t, TConcat):
            for p in t.parts:
                note_target(p, assigned)
            return
        name = t.name
        if name not in info.targets:
            info.targets.append(name)
        if isinstance(t, TBit):
            note_read(t.index, assigned)
            if name not in assigned:
                info.all_reads.add(name)
                info.ext_reads.add(name)
        elif isinstance(t, TSlice):
            if name not in assigned:
                info.all_reads.add(name)
                info.ext_reads.add(name)

    def walk(stmts: list[StmtIR], assigned: set[str]) -> set[str]:
        for st in stmts:
            if isinstance(st, AssignIR):
                note_read(st.rhs, assigned)
                note_target(st.target, assigned)
                assigned.update(_whole_assigned(st.target))
            elif isinstance(st, IfIR):
                note_read(st.cond, assigned)
                a_then = walk(st.then, set(assigned))
                a_other = walk(st.other, set(assigned))
                assigned = a_then & a_other
            elif isinstance(st, CaseIR):
                note_read(st.subject, assigned)
                has_default = any(arm.patterns is None for arm in st.arms)
                arm_sets = [walk(arm.body, set(assigned)) for arm in st.arms]
                if has_default and arm_sets:
                    merged = arm_sets[0]
                    for s in arm_sets[1:]:
                        merged = merged & s
                    assigned = merged
        return assigned

    info.must_assigned = walk(body, set())
    return info


def _ast_idents(e: Expr, into: set[str]) -> None:
    if isinstance(e, EIdent):
        into.add(e.name)
    elif isinstance(e, EUnary):
        _ast_idents(e.operand, into)
    elif isinstance(e, EBinary):
        _ast_idents(e.left, into)
        _ast_idents(e.right, into)
    elif isinstance(e, ETernary):
        _ast_idents(e.cond, into)
        _ast_idents(e.then, into)
        _ast_idents(e.other, into)
    elif isinstance(e, EIndex):
        into.add(e.name)
        _ast_idents(e.index, into)
    elif isinstance(e, ERange):
        into.add(e.name)
    elif isinstance(e, EConcat):
        for p in e.parts:
            _ast_idents(p, into)
    elif isinstance(e, ERepl):
        for p in e.parts:
            _ast_idents(p, into)
