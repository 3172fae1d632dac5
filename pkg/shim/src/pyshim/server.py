"""Line-oriented command loop hosting one Python model at a time.

Protocol summary (one JSON object per line, both directions):

    {"cmd": "load", "source_path": "...", "ports": [{"name": "q",
     "dir": "output", "width": 8}, ...]}
        -> {"ok": true}
        -> {"ok": false, "stage": "compile", "detail": "..."}
    {"cmd": "eval", "inputs": {"a": 5, ...}}
        -> {"outputs": {"q": 3, ...}}
        -> {"error": {"stage": "runtime" | "port", "cycle": 7,
            "detail": "..."}}
    {"cmd": "quit"}
        -> {"ok": true} and the process exits

A malformed or unknown frame draws {"error": {"stage": "protocol",
"detail": "..."}} and the session keeps serving.  All integers on the
wire are non-negative decimals; output values are masked to the widths
given at load time before they are sent back.
"""

from __future__ import annotations

import builtins
import functools
import io
import json
import sys
import tempfile
from typing import TextIO

# Names the hosted model may use.  Enough for arithmetic, container
# bookkeeping, and class definition; no filesystem or import machinery.
_ALLOWED_BUILTINS = [
    "__build_class__",
    "abs",
    "all",
    "any",
    "bin",
    "bool",
    "bytes",
    "chr",
    "dict",
    "divmod",
    "enumerate",
    "filter",
    "float",
    "format",
    "frozenset",
    "getattr",
    "hasattr",
    "hash",
    "hex",
    "int",
    "isinstance",
    "issubclass",
    "iter",
    "len",
    "list",
    "map",
    "max",
    "min",
    "next",
    "object",
    "oct",
    "ord",
    "pow",
    "property",
    "range",
    "repr",
    "reversed",
    "round",
    "set",
    "setattr",
    "slice",
    "sorted",
    "staticmethod",
    "str",
    "sum",
    "super",
    "tuple",
    "type",
    "zip",
    "ArithmeticError",
    "AssertionError",
    "AttributeError",
    "Exception",
    "IndexError",
    "KeyError",
    "LookupError",
    "NotImplementedError",
    "OverflowError",
    "RuntimeError",
    "StopIteration",
    "TypeError",
    "ValueError",
    "ZeroDivisionError",
    "False",
    "None",
    "True",
]


def _model_builtins() -> dict:
    allowed = {}
    for name in _ALLOWED_BUILTINS:
        obj = getattr(builtins, name, None)
        if obj is not None or name == "None":
            allowed[name] = obj
    # Keep stdout clean: a chatty model prints to stderr instead.
    allowed["print"] = functools.partial(print, file=sys.stderr)
    return allowed


def _protocol_error(detail: str) -> dict:
    return {"error": {"stage": "protocol", "detail": detail}}


class ShimSession:
    """State for one served connection: the loaded model, its output
    manifest, and the running cycle counter."""

    def __init__(self) -> None:
        self.model = None
        self.outputs: list[tuple[str, int]] = []
        self.cycle = 0

    def handle(self, frame: object) -> dict:
        """Dispatch one decoded frame and return the reply object."""
        if not isinstance(frame, dict):
            return _protocol_error("frame is not an object")
        cmd = frame.get("cmd")
        if cmd == "load":
            return self.load(frame)
        if cmd == "eval":
            return self.eval_frame(frame)
        if cmd == "quit":
            return {"ok": True}
        return _protocol_error(f"unknown command {cmd!r}")

    def load(self, frame: dict) -> dict:
        # Drop any previous model first so a failed load leaves a
        # clean session rather than a stale one.
        self.model = None
        self.outputs = []
        self.cycle = 0

        path = frame.get("source_path")
        ports = frame.get("ports")
        if not isinstance(path, str):
            return _protocol_error("load needs a source_path string")
        if not isinstance(ports, list):
            return _protocol_error("load needs a ports list")

        outputs: list[tuple[str, int]] = []
        for entry in ports:
            if not isinstance(entry, dict):
                return _protocol_error("port entries must be objects")
            name = entry.get("name")
            direction = entry.get("dir")
            width = entry.get("width")
            if (
                not isinstance(name, str)
                or direction not in ("input", "output")
                or not isinstance(width, int)
                or isinstance(width, bool)
                or width < 1
            ):
                return _protocol_error(f"malformed port entry {entry!r}")
            if direction == "output":
                outputs.append((name, (1 << width) - 1))

        try:
            with open(path, "r", encoding="utf-8") as handle:
                source = handle.read()
        except OSError as exc:
            return {"ok": False, "stage": "compile", "detail": str(exc)}

        namespace = {"__builtins__": _model_builtins(), "__name__": "model"}
        try:
            code = compile(source, path, "exec")
            exec(code, namespace)
        except Exception as exc:
            detail = f"{type(exc).__name__}: {exc}"
            return {"ok": False, "stage": "compile", "detail": detail}

        cls = namespace.get("TopModule")
        if not isinstance(cls, type):
            detail = "source does not define a TopModule class"
            return {"ok": False, "stage": "compile", "detail": detail}

        try:
            model = cls()
        except Exception as exc:
            detail = f"{type(exc).__name__}: {exc}"
            return {"ok": False, "stage": "compile", "detail": detail}

        self.model = model
        self.outputs = outputs
        return {"ok": True}

    def eval_frame(self, frame: dict) -> dict:
        if self.model is None:
            return _protocol_error("eval before a successful load")
        inputs = frame.get("inputs")
        if not isinstance(inputs, dict):
            return _protocol_error("eval needs an inputs object")

        cycle = self.cycle
        self.cycle += 1
        try:
            result = self.model.eval(inputs)
        except Exception as exc:
            detail = f"{type(exc).__name__}: {exc}"
            return {"error": {"stage": "runtime", "cycle": cycle, "detail": detail}}

        if not isinstance(result, dict):
            detail = "eval did not return a dict"
            return {"error": {"stage": "port", "cycle": cycle, "detail": detail}}

        outputs = {}
        for name, mask in self.outputs:
            if name not in result:
                detail = f"missing output '{name}'"
                return {"error": {"stage": "port", "cycle": cycle, "detail": detail}}
            value = result[name]
            if not isinstance(value, int):
                detail = f"output '{name}' is not an integer"
                return {"error": {"stage": "port", "cycle": cycle, "detail": detail}}
            outputs[name] = value & mask
        return {"outputs": outputs}


def _write_reply(stdout: TextIO, reply: dict) -> None:
    stdout.write(json.dumps(reply, sort_keys=True) + "\n")
    stdout.flush()


def serve(stdin: TextIO, stdout: TextIO) -> None:
    """Serve frames from stdin until quit or end of input."""
    session = ShimSession()
    for line in stdin:
        line = line.strip()
        if not line:
            continue
        frame: object = None
        try:
            frame = json.loads(line)
        except ValueError:
            reply = _protocol_error("invalid JSON")
        else:
            reply = session.handle(frame)
        _write_reply(stdout, reply)
        if isinstance(frame, dict) and frame.get("cmd") == "quit":
            return


_SELFTEST_MODEL = '''\
class TopModule:
    def __init__(self):
        self.count = 0

    def eval(self, inputs):
        rst = inputs.get("rst", 0) & 0x1
        en = inputs.get("en", 0) & 0x1
        if rst:
            self.count = 0
        elif en:
            self.count = (self.count + 1) & 0xFF
        return {"count": self.count}
'''


def selftest() -> int:
    """Load a built-in counter model and run ten eval frames through
    the ordinary serve loop.  Returns a process exit status."""
    with tempfile.NamedTemporaryFile(
        "w", suffix=".py", prefix="pyshim_selftest_", delete=False
    ) as handle:
        handle.write(_SELFTEST_MODEL)
        path = handle.name

    ports = [
        {"name": "rst", "dir": "input", "width": 1},
        {"name": "en", "dir": "input", "width": 1},
        {"name": "count", "dir": "output", "width": 8},
    ]
    frames = [{"cmd": "load", "source_path": path, "ports": ports}]
    frames.append({"cmd": "eval", "inputs": {"rst": 1, "en": 0}})
    for _ in range(9):
        frames.append({"cmd": "eval", "inputs": {"rst": 0, "en": 1}})
    frames.append({"cmd": "quit"})

    stdin = io.StringIO("".join(json.dumps(f) + "\n" for f in frames))
    stdout = io.StringIO()
    serve(stdin, stdout)
    replies = [json.loads(line) for line in stdout.getvalue().splitlines()]

    expected: list[dict] = [{"ok": True}]
    expected.extend({"outputs": {"count": n}} for n in range(10))
    expected.append({"ok": True})
    if replies != expected:
        print(f"selftest mismatch: {replies!r}", file=sys.stderr)
        return 1
    print("selftest ok", file=sys.stderr)
    return 0
