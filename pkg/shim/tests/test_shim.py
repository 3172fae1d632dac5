"""Shim protocol: golden session replay, selftest, fuzzing, unit checks."""

import io
import json
import random
import subprocess
import sys
from pathlib import Path

import pytest

from pyshim.server import ShimSession, serve

REPO_ROOT = Path(__file__).resolve().parents[2]
GOLDEN_DIR = REPO_ROOT / "tests" / "golden" / "shim"

SHIM_CMD = [sys.executable, "-m", "pyshim"]


def run_shim(stdin_bytes, cwd=None):
    proc = subprocess.run(
        SHIM_CMD,
        input=stdin_bytes,
        stdout=subprocess.PIPE,
        stderr=subprocess.PIPE,
        cwd=cwd,
        timeout=60,
    )
    return proc


def test_golden_session_replay_is_byte_identical():
    """The recorded 50-frame session must replay byte for byte."""
    stdin_bytes = (GOLDEN_DIR / "session_input.jsonl").read_bytes()
    expected = (GOLDEN_DIR / "session_output.jsonl").read_bytes()
    proc = run_shim(stdin_bytes, cwd=str(GOLDEN_DIR))
    assert proc.returncode == 0
    assert proc.stdout == expected


def test_golden_session_has_fifty_frames():
    frames = (GOLDEN_DIR / "session_input.jsonl").read_bytes().splitlines()
    replies = (GOLDEN_DIR / "session_output.jsonl").read_bytes().splitlines()
    assert len(frames) == 50
    assert len(replies) == 50


def test_selftest_exits_zero():
    proc = subprocess.run(
        SHIM_CMD + ["--selftest"],
        stdout=subprocess.PIPE,
        stderr=subprocess.PIPE,
        timeout=60,
    )
    assert proc.returncode == 0


def test_unknown_argument_exits_two():
    proc = subprocess.run(
        SHIM_CMD + ["--bogus"],
        stdout=subprocess.PIPE,
        stderr=subprocess.PIPE,
        timeout=60,
    )
    assert proc.returncode == 2


OVERSIZED_MODEL = """\
class TopModule:
    def __init__(self):
        self.acc = 0

    def eval(self, inputs):
        a = inputs.get("a", 0)
        b = inputs.get("b", 0)
        self.acc += a + b + 1
        return {
            "q": (a * b + self.acc) << 64,
            "r": -(a + b + 1),
            "s": self.acc ** 3 + (1 << 200),
        }
"""

FUZZ_PORTS = [
    {"name": "a", "dir": "input", "width": 8},
    {"name": "b", "dir": "input", "width": 8},
    {"name": "q", "dir": "output", "width": 8},
    {"name": "r", "dir": "output", "width": 3},
    {"name": "s", "dir": "output", "width": 16},
]


def test_fuzz_oversized_model_replies_stay_in_range(tmp_path):
    """1000 eval frames against a model that returns huge and negative
    integers: every reply value must fit the declared port width."""
    model = tmp_path / "wild.py"
    model.write_text(OVERSIZED_MODEL)

    rng = random.Random(2024)
    frames = [
        json.dumps(
            {"cmd": "load", "source_path": str(model), "ports": FUZZ_PORTS}
        )
    ]
    for _ in range(1000):
        frames.append(
            json.dumps(
                {
                    "cmd": "eval",
                    "inputs": {
                        "a": rng.randrange(256),
                        "b": rng.randrange(256),
                    },
                }
            )
        )
    frames.append(json.dumps({"cmd": "quit"}))
    stdin_bytes = ("\n".join(frames) + "\n").encode("utf-8")

    proc = run_shim(stdin_bytes)
    assert proc.returncode == 0
    replies = [json.loads(line) for line in proc.stdout.splitlines()]
    assert len(replies) == 1002
    assert replies[0] == {"ok": True}
    widths = {p["name"]: p["width"] for p in FUZZ_PORTS if p["dir"] == "output"}
    checked = 0
    for reply in replies[1:-1]:
        assert "outputs" in reply, reply
        for name, value in reply["outputs"].items():
            assert 0 <= value < (1 << widths[name])
            checked += 1
    assert checked == 3000


# --- in-process session checks -------------------------------------------


def write_model(tmp_path, body):
    path = tmp_path / "model.py"
    path.write_text(body)
    return str(path)


COUNTER_MODEL = """\
class TopModule:
    def __init__(self):
        self.q = 0

    def eval(self, inputs):
        if inputs.get("rst", 0):
            self.q = 0
        else:
            self.q += 1
        return {"q": self.q}
"""


def ports(*specs):
    return [{"name": n, "dir": d, "width": w} for n, d, w in specs]


def test_load_and_eval(tmp_path):
    session = ShimSession()
    reply = session.handle(
        {
            "cmd": "load",
            "source_path": write_model(tmp_path, COUNTER_MODEL),
            "ports": ports(("rst", "input", 1), ("q", "output", 4)),
        }
    )
    assert reply == {"ok": True}
    assert session.handle({"cmd": "eval", "inputs": {"rst": 0}}) == {
        "outputs": {"q": 1}
    }
    assert session.handle({"cmd": "eval", "inputs": {"rst": 1}}) == {
        "outputs": {"q": 0}
    }


def test_eval_masks_to_width(tmp_path):
    session = ShimSession()
    model = write_model(
        tmp_path,
        "class TopModule:\n"
        "    def eval(self, inputs):\n"
        "        return {'q': 0x1FF}\n",
    )
    session.handle(
        {"cmd": "load", "source_path": model, "ports": ports(("q", "output", 8))}
    )
    assert session.handle({"cmd": "eval", "inputs": {}}) == {
        "outputs": {"q": 0xFF}
    }


def test_eval_before_load_is_protocol_error():
    session = ShimSession()
    reply = session.handle({"cmd": "eval", "inputs": {}})
    assert reply["error"]["stage"] == "protocol"


def test_failed_load_resets_session(tmp_path):
    session = ShimSession()
    good = write_model(tmp_path, COUNTER_MODEL)
    session.handle(
        {"cmd": "load", "source_path": good,
         "ports": ports(("q", "output", 4))}
    )
    bad = tmp_path / "bad.py"
    bad.write_text("def broken(:\n")
    reply = session.handle(
        {"cmd": "load", "source_path": str(bad),
         "ports": ports(("q", "output", 4))}
    )
    assert reply["ok"] is False
    assert reply["stage"] == "compile"
    after = session.handle({"cmd": "eval", "inputs": {}})
    assert after["error"]["stage"] == "protocol"


def test_runtime_error_reports_cycle_and_continues(tmp_path):
    session = ShimSession()
    model = write_model(
        tmp_path,
        "class TopModule:\n"
        "    def __init__(self):\n"
        "        self.n = 0\n"
        "    def eval(self, inputs):\n"
        "        self.n += 1\n"
        "        if self.n == 2:\n"
        "            raise ValueError('boom')\n"
        "        return {'q': self.n}\n",
    )
    session.handle(
        {"cmd": "load", "source_path": model, "ports": ports(("q", "output", 8))}
    )
    assert session.handle({"cmd": "eval", "inputs": {}}) == {"outputs": {"q": 1}}
    err = session.handle({"cmd": "eval", "inputs": {}})
    assert err["error"]["stage"] == "runtime"
    assert err["error"]["cycle"] == 1
    assert "ValueError: boom" in err["error"]["detail"]
    assert session.handle({"cmd": "eval", "inputs": {}}) == {"outputs": {"q": 3}}


def test_missing_output_is_port_error(tmp_path):
    session = ShimSession()
    model = write_model(
        tmp_path,
        "class TopModule:\n"
        "    def eval(self, inputs):\n"
        "        return {}\n",
    )
    session.handle(
        {"cmd": "load", "source_path": model, "ports": ports(("q", "output", 4))}
    )
    reply = session.handle({"cmd": "eval", "inputs": {}})
    assert reply["error"]["stage"] == "port"
    assert "missing output 'q'" in reply["error"]["detail"]


def test_non_integer_output_is_port_error(tmp_path):
    session = ShimSession()
    model = write_model(
        tmp_path,
        "class TopModule:\n"
        "    def eval(self, inputs):\n"
        "        return {'q': 'seven'}\n",
    )
    session.handle(
        {"cmd": "load", "source_path": model, "ports": ports(("q", "output", 4))}
    )
    reply = session.handle({"cmd": "eval", "inputs": {}})
    assert reply["error"]["stage"] == "port"
    assert "not an integer" in reply["error"]["detail"]


def test_reload_resets_cycle_counter(tmp_path):
    session = ShimSession()
    model = write_model(tmp_path, COUNTER_MODEL)
    load = {
        "cmd": "load",
        "source_path": model,
        "ports": ports(("q", "output", 4)),
    }
    session.handle(load)
    session.handle({"cmd": "eval", "inputs": {}})
    session.handle({"cmd": "eval", "inputs": {}})
    assert session.cycle == 2
    session.handle(load)
    assert session.cycle == 0
    assert session.handle({"cmd": "eval", "inputs": {}}) == {"outputs": {"q": 1}}


def test_malformed_port_entry_rejected(tmp_path):
    session = ShimSession()
    model = write_model(tmp_path, COUNTER_MODEL)
    reply = session.handle(
        {
            "cmd": "load",
            "source_path": model,
            "ports": [{"name": "q", "dir": "output", "width": True}],
        }
    )
    assert reply["error"]["stage"] == "protocol"


def test_model_without_class_is_compile_failure(tmp_path):
    session = ShimSession()
    model = write_model(tmp_path, "x = 1\n")
    reply = session.handle(
        {"cmd": "load", "source_path": model, "ports": ports(("q", "output", 4))}
    )
    assert reply["ok"] is False
    assert reply["stage"] == "compile"
    assert "TopModule" in reply["detail"]


def test_model_cannot_reach_imports(tmp_path):
    session = ShimSession()
    model = write_model(
        tmp_path,
        "import os\n"
        "class TopModule:\n"
        "    def eval(self, inputs):\n"
        "        return {'q': 0}\n",
    )
    reply = session.handle(
        {"cmd": "load", "source_path": model, "ports": ports(("q", "output", 4))}
    )
    assert reply["ok"] is False
    assert "import" in reply["detail"].lower()


def test_serve_handles_bad_json_and_quit(tmp_path):
    model = write_model(tmp_path, COUNTER_MODEL)
    load = json.dumps(
        {"cmd": "load", "source_path": model, "ports": ports(("q", "output", 4))}
    )
    lines = [
        load,
        "this is not json",
        json.dumps({"cmd": "eval", "inputs": {}}),
        json.dumps({"cmd": "quit"}),
        json.dumps({"cmd": "eval", "inputs": {}}),
    ]
    out = io.StringIO()
    serve(io.StringIO("\n".join(lines) + "\n"), out)
    replies = [json.loads(line) for line in out.getvalue().splitlines()]
    assert len(replies) == 4  # nothing served after quit
    assert replies[0] == {"ok": True}
    assert replies[1]["error"]["stage"] == "protocol"
    assert "invalid JSON" in replies[1]["error"]["detail"]
    assert replies[2] == {"outputs": {"q": 1}}
    assert replies[3] == {"ok": True}


def test_replies_are_single_sorted_json_lines(tmp_path):
    model = write_model(tmp_path, COUNTER_MODEL)
    lines = [
        json.dumps(
            {"cmd": "load", "source_path": model,
             "ports": ports(("q", "output", 4))}
        ),
        json.dumps({"cmd": "eval", "inputs": {}}),
    ]
    out = io.StringIO()
    serve(io.StringIO("\n".join(lines) + "\n"), out)
    for line in out.getvalue().splitlines():
        parsed = json.loads(line)
        assert json.dumps(parsed, sort_keys=True) == line
