"""End-to-end command-line checks driven through cli.main."""

import json

import pytest

from rtlcross import cli
from rtlcross.emit import emit_reference
from rtlcross.ir.lower import lower_source

ADDER = """
module top_module(input [3:0] a, input [3:0] b, output [4:0] s);
  assign s = a + b;
endmodule
"""

PARAM_ADDER = """
module top_module #(parameter W = 4)(
    input [W-1:0] a, input [W-1:0] b, output [W:0] s);
  assign s = a + b;
endmodule
"""

COUNTER = """
module top_module(input clk, input rst, input en, output reg [3:0] q);
  always @(posedge clk) begin
    if (rst) q <= 0;
    else if (en) q <= q + 1;
  end
endmodule
"""

BROKEN = """
module top_module(input a, output y);
  assign y = a +
"""


@pytest.fixture
def adder_file(tmp_path):
    path = tmp_path / "adder.v"
    path.write_text(ADDER)
    return str(path)


def reference_text(source):
    result = lower_source(source)
    assert result.ok
    return emit_reference(result.design).text


def test_parse_summary(adder_file, capsys):
    assert cli.main(["parse", adder_file]) == 0
    out = capsys.readouterr().out
    assert "module top_module" in out
    assert "input a[4]" in out
    assert "sequential: False" in out


def test_parse_dump_ir_to_file(adder_file, tmp_path):
    out_path = tmp_path / "design.ir"
    assert cli.main(["parse", adder_file, "--dump-ir", "-o", str(out_path)]) == 0
    text = out_path.read_text()
    assert text.startswith("design (")
    assert "input p0:4" in text


def test_parse_error_exit_code(tmp_path, capsys):
    path = tmp_path / "broken.v"
    path.write_text(BROKEN)
    assert cli.main(["parse", str(path)]) == 1
    assert capsys.readouterr().err.strip()


def test_parse_param_override(tmp_path, capsys):
    path = tmp_path / "padder.v"
    path.write_text(PARAM_ADDER)
    assert cli.main(["parse", str(path), "-P", "W=8"]) == 0
    out = capsys.readouterr().out
    assert "input a[8]" in out
    assert "output s[9]" in out


def test_param_override_rejects_garbage(tmp_path, capsys):
    path = tmp_path / "padder.v"
    path.write_text(PARAM_ADDER)
    assert cli.main(["parse", str(path), "-P", "W"]) == 2
    assert "override" in capsys.readouterr().err


def test_emit_py_with_skeleton(adder_file, tmp_path):
    model = tmp_path / "model.py"
    skeleton = tmp_path / "skeleton.py"
    code = cli.main(
        ["emit-py", adder_file, "-o", str(model), "--skeleton", str(skeleton)]
    )
    assert code == 0
    assert "class TopModule" in model.read_text()
    assert "class TopModule" in skeleton.read_text()
    compile(model.read_text(), "model.py", "exec")


def test_simulate_jsonl_vector_count(adder_file, capsys):
    assert cli.main(["simulate", adder_file, "--vectors", "5", "--seed", "9"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    header = json.loads(lines[0])
    assert header["plan"]["num_vectors"] == 5
    assert header["plan"]["seed"] == 9
    cycles = [json.loads(line) for line in lines[1:]]
    assert len(cycles) == 5
    for cycle in cycles:
        assert cycle["outputs"]["s"] == cycle["inputs"]["a"] + cycle["inputs"]["b"]


def test_simulate_vcd(adder_file, capsys):
    assert cli.main(["simulate", adder_file, "--vectors", "3", "--format", "vcd"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("$comment plan ")
    assert "$var" in out
    assert "$enddefinitions" in out


def test_xverify_agreement(adder_file, tmp_path, capsys):
    model = tmp_path / "model.py"
    model.write_text(reference_text(ADDER))
    code = cli.main(["xverify", adder_file, str(model), "--vectors", "40"])
    assert code == 0
    out = capsys.readouterr().out
    assert "verilog: ran" in out
    assert "No mismatches detected." in out
    assert "reward:" in out


def test_xverify_mismatch_json(adder_file, tmp_path, capsys):
    # Off-by-one on the sum so every vector disagrees.
    buggy = reference_text(ADDER).replace("(a + b)", "(a + b + 1)")
    assert buggy != reference_text(ADDER)
    model = tmp_path / "model.py"
    model.write_text(buggy)
    code = cli.main(["xverify", adder_file, str(model), "--vectors", "40", "--json"])
    assert code == 1
    payload = json.loads(capsys.readouterr().out)
    assert payload["match_ratio"] < 1.0
    assert payload["mismatches"]["count"] > 0
    item = payload["mismatches"]["items"][0]
    assert item["exp"] != item["got"]
    assert payload["plan"]["num_vectors"] == 40


def test_xverify_python_compile_failure(adder_file, tmp_path, capsys):
    model = tmp_path / "model.py"
    model.write_text("def broken(:\n")
    code = cli.main(["xverify", adder_file, str(model), "--vectors", "10"])
    assert code == 1
    assert "python: compile error" in capsys.readouterr().out


def test_config_precedence(tmp_path, capsys):
    src = tmp_path / "adder.v"
    src.write_text(ADDER)
    config = tmp_path / "tool.ini"
    config.write_text("[stimulus]\nvectors = 7\nseed = 3\n")

    assert cli.main(["--config", str(config), "simulate", str(src)]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert json.loads(lines[0])["plan"]["num_vectors"] == 7
    assert len(lines) - 1 == 7

    code = cli.main(
        ["--config", str(config), "simulate", str(src), "--vectors", "3"]
    )
    assert code == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert json.loads(lines[0])["plan"]["num_vectors"] == 3
    assert json.loads(lines[0])["plan"]["seed"] == 3
    assert len(lines) - 1 == 3


def test_dataset_gen_with_benchmark_filter(tmp_path, capsys):
    good = tmp_path / "good.v"
    good.write_text(COUNTER)
    tainted = tmp_path / "tainted.v"
    tainted.write_text(
        """
module sum_unit(input [3:0] lhs, input [3:0] rhs, output [4:0] total);
  assign total = lhs + rhs;  // same structure as the benchmark
endmodule
"""
    )
    bench = tmp_path / "bench.v"
    bench.write_text(ADDER)
    out = tmp_path / "set.jsonl"

    code = cli.main(
        [
            "dataset-gen",
            str(good),
            str(tainted),
            "-o",
            str(out),
            "--benchmarks",
            str(bench),
            "--vectors",
            "30",
        ]
    )
    assert code == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["total"] == 2
    assert summary["written"] == 1
    assert summary["filtered"]["contaminated"] == [str(tainted)]
    lines = [l for l in out.read_text().splitlines() if l.strip()]
    assert len(lines) == 1
    assert json.loads(lines[0])["record_id"] == str(good)


def test_orchestrate_mock_agreement(tmp_path, capsys):
    problems = tmp_path / "problems.json"
    problems.write_text(
        json.dumps(
            [
                {
                    "problem_id": "toy",
                    "description": "4-bit adder with carry out",
                    "golden_verilog": ADDER,
                }
            ]
        )
    )
    v_mock = tmp_path / "v.txt"
    v_mock.write_text(f"```verilog\n{ADDER}\n```\n")
    p_mock = tmp_path / "p.txt"
    p_mock.write_text(f"```python\n{reference_text(ADDER)}\n```\n")
    log = tmp_path / "session.log"

    code = cli.main(
        [
            "orchestrate",
            "--problems",
            str(problems),
            "--agents",
            "mock",
            "--v-mock",
            str(v_mock),
            "--p-mock",
            str(p_mock),
            "--vectors",
            "40",
            "--log",
            str(log),
        ]
    )
    assert code == 0
    out = capsys.readouterr().out
    assert "toy: turns=1 agreed=True ratio=1.0" in out

    lines = log.read_text().strip().splitlines()
    header = json.loads(lines[0])
    assert header["plan"]["num_vectors"] == 40
    assert header["config"]["best_of"] == 3
    entries = [json.loads(line) for line in lines[1:]]
    assert entries and entries[-1]["problem"] == "toy"
    assert entries[-1]["accepted"] is True


def test_orchestrate_mock_disagreement(tmp_path, capsys):
    problems = tmp_path / "problems.json"
    problems.write_text(
        json.dumps([{"problem_id": "toy", "golden_verilog": ADDER,
                     "description": "adder"}])
    )
    v_mock = tmp_path / "v.txt"
    v_mock.write_text(f"```verilog\n{ADDER}\n```\n")
    p_mock = tmp_path / "p.txt"
    p_mock.write_text("```python\ndef broken(:\n```\n")

    code = cli.main(
        [
            "orchestrate",
            "--problems",
            str(problems),
            "--agents",
            "mock",
            "--v-mock",
            str(v_mock),
            "--p-mock",
            str(p_mock),
            "--vectors",
            "10",
            "--turns",
            "2",
        ]
    )
    assert code == 1
    assert "agreed=False" in capsys.readouterr().out


def test_orchestrate_mock_requires_files(tmp_path, capsys):
    problems = tmp_path / "problems.json"
    problems.write_text(
        json.dumps([{"problem_id": "toy", "golden_verilog": ADDER,
                     "description": "adder"}])
    )
    code = cli.main(["orchestrate", "--problems", str(problems)])
    assert code == 2
    assert "mock agents need" in capsys.readouterr().err


def test_reward_eval_pass_at_k(capsys):
    code = cli.main(["reward-eval", "--n", "10", "--c", "3", "--k", "1", "5"])
    assert code == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "pass@1 = 0.3"
    assert lines[1].startswith("pass@5 = 0.916666666667")


def test_reward_eval_breakdown(capsys):
    code = cli.main(
        ["reward-eval", "--local", "1", "--fix", "1", "--match", "1"]
    )
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["total"] == pytest.approx(10.7)


def test_reward_eval_requires_inputs(capsys):
    assert cli.main(["reward-eval"]) == 2
    assert "nothing to evaluate" in capsys.readouterr().err


def test_unknown_subcommand_is_usage_error():
    with pytest.raises(SystemExit) as info:
        cli.main(["bogus"])
    assert info.value.code == 2


def test_missing_file_is_usage_error(capsys):
    assert cli.main(["parse", "/no/such/file.v"]) == 2
    assert capsys.readouterr().err.strip()
