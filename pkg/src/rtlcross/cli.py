"""Command-line interface.

Subcommands cover the pipeline end to end: parse/lower inspection,
reference-model emission, interpretation, differential verification,
dataset generation, agent orchestration, and reward arithmetic.

Exit codes: 0 on success, 1 when the requested check failed (parse
errors, verification mismatch, no session agreement), 2 for usage or
internal errors.  Option precedence is flags, then the INI config file,
then built-in defaults.
"""

from __future__ import annotations

import argparse
import configparser
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict

from rtlcross import corpus as corpus_mod
from rtlcross.diag import SourceUnit
from rtlcross.emit import emit_reference, emit_skeleton, port_manifest
from rtlcross.ir.lower import lower_source
from rtlcross.ir.printer import canonical_text
from rtlcross.orchestrate import (
    MockAgent,
    Problem,
    SessionConfig,
    make_agent,
    run_session,
)
from rtlcross.rewards import (
    RewardWeights,
    aggregate_reward,
    local_reward,
    pass_at_k,
)
from rtlcross.sim import run_trace, trace_jsonl, trace_vcd
from rtlcross.verify import (
    StimulusPlan,
    describe_tier,
    render_outcome,
    verify_pair,
)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_ERROR = 2

DEFAULTS = {
    "vectors": 1000,
    "seed": 42,
    "reset_cycles": 2,
    "best_of": 3,
    "max_turns": 3,
    "delta_local": 10.0,
    "delta_fix": 0.2,
    "delta_match": 0.5,
    "clip_eps": 0.2,
    "group_size": 4,
    "jobs": 1,
    "api_key_env": "RTLCROSS_API_KEY",
}


class CliError(Exception):
    pass


def _parse_param(text: str) -> tuple[str, int]:
    name, sep, value = text.partition("=")
    if not sep or not name.strip():
        raise CliError(f"bad parameter override {text!r}, expected name=value")
    try:
        return name.strip(), int(value.strip(), 0)
    except ValueError:
        raise CliError(f"parameter override {text!r} has a non-integer value") from None


def _overrides(args: argparse.Namespace) -> dict[str, int]:
    return dict(_parse_param(p) for p in (args.param or []))


class Settings:
    """Layered option lookup: command-line flag, then config file
    section, then the built-in default."""

    def __init__(self, config_path: str | None):
        self.config = configparser.ConfigParser()
        if config_path:
            read = self.config.read(config_path)
            if not read:
                raise CliError(f"config file not found: {config_path}")

    def _from_config(self, section: str, option: str):
        if self.config.has_option(section, option):
            return self.config.get(section, option)
        return None

    def value(self, flag, section: str, option: str, kind=int):
        if flag is not None:
            return flag
        raw = self._from_config(section, option)
        if raw is not None:
            try:
                return kind(raw)
            except ValueError:
                raise CliError(
                    f"config option [{section}] {option} = {raw!r} is not {kind.__name__}"
                ) from None
        return DEFAULTS[option]

    def plan(self, args: argparse.Namespace) -> StimulusPlan:
        return StimulusPlan(
            num_vectors=self.value(args.vectors, "stimulus", "vectors"),
            seed=self.value(args.seed, "stimulus", "seed"),
            reset_cycles=self.value(args.reset_cycles, "stimulus", "reset_cycles"),
        )

    def weights(self, args: argparse.Namespace) -> RewardWeights:
        return RewardWeights(
            delta_local=self.value(
                getattr(args, "delta_local", None), "rewards", "delta_local", float
            ),
            delta_fix=self.value(
                getattr(args, "delta_fix", None), "rewards", "delta_fix", float
            ),
            delta_match=self.value(
                getattr(args, "delta_match", None), "rewards", "delta_match", float
            ),
        )


def _load_source(path: str) -> SourceUnit:
    try:
        return SourceUnit.from_file(path)
    except OSError as exc:
        raise CliError(str(exc)) from None


def _lower_or_fail(path: str, overrides: dict[str, int], out) -> object:
    result = lower_source(_load_source(path), overrides or None)
    for diag in result.diagnostics:
        print(diag, file=sys.stderr)
    if not result.ok:
        return None
    return result.design


def _write_out(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(text)


def _plan_record(plan: StimulusPlan) -> dict:
    return {
        "num_vectors": plan.num_vectors,
        "seed": plan.seed,
        "reset_cycles": plan.reset_cycles,
    }


# --- subcommands ----------------------------------------------------------


def cmd_parse(args, settings) -> int:
    design = _lower_or_fail(args.file, _overrides(args), sys.stderr)
    if design is None:
        return EXIT_CHECK_FAILED
    if args.dump_ir:
        _write_out(canonical_text(design), args.output)
    else:
        ports = ", ".join(
            f"{p.direction} {p.name}[{p.width}]" for p in design.ports
        )
        print(f"module {design.name}: {ports}")
        print(f"processes: {len(design.procs)}, sequential: {design.is_sequential}")
    return EXIT_OK


def cmd_emit_py(args, settings) -> int:
    design = _lower_or_fail(args.file, _overrides(args), sys.stderr)
    if design is None:
        return EXIT_CHECK_FAILED
    src = emit_reference(design)
    _write_out(src.text, args.output)
    if args.skeleton:
        _write_out(emit_skeleton(design), args.skeleton)
    return EXIT_OK


def cmd_simulate(args, settings) -> int:
    from rtlcross.verify import gen_stimuli, stimulus_ports

    design = _lower_or_fail(args.file, _overrides(args), sys.stderr)
    if design is None:
        return EXIT_CHECK_FAILED
    plan = settings.plan(args)
    manifest = port_manifest(design)
    stimuli = gen_stimuli(stimulus_ports(manifest), plan)
    trace = run_trace(design, stimuli)
    if args.format == "vcd":
        widths = {p.name: p.width for p in design.data_inputs + design.outputs}
        header = f"$comment plan {json.dumps(_plan_record(plan), sort_keys=True)} $end\n"
        _write_out(header + trace_vcd(trace, widths, top=design.name), args.output)
    else:
        header = json.dumps({"plan": _plan_record(plan)}, sort_keys=True) + "\n"
        _write_out(header + trace_jsonl(trace), args.output)
    return EXIT_OK


def cmd_xverify(args, settings) -> int:
    plan = settings.plan(args)
    weights = settings.weights(args)
    verilog = _load_source(args.dut).text
    try:
        with open(args.model, "r", encoding="utf-8") as handle:
            python = handle.read()
    except OSError as exc:
        raise CliError(str(exc)) from None

    overrides = _overrides(args)
    lowered = lower_source(verilog, overrides or None)
    if not lowered.ok:
        for diag in lowered.diagnostics:
            print(diag, file=sys.stderr)
        print("verilog: failed to lower", file=sys.stderr)
        return EXIT_CHECK_FAILED
    manifest = port_manifest(lowered.design)

    outcome = verify_pair(verilog, python, manifest, plan)
    ratio = outcome.match_ratio
    reward = aggregate_reward(
        local_reward(outcome.verilog_tier), 0.0, ratio, weights
    )

    if args.json:
        payload = {
            "plan": _plan_record(plan),
            "verilog_tier": describe_tier(outcome.verilog_tier),
            "python_tier": describe_tier(outcome.python_tier),
            "match_ratio": ratio,
            "mismatches": None,
            "reward": asdict(reward),
        }
        if outcome.report is not None:
            payload["mismatches"] = {
                "count": len(outcome.report.items),
                "total_compared": outcome.report.total_compared,
                "items": [
                    {
                        "test_index": it.test_index,
                        "signal": it.signal,
                        "got": it.got,
                        "exp": it.exp,
                        "inputs": it.inputs,
                    }
                    for it in outcome.report.items[:50]
                ],
            }
        _write_out(json.dumps(payload, indent=2, sort_keys=True), args.output)
    else:
        lines = [
            f"verilog: {describe_tier(outcome.verilog_tier)}",
            f"python: {describe_tier(outcome.python_tier)}",
            render_outcome(outcome),
            f"reward: local={reward.local:g} fix={reward.fix:g} "
            f"match={reward.match:g} total={reward.total:g}",
        ]
        _write_out("\n".join(lines), args.output)
    return EXIT_OK if outcome.agreed else EXIT_CHECK_FAILED


def cmd_dataset_gen(args, settings) -> int:
    plan = settings.plan(args)
    jobs = settings.value(args.jobs, "run", "jobs")

    sources = []
    for path in args.sources:
        text = _load_source(path).text
        sources.append((path, text))

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            records = list(
                pool.map(
                    lambda item: corpus_mod.convert_corpus([item], plan)[0], sources
                )
            )
    else:
        records = corpus_mod.convert_corpus(sources, plan)

    if args.benchmarks:
        bench_texts = [_load_source(p).text for p in args.benchmarks]
        report = corpus_mod.contamination_filter(records, bench_texts)
        kept = report.kept
        filtered = {
            "contaminated": [r.record_id for r in report.contaminated],
            "duplicates": [r.record_id for r in report.duplicates],
        }
    else:
        kept = records
        filtered = {"contaminated": [], "duplicates": []}

    corpus_mod.write_jsonl(kept, args.output)
    summary = corpus_mod.summarize(records)
    summary["plan"] = _plan_record(plan)
    summary["filtered"] = filtered
    summary["written"] = len(kept)
    print(json.dumps(summary, sort_keys=True))
    return EXIT_OK


def _load_problems(path: str) -> list[Problem]:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise CliError(str(exc)) from None
    raw_items = []
    stripped = text.strip()
    if not stripped:
        raise CliError(f"no problems in {path}")
    if stripped.startswith("["):
        raw_items = json.loads(stripped)
    else:
        for line in stripped.splitlines():
            line = line.strip()
            if line:
                raw_items.append(json.loads(line))
    problems = []
    for item in raw_items:
        if "golden_verilog" in item:
            lowered = lower_source(item["golden_verilog"])
            if not lowered.ok:
                raise CliError(
                    f"golden verilog for {item.get('problem_id', '?')} does not lower"
                )
            manifest = port_manifest(lowered.design)
            skeleton = emit_skeleton(lowered.design)
        else:
            manifest = tuple(
                (n, d, int(w)) for n, d, w in item.get("manifest", [])
            )
            skeleton = item.get("skeleton", "")
        problems.append(
            Problem(
                problem_id=str(item.get("problem_id", f"problem-{len(problems)}")),
                description=item["description"],
                manifest=manifest,
                skeleton=skeleton,
            )
        )
    return problems


def cmd_orchestrate(args, settings) -> int:
    plan = settings.plan(args)
    weights = settings.weights(args)
    config = SessionConfig(
        best_of=settings.value(args.best_of, "session", "best_of"),
        max_turns=settings.value(args.max_turns, "session", "max_turns"),
        plan=plan,
        weights=weights,
        clip_eps=settings.value(args.clip_eps, "session", "clip_eps", float),
        group_size=settings.value(args.group_size, "session", "group_size"),
    )
    jobs = settings.value(args.jobs, "run", "jobs")
    problems = _load_problems(args.problems)

    def build_agents() -> tuple:
        if args.agents == "chat":
            url = args.chat_url or settings._from_config("chat", "url")
            model = args.chat_model or settings._from_config("chat", "model")
            if not url or not model:
                raise CliError("chat agents need --chat-url and --chat-model")
            key_env = settings.value(args.api_key_env, "chat", "api_key_env", str)
            v = make_agent("chat", "verilog", url=url, model=model, api_key_env=key_env)
            p = make_agent("chat", "reference", url=url, model=model, api_key_env=key_env)
            return v, p
        if args.agents == "mock":
            if not args.v_mock or not args.p_mock:
                raise CliError("mock agents need --v-mock and --p-mock files")
            v_text = _load_source(args.v_mock).text
            p_text = _load_source(args.p_mock).text
            return (
                MockAgent("verilog", [v_text]),
                MockAgent("reference", [p_text]),
            )
        raise CliError(f"unknown agent kind {args.agents!r}")

    def run_one(problem: Problem):
        v_agent, p_agent = build_agents()
        return run_session(v_agent, p_agent, problem, config)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(run_one, problems))
    else:
        results = [run_one(problem) for problem in problems]

    header = {
        "plan": _plan_record(plan),
        "config": {
            "best_of": config.best_of,
            "max_turns": config.max_turns,
            "clip_eps": config.clip_eps,
            "group_size": config.group_size,
            "weights": asdict(weights),
        },
    }
    lines = [json.dumps(header, sort_keys=True)]
    all_agreed = True
    for result in results:
        for entry in result.log:
            lines.append(json.dumps(entry, sort_keys=True))
        ratio = result.accepted_ratio
        print(
            f"{result.problem_id}: turns={result.turns_run} "
            f"agreed={result.agreed} ratio={ratio if ratio is not None else 'n/a'}"
        )
        all_agreed = all_agreed and result.agreed
    if args.log:
        _write_out("\n".join(lines) + "\n", args.log)
    return EXIT_OK if all_agreed else EXIT_CHECK_FAILED


def cmd_reward_eval(args, settings) -> int:
    weights = settings.weights(args)
    if args.n is not None:
        if args.c is None or not args.k:
            raise CliError("pass@k needs --n, --c, and --k")
        for k in args.k:
            print(f"pass@{k} = {pass_at_k(args.n, args.c, k):.12g}")
        return EXIT_OK
    if args.local is not None:
        breakdown = aggregate_reward(
            args.local, args.fix or 0.0, args.match or 0.0, weights
        )
        print(json.dumps(asdict(breakdown), sort_keys=True))
        return EXIT_OK
    raise CliError("nothing to evaluate: give --n/--c/--k or --local/--fix/--match")


# --- argument wiring ------------------------------------------------------


def _add_plan_flags(sub) -> None:
    sub.add_argument("--vectors", type=int, help="stimulus vectors per run")
    sub.add_argument("--seed", type=int, help="stimulus seed")
    sub.add_argument("--reset-cycles", type=int, dest="reset_cycles")


def _add_param_flag(sub) -> None:
    sub.add_argument(
        "-P",
        "--param",
        action="append",
        metavar="NAME=VALUE",
        help="override a module parameter before lowering (repeatable)",
    )


def _add_weight_flags(sub) -> None:
    sub.add_argument("--delta-local", type=float, dest="delta_local")
    sub.add_argument("--delta-fix", type=float, dest="delta_fix")
    sub.add_argument("--delta-match", type=float, dest="delta_match")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rtlcross",
        description="Differential Verilog/Python cross-verification toolkit",
    )
    parser.add_argument("--config", help="INI config file")
    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("parse", help="parse and lower a Verilog file")
    p.add_argument("file")
    p.add_argument("--dump-ir", action="store_true", dest="dump_ir")
    p.add_argument("-o", "--output")
    _add_param_flag(p)
    p.set_defaults(func=cmd_parse)

    p = commands.add_parser("emit-py", help="emit the Python reference model")
    p.add_argument("file")
    p.add_argument("-o", "--output")
    p.add_argument("--skeleton", help="also write the fill-in skeleton here")
    _add_param_flag(p)
    p.set_defaults(func=cmd_emit_py)

    p = commands.add_parser("simulate", help="interpret a design over seeded stimuli")
    p.add_argument("file")
    p.add_argument("-o", "--output")
    p.add_argument("--format", choices=("jsonl", "vcd"), default="jsonl")
    _add_plan_flags(p)
    _add_param_flag(p)
    p.set_defaults(func=cmd_simulate)

    p = commands.add_parser("xverify", help="cross-verify Verilog against a Python model")
    p.add_argument("dut")
    p.add_argument("model")
    p.add_argument("-o", "--output")
    p.add_argument("--json", action="store_true")
    _add_plan_flags(p)
    _add_weight_flags(p)
    _add_param_flag(p)
    p.set_defaults(func=cmd_xverify)

    p = commands.add_parser("dataset-gen", help="convert Verilog sources into a dataset")
    p.add_argument("sources", nargs="+")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--benchmarks", nargs="*", help="benchmark files to filter against")
    p.add_argument("--jobs", type=int)
    _add_plan_flags(p)
    p.set_defaults(func=cmd_dataset_gen)

    p = commands.add_parser("orchestrate", help="run agent verification sessions")
    p.add_argument("--problems", required=True, help="problem JSON or JSON-lines file")
    p.add_argument("--agents", choices=("chat", "mock"), default="mock")
    p.add_argument("--chat-url")
    p.add_argument("--chat-model")
    p.add_argument("--api-key-env", dest="api_key_env")
    p.add_argument("--v-mock", help="file with the mock Verilog completion")
    p.add_argument("--p-mock", help="file with the mock Python completion")
    p.add_argument("--best-of", type=int, dest="best_of")
    p.add_argument("--turns", type=int, dest="max_turns")
    p.add_argument("--clip-eps", type=float, dest="clip_eps")
    p.add_argument("--group-size", type=int, dest="group_size")
    p.add_argument("--jobs", type=int)
    p.add_argument("--log", help="write the JSON-lines session log here")
    _add_plan_flags(p)
    _add_weight_flags(p)
    p.set_defaults(func=cmd_orchestrate)

    p = commands.add_parser("reward-eval", help="reward and pass@k arithmetic")
    p.add_argument("--n", type=int)
    p.add_argument("--c", type=int)
    p.add_argument("--k", type=int, nargs="*")
    p.add_argument("--local", type=float)
    p.add_argument("--fix", type=float)
    p.add_argument("--match", type=float)
    _add_weight_flags(p)
    p.set_defaults(func=cmd_reward_eval)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        settings = Settings(args.config)
        return args.func(args, settings)
    except CliError as exc:
        print(f"rtlcross: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except ValueError as exc:
        print(f"rtlcross: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
