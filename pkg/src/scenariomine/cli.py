"""Command-line entry points.

Subcommands: mine (run programs over logs), eval (score predictions against
ground truth), gen (emit synthetic bundles), validate (parse/validate program
files), synth (LLM program synthesis).

Exit codes: 0 success, 1 validation failures, 2 usage or I/O errors.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import logging
import sys
import time
from pathlib import Path

from scenariomine import dsl
from scenariomine.config import (
    DEFAULT_ENGINE_CONFIG,
    DEFAULT_POSTPROCESS_CONFIG,
    EngineConfig,
    PostprocessConfig,
)
from scenariomine.context import LogContext
from scenariomine.core import ScenarioSet
from scenariomine.dsl import nodes as N
from scenariomine.dsl.validator import bind_arguments
from scenariomine.io import (
    load_log_bundle,
    prompt_hash,
    read_scenario_output,
    write_scenario_output,
)
from scenariomine.metrics import (
    DEFAULT_EVAL_CONFIG,
    EvalReport,
    balanced_accuracy,
    hota_pooled,
)
from scenariomine.postprocess import filter_top_k, resample_grid, run_postprocess
from scenariomine.synthesis import SynthesisConfig, SynthesisFailure, synthesize
from scenariomine.synthgen import (
    FIXTURE_SCRIPTS,
    generate_scene,
    label_scene,
    load_script,
    random_script,
    save_scene,
)

log = logging.getLogger("scenariomine")


def _program_description(program, fallback: str) -> str:
    from scenariomine.dsl.registry import OUTPUT_FUNCTION

    bound, _ = bind_arguments(OUTPUT_FUNCTION, program.output.call)
    arg = bound.get("description")
    if isinstance(arg, N.Literal) and isinstance(arg.value, str):
        return arg.value
    return fallback


def _load_programs(programs_dir: Path):
    """(name, source) per program file, sorted for determinism."""
    files = sorted(
        p for p in programs_dir.iterdir() if p.suffix in (".py", ".txt") and p.is_file()
    )
    return [(p.stem, p.read_text(encoding="utf-8")) for p in files]


def _mine_one_log(args_tuple):
    (log_dir, programs, engine_cfg, post_cfg, out_root, limits) = args_tuple
    results = []
    bundle = load_log_bundle(log_dir)
    bundle.tracks = filter_top_k(bundle.tracks, post_cfg)
    ctx = LogContext(bundle, engine_cfg)
    out_dir = Path(out_root) / bundle.log_id
    for name, source in programs:
        started = time.perf_counter()
        entry = {"log": bundle.log_id, "program": name, "status": "ok", "detail": ""}
        try:
            program = dsl.parse_program(dsl.extract_code_block(source))
            diags = dsl.validate_program(program)
            if diags:
                raise N.ProgramParseError(diags)
        except N.ProgramParseError as exc:
            entry["status"] = "parse-fail"
            entry["detail"] = str(exc.diagnostics[0])
            results.append(entry)
            continue
        description = _program_description(program, name)
        entry["description"] = description
        try:
            outcome = dsl.execute_program(program, ctx, description=description, limits=limits)
        except dsl.ExecutionError as exc:
            entry["status"] = "exec-fail"
            entry["detail"] = str(exc.diagnostic)
            results.append(entry)
            continue
        final = run_postprocess(outcome.scenario, bundle, post_cfg)
        csv_path = write_scenario_output(final, outcome.description, bundle.log_id, out_dir)
        entry["output"] = str(csv_path.relative_to(out_root))
        entry["tracks"] = len(final.entries)
        results.append(entry)
        log.info(
            "mined log=%s program=%s tracks=%d elapsed_ms=%.1f",
            bundle.log_id,
            name,
            len(final.entries),
            (time.perf_counter() - started) * 1e3,
        )
    return results


def cmd_mine(args) -> int:
    logs_root = Path(args.logs)
    if not logs_root.is_dir():
        print(f"error: logs directory {logs_root} does not exist", file=sys.stderr)
        return 2
    log_dirs = sorted(p for p in logs_root.iterdir() if (p / "tracks.csv").exists())
    if not log_dirs:
        print(f"error: no log directories under {logs_root}", file=sys.stderr)
        return 2
    engine_cfg = EngineConfig.from_file(args.config) if args.config else DEFAULT_ENGINE_CONFIG
    post_cfg = (
        PostprocessConfig.from_file(args.post_config)
        if args.post_config
        else DEFAULT_POSTPROCESS_CONFIG
    )
    limits = dsl.ExecutionLimits()

    if args.programs:
        programs_dir = Path(args.programs)
        if not programs_dir.is_dir():
            print(f"error: programs directory {programs_dir} does not exist", file=sys.stderr)
            return 2
        programs = _load_programs(programs_dir)
    elif args.prompts and args.synthesize:
        prompts = [
            line.strip()
            for line in Path(args.prompts).read_text(encoding="utf-8").splitlines()
            if line.strip()
        ]
        config = SynthesisConfig(endpoint=args.endpoint or "", model=args.model or "")
        programs = []
        for i, prompt in enumerate(prompts):
            try:
                outcome = synthesize(prompt, config)
                programs.append((f"prompt_{i:03d}", outcome.source))
            except SynthesisFailure as exc:
                programs.append((f"prompt_{i:03d}", f"# synthesis failed: {exc}\n"))
        if not programs:
            print("error: no prompts to synthesize", file=sys.stderr)
            return 2
    else:
        print("error: provide --programs DIR or --prompts FILE with --synthesize", file=sys.stderr)
        return 2

    if args.dry_run:
        failures = 0
        for name, source in programs:
            try:
                program = dsl.parse_program(dsl.extract_code_block(source))
                diags = dsl.validate_program(program)
            except N.ProgramParseError as exc:
                diags = exc.diagnostics
            for d in diags:
                failures += 1
                print(f"{name}: {d}")
        return 1 if failures else 0

    out_root = Path(args.out)
    out_root.mkdir(parents=True, exist_ok=True)
    tasks = [
        (str(log_dir), programs, engine_cfg, post_cfg, str(out_root), limits)
        for log_dir in log_dirs
    ]
    results = []
    if args.jobs > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=args.jobs) as pool:
            for chunk in pool.map(_mine_one_log, tasks):
                results.extend(chunk)
    else:
        for task in tasks:
            results.extend(_mine_one_log(task))
    results.sort(key=lambda r: (r["log"], r["program"]))
    manifest = {
        "logs": [Path(t[0]).name for t in tasks],
        "programs": [name for name, _ in programs],
        "results": results,
    }
    with open(out_root / "run_manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=1, sort_keys=True)
        fh.write("\n")
    return 0


def _collect_outputs(root: Path) -> dict:
    """(log_id, description) -> scenario json path."""
    out = {}
    for json_path in sorted(root.glob("*/scenario_*.json")):
        scenario, description, log_id = read_scenario_output(json_path)
        out[(description, log_id)] = (scenario, json_path)
    return out


def cmd_eval(args) -> int:
    pred_root = Path(args.pred)
    gt_root = Path(args.gt)
    for root in (pred_root, gt_root):
        if not root.is_dir():
            print(f"error: {root} does not exist", file=sys.stderr)
            return 2
    preds = _collect_outputs(pred_root)
    gts = _collect_outputs(gt_root)
    only_pred = sorted(set(preds) - set(gts))
    only_gt = sorted(set(gts) - set(preds))
    if only_pred or only_gt:
        for key in only_pred:
            print(f"error: prediction without ground truth: {key}", file=sys.stderr)
        for key in only_gt:
            print(f"error: ground truth without prediction: {key}", file=sys.stderr)
        return 2

    logs_root = Path(args.logs)
    bundles = {}
    pred_bundles = {}
    for _, log_id in gts:
        if log_id not in bundles:
            bundles[log_id] = load_log_bundle(logs_root / log_id)
            if args.pred_logs:
                pred_bundles[log_id] = load_log_bundle(Path(args.pred_logs) / log_id)
    if not args.pred_logs:
        pred_bundles = bundles

    instances = []
    pred_sets = {}
    gt_sets = {}
    grids = {}
    for key in sorted(gts):
        description, log_id = key
        gt_scenario = gts[key][0]
        pred_scenario = preds[key][0]
        gt_tracks = bundles[log_id].track_map()
        pred_tracks = pred_bundles[log_id].track_map()
        instances.append((key, pred_tracks, pred_scenario, gt_tracks, gt_scenario))
        pred_sets[key] = pred_scenario
        gt_sets[key] = gt_scenario
        if log_id not in grids:
            bundle = bundles[log_id]
            anchor = min(int(t.timestamps[0]) for t in bundle.tracks)
            stamps = set()
            for track in bundle.tracks:
                stamps.update(
                    resample_grid(
                        track.timestamps, anchor, DEFAULT_POSTPROCESS_CONFIG.output_rate_hz
                    )
                )
            grids[log_id] = sorted(stamps)

    cfg = DEFAULT_EVAL_CONFIG
    per_prompt = {}
    for description in sorted({d for d, _ in gts}):
        subset = [inst for inst in instances if inst[0][0] == description]
        per_prompt[description] = {
            "hota_temporal": hota_pooled(subset, "temporal", cfg),
            "hota_track": hota_pooled(subset, "track", cfg),
            "logs": len(subset),
        }
    try:
        log_ba = balanced_accuracy(pred_sets, gt_sets, "log")
        ts_ba = balanced_accuracy(pred_sets, gt_sets, "timestamp", grids={k: v for k, v in grids.items()})
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    report = EvalReport(
        hota=hota_pooled(instances, "standard", cfg),
        hota_temporal=hota_pooled(instances, "temporal", cfg),
        hota_track=hota_pooled(instances, "track", cfg),
        log_balanced_accuracy=log_ba,
        timestamp_balanced_accuracy=ts_ba,
        per_prompt=per_prompt,
    )
    out_dir = Path(args.out) if args.out else pred_root
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "eval_report.json", "w", encoding="utf-8") as fh:
        json.dump(report.to_dict(), fh, indent=1, sort_keys=True)
        fh.write("\n")
    table = _format_report(report)
    (out_dir / "eval_report.txt").write_text(table, encoding="utf-8")
    print(table, end="")
    return 0


def _format_report(report: EvalReport) -> str:
    lines = [
        f"{'HOTA':24s} {report.hota:7.2f}",
        f"{'HOTA-Temporal':24s} {report.hota_temporal:7.2f}",
        f"{'HOTA-Track':24s} {report.hota_track:7.2f}",
        f"{'Log Bal. Acc.':24s} {report.log_balanced_accuracy:7.2f}",
        f"{'Timestamp Bal. Acc.':24s} {report.timestamp_balanced_accuracy:7.2f}",
    ]
    return "\n".join(lines) + "\n"


def cmd_gen(args) -> int:
    out_root = Path(args.out)
    scripts = []
    if args.script:
        for path in args.script:
            try:
                scripts.append(load_script(path))
            except (OSError, KeyError, ValueError) as exc:
                print(f"error: bad script {path}: {exc}", file=sys.stderr)
                return 2
    if args.fixtures:
        scripts.extend(build() for build in FIXTURE_SCRIPTS.values())
    if args.random:
        scripts.extend(random_script(args.seed + i) for i in range(args.random))
    if not scripts:
        print("error: nothing to generate (use --script, --fixtures, or --random)", file=sys.stderr)
        return 2
    for script in scripts:
        try:
            scene_dir = save_scene(script, out_root)
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        if script.queries:
            bundle = generate_scene(script)
            gt_dir = scene_dir / "gt"
            for description, scenario in sorted(label_scene(bundle, script.queries).items()):
                write_scenario_output(scenario, description, script.name, gt_dir)
        log.info("generated %s", scene_dir)
    return 0


def cmd_validate(args) -> int:
    failures = 0
    for path in args.files:
        source = Path(path).read_text(encoding="utf-8")
        try:
            program = dsl.parse_program(dsl.extract_code_block(source))
            diags = dsl.validate_program(program)
        except N.ProgramParseError as exc:
            diags = exc.diagnostics
        for d in diags:
            failures += 1
            print(f"{path}: {d}")
        if not diags:
            for w in dsl.lint_program(program):
                print(f"{path}: warning: {w}")
    return 1 if failures else 0


def cmd_synth(args) -> int:
    prompts = [
        line.strip()
        for line in Path(args.prompts).read_text(encoding="utf-8").splitlines()
        if line.strip()
    ]
    if not prompts:
        print("error: no prompts", file=sys.stderr)
        return 2
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    config = SynthesisConfig(
        endpoint=args.endpoint, model=args.model, max_retries=args.max_retries
    )
    failures = 0
    for i, prompt in enumerate(prompts):
        name = f"prompt_{i:03d}_{prompt_hash(prompt)}"
        try:
            outcome = synthesize(prompt, config)
        except SynthesisFailure as exc:
            failures += 1
            print(f"{name}: {exc}", file=sys.stderr)
            continue
        (out_dir / f"{name}.py").write_text(outcome.source, encoding="utf-8")
        print(f"{name}: ok after {outcome.attempts} attempt(s)")
    print(f"failure rate: {failures}/{len(prompts)}")
    return 1 if failures else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scenariomine",
        description="Mine, score, and generate spatio-temporal driving scenarios.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mine", help="run scenario programs over logs")
    p.add_argument("--logs", required=True, help="root directory of log bundles")
    p.add_argument("--programs", help="directory of program files (.py/.txt)")
    p.add_argument("--prompts", help="text file with one description per line")
    p.add_argument("--synthesize", action="store_true", help="synthesize programs from prompts")
    p.add_argument("--endpoint", help="LLM endpoint URL")
    p.add_argument("--model", help="LLM model name")
    p.add_argument("--out", required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--config", help="engine constants file (key = value)")
    p.add_argument("--post-config", help="postprocess constants file (key = value)")
    p.add_argument("--dry-run", action="store_true", help="parse and validate only")
    p.set_defaults(func=cmd_mine)

    p = sub.add_parser("eval", help="score predictions against ground truth")
    p.add_argument("--pred", required=True)
    p.add_argument("--gt", required=True)
    p.add_argument("--logs", required=True, help="root of log bundles (geometry)")
    p.add_argument("--pred-logs", help="separate geometry root for predictions")
    p.add_argument("--out", help="directory for eval_report.{json,txt}")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("gen", help="generate synthetic log bundles")
    p.add_argument("--script", action="append", help="scene script JSON (repeatable)")
    p.add_argument("--fixtures", action="store_true", help="generate the frozen fixtures")
    p.add_argument("--random", type=int, default=0, metavar="N")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("validate", help="parse and validate program files")
    p.add_argument("files", nargs="*")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("synth", help="synthesize programs from prompts")
    p.add_argument("--prompts", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--endpoint", required=True)
    p.add_argument("--model", default="")
    p.add_argument("--max-retries", type=int, default=3)
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(asctime)s %(name)s %(levelname)s %(message)s",
        stream=sys.stderr,
    )
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
