"""``driftbench`` command line: personas, simulate, inject, detect, benchmark.

Exit codes: 0 success, 1 I/O failure, 2 usage or validation error, 3 some
benchmark cells failed.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from .anomaly import SPEEDS, InjectionError, inject, make_spec
from .features import EmbeddingError, HashingEmbedder, HttpEmbedder
from .generation import HttpTextGenerator
from .logfile import LogFormatError, atomic_write_text, read_log, write_log
from .persona import PersonaValidationError, dump_personas, get_persona, load_personas
from .simulator import run_simulation

EXIT_OK, EXIT_IO, EXIT_USAGE, EXIT_PARTIAL = 0, 1, 2, 3
WORKERS_ENV = "DRIFTBENCH_WORKERS"


class UsageError(Exception):
    pass


def _personas(path):
    if path is None:
        return load_personas()
    with open(path, encoding="utf-8") as fh:
        return load_personas(fh.read())


def _persona(args, pid):
    try:
        return get_persona(_personas(args.personas), pid)
    except KeyError:
        raise UsageError(f"unknown persona id {pid}") from None


def _generator():
    url = os.environ.get("TEXTGEN_URL")
    return HttpTextGenerator(url) if url else None


def _embedder():
    url = os.environ.get("EMBED_URL")
    return HttpEmbedder(url) if url else HashingEmbedder()


def _json_arg(text, what):
    """Inline JSON, or a path to a JSON file."""
    if text is None:
        return {}
    if os.path.isfile(text):
        with open(text, encoding="utf-8") as fh:
            text = fh.read()
    try:
        value = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{what}: invalid JSON ({exc})") from None
    if not isinstance(value, dict):
        raise UsageError(f"{what}: expected a JSON object")
    return value


# --------------------------------------------------------------------------
# subcommands


def cmd_personas(args, out):
    if args.action == "list":
        personas = _personas(args.personas)
        if args.json:
            out.write(dump_personas(personas) + "\n")
            return EXIT_OK
        out.write("id\ttone\tstyle\texpressiveness\tmodality\n")
        for p in personas:
            out.write(f"{p.id}\t{p.describe()}\t{p.style}\t{p.expressiveness}\t{p.modality}\n")
        return EXIT_OK
    with open(args.file, encoding="utf-8") as fh:
        personas = load_personas(fh.read())
    out.write(f"ok: {len(personas)} personas\n")
    return EXIT_OK


def cmd_simulate(args, out):
    if args.days < 1:
        raise UsageError("--days must be positive")
    persona = _persona(args, args.persona)
    log = run_simulation(persona, args.days, args.seed, _generator())
    write_log(log, args.out)
    acked = sum(r.acknowledged for r in log.records)
    out.write(f"{len(log.records)} records ({acked} acknowledged) -> {args.out}\n")
    for w in log.warnings:
        out.write(f"warning: {w}\n")
    return EXIT_OK


def cmd_inject(args, out):
    from .evaluation.pipeline import injection_rng

    log = read_log(args.infile)
    try:
        persona = get_persona(_personas(args.personas), log.persona_id)
    except KeyError:
        persona = None
    rng = injection_rng(args.seed, log.persona_id, args.type, args.speed)
    spec = make_spec(args.type, args.speed, log.horizon_days, rng, spec_id=f"{args.type}-{args.speed}")
    labeled = inject(log, spec, rng, persona=persona)
    write_log(labeled, args.out)
    n = sum(r.anomaly_label is not None for r in labeled.records)
    out.write(f"{spec.anomaly_type} {spec.speed}: days {spec.t_start_day}-{spec.end_day - 1} "
              f"(d={spec.duration_days}), {n} records modified -> {args.out}\n")
    return EXIT_OK


def cmd_detect(args, out):
    from .evaluation.pipeline import TASK_METHODS, LogView, run_flatten_method, run_offtopic_method

    log = read_log(args.infile)
    task = args.task or (log.anomaly_spec.anomaly_type if log.anomaly_spec else None)
    if task is None:
        raise UsageError("log has no anomaly spec; pass --task")
    if args.method not in TASK_METHODS[task]:
        raise UsageError(f"method {args.method!r} does not apply to task {task!r}; "
                         f"valid methods: {', '.join(TASK_METHODS[task])}")
    params = _json_arg(args.params, "--params")
    view = LogView.of(log)
    if task == "flattened_sentiment":
        o = run_flatten_method(view, args.method, params)
    else:
        o = run_offtopic_method(log, view, args.method, params, _embedder())
    metrics = {"f1": o.f1}
    if task == "flattened_sentiment":
        metrics.update(delay_days=o.delay_days, detected=o.detected, episodes=o.episodes)
    else:
        metrics["roc_auc"] = o.roc_auc
    doc = {
        "format_version": 1, "persona_id": log.persona_id, "seed": log.seed, "task": task,
        "method": args.method, "params": params, "threshold": float(o.threshold),
        "metrics": metrics if view.labels.any() else None,
        "records": [{"event_id": r.event.event_id, "score": float(s), "flag": bool(f)}
                    for r, s, f in zip(view.records, o.scores, o.flags)],
    }
    atomic_write_text(args.out, json.dumps(doc, sort_keys=True, indent=1) + "\n")
    out.write(f"{args.method} on {task}: {int(np.sum(o.flags))} of {len(view.records)} "
              f"responses flagged -> {args.out}\n")
    return EXIT_OK


def cmd_benchmark(args, out):
    from .evaluation.benchmark import BenchmarkConfig, run_benchmark
    from .evaluation.report import write_report

    doc = _json_arg(args.config, "--config") if args.config else {}
    if args.out:
        doc["output_dir"] = args.out
    if args.seed is not None:
        doc["seeds"] = [args.seed]
    for key, env in (("textgen_url", "TEXTGEN_URL"), ("embed_url", "EMBED_URL")):
        if os.environ.get(env) and key not in doc:
            doc[key] = os.environ[env]
    config = BenchmarkConfig.from_dict(doc)
    workers = args.workers or _env_workers() or config.workers
    report = run_benchmark(config, workers)
    paths = write_report(report, config.output_dir)
    out.write(f"{len(report.results)} cells, {len(report.failures)} failed; "
              f"wrote {len(paths)} files to {config.output_dir}\n")
    for f in report.failures:
        out.write(f"failed {f.cell_id}: {f.error}: {f.message}\n")
    return EXIT_OK if report.ok else EXIT_PARTIAL


def _env_workers():
    raw = os.environ.get(WORKERS_ENV)
    if not raw:
        return None
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"{WORKERS_ENV} must be a positive integer") from None
    if n < 1:
        raise UsageError(f"{WORKERS_ENV} must be a positive integer")
    return n


# --------------------------------------------------------------------------


def _positive_int(text):
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return n


def _seed(text):
    n = int(text)
    if not 0 <= n < 2**64:
        raise argparse.ArgumentTypeError("seed must be in [0, 2^64)")
    return n


def build_parser():
    from .evaluation.pipeline import FLATTEN_METHODS, OFFTOPIC_METHODS, TASKS

    parser = argparse.ArgumentParser(prog="driftbench", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("personas", help="list or validate persona definitions")
    p.add_argument("--personas", metavar="FILE", help="persona JSON file instead of the built-ins")
    psub = p.add_subparsers(dest="action", required=True)
    pl = psub.add_parser("list", help="show personas")
    pl.add_argument("--json", action="store_true", help="print the full JSON document")
    pv = psub.add_parser("validate", help="validate a persona JSON file")
    pv.add_argument("file")
    p.set_defaults(func=cmd_personas)

    p = sub.add_parser("simulate", help="simulate one persona's interaction log")
    p.add_argument("--persona", type=int, required=True)
    p.add_argument("--seed", type=_seed, required=True)
    p.add_argument("--days", type=int, default=60)
    p.add_argument("--out", required=True)
    p.add_argument("--personas", metavar="FILE", help="persona JSON file instead of the built-ins")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("inject", help="inject one labeled anomaly window into a log")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--type", choices=TASKS, required=True)
    p.add_argument("--speed", choices=SPEEDS, required=True)
    p.add_argument("--seed", type=_seed, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--personas", metavar="FILE", help="persona JSON file instead of the built-ins")
    p.set_defaults(func=cmd_inject)

    p = sub.add_parser("detect", help="run one detector over a log")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--method", choices=sorted(set(FLATTEN_METHODS) | set(OFFTOPIC_METHODS)),
                   required=True)
    p.add_argument("--task", choices=TASKS, help="defaults to the log's anomaly type")
    p.add_argument("--params", help="detector parameters as JSON or a JSON file path")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("benchmark", help="run the full benchmark and write reports")
    p.add_argument("--config", help="benchmark config JSON file (defaults to the full grid)")
    p.add_argument("--out", help="output directory (overrides the config)")
    p.add_argument("--seed", type=_seed, help="run a single seed (overrides the config)")
    p.add_argument("--workers", type=_positive_int,
                   help=f"parallel worker processes (default: ${WORKERS_ENV} or all CPUs)")
    p.set_defaults(func=cmd_benchmark)
    return parser


def main(argv=None, out=None):
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, out)
    except (UsageError, PersonaValidationError, InjectionError, LogFormatError) as exc:
        print(f"driftbench: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, EmbeddingError) as exc:
        print(f"driftbench: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"driftbench: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
