"""Command line entry point: ``cmax run|suite|sweep|table``."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from cmax.harness.config import ConfigError, ExperimentConfig
from cmax.harness.experiments import SWEEP_DEFAULTS, batch_to_json, run_batch, sweep
from cmax.harness.plot import line_chart_svg
from cmax.harness.stats import rows_to_csv, summarize
from cmax.harness.suites import SUITES, TABLES, arm_config, push_config


def _emit(text: str, out: str | None, name: str) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    (path / name).write_text(text)
    print(f"wrote {path / name}", file=sys.stderr)


def _load(path: str | None, default: ExperimentConfig | None = None) -> ExperimentConfig:
    if path is None:
        if default is None:
            raise ConfigError("--config: required for this command")
        return default
    return ExperimentConfig.load(path)


def _suite_json(results) -> str:
    return json.dumps(
        [
            {
                "suite": r.name,
                "passed": r.passed,
                "seconds": round(r.seconds, 3),
                "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in r.checks],
                "rows": [vars(row) for row in r.rows],
            }
            for r in results
        ],
        indent=2,
    ) + "\n"


def cmd_run(args) -> int:
    cfg = _load(args.config)
    if args.seeds is not None:
        cfg = replace(cfg, environment=replace(cfg.environment, n_seeds=args.seeds))
    records = run_batch(cfg, args.jobs)
    if args.format == "json":
        _emit(batch_to_json(cfg, records) + "\n", args.out, f"{cfg.name}.json")
    else:
        row = summarize(records, cfg.algorithm.name, cfg.condition)
        _emit(rows_to_csv([row]), args.out, f"{cfg.name}.csv")
    return 0


def cmd_suite(args) -> int:
    names = list(SUITES) if "all" in args.names else args.names
    results = []
    for name in names:
        kwargs = {"n": args.seeds} if args.seeds is not None and name not in ("invariants", "pickplace") else {}
        if name == "arm":
            kwargs["jobs"] = args.jobs
        res = SUITES[name](**kwargs)
        results.append(res)
        for line in res.lines():
            print(f"[{name}] {line}", file=sys.stderr)
    if args.format == "json":
        _emit(_suite_json(results), args.out, "suites.json")
    else:
        rows = [row for r in results for row in r.rows]
        if rows:
            _emit(rows_to_csv(rows), args.out, "suites.csv")
    return 0 if all(r.passed for r in results) else 1


def cmd_sweep(args) -> int:
    # gamma is swept on the arm, delta on pushing
    default = arm_config("cmax") if args.param == "gamma" else push_config("cmax", obstacles=True)
    cfg = _load(args.config, default)
    values, rows = sweep(cfg, args.param, args.values, n=args.seeds or 10, jobs=args.jobs)
    extra = {args.param: [f"{v:g}" for v in values]}
    if args.format == "json":
        _emit(json.dumps([{args.param: v, **vars(r)} for v, r in zip(values, rows)], indent=2) + "\n",
              args.out, f"sweep_{args.param}.json")
    else:
        _emit(rows_to_csv(rows, extra), args.out, f"sweep_{args.param}.csv")
    if args.out is not None:
        svg = line_chart_svg(values, [r.mean_steps for r in rows], f"{args.param} sweep",
                             args.param, "mean steps (successes)")
        _emit(svg, args.out, f"sweep_{args.param}.svg")
    return 0


def cmd_table(args) -> int:
    kwargs = {"jobs": args.jobs}
    if args.seeds is not None:
        kwargs["n"] = args.seeds
    res = TABLES[args.name](**kwargs)
    for line in res.lines():
        print(f"[{args.name}] {line}", file=sys.stderr)
    if args.format == "json":
        _emit(_suite_json([res]), args.out, f"table_{args.name}.json")
    else:
        _emit(rows_to_csv(res.rows), args.out, f"table_{args.name}.csv")
    return 0 if res.passed else 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML experiment config")
    common.add_argument("--seeds", type=int, help="number of seeded trials (overrides the default)")
    common.add_argument("--out", help="output directory (default: stdout)")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for independent trials")
    common.add_argument("--format", choices=("json", "csv"), default="csv")

    p = argparse.ArgumentParser(prog="cmax", description="Real-time planning with inaccurate models.")
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("run", parents=[common], help="run one config").set_defaults(func=cmd_run)

    s = sub.add_parser("suite", parents=[common], help="bound and invariant suites")
    s.add_argument("names", nargs="*", default=["all"], choices=[*SUITES, "all"])
    s.set_defaults(func=cmd_suite)

    w = sub.add_parser("sweep", parents=[common], help="vary gamma or delta")
    w.add_argument("--param", choices=sorted(SWEEP_DEFAULTS), required=True)
    w.add_argument("--values", type=float, nargs="+")
    w.set_defaults(func=cmd_sweep)

    t = sub.add_parser("table", parents=[common], help="reproduction tables")
    t.add_argument("name", choices=sorted(TABLES))
    t.set_defaults(func=cmd_table)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
