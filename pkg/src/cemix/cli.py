"""Command-line harness.

Verbs:
  run <config.yaml>      one experiment from a config file
  table <id> [--seed]    reproduce a benchmark table
  models                 list available models and init strategies

Exit codes: 0 success, 2 config error, 3 degenerate update, 4 stagnant
rarity.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import yaml

from .errors import CemixError, ConfigError, DegenerateUpdate, StagnantRarity
from .experiments import (
    CSV_HEADER,
    ExperimentConfig,
    list_models,
    reproduce_table,
    run_experiment,
)

EXIT_CONFIG = 2
EXIT_DEGENERATE = 3
EXIT_STAGNANT = 4


def load_config(path: str) -> ExperimentConfig:
    raw = yaml.safe_load(Path(path).read_text())
    if not isinstance(raw, dict) or "model" not in raw or "init" not in raw:
        raise ConfigError("config needs at least 'model' and 'init' sections")
    model = dict(raw["model"])
    try:
        name = model.pop("name")
    except KeyError:
        raise ConfigError("model section needs a 'name'") from None
    ce = raw.get("ce", {})
    sampling = raw.get("sampling", {})
    return ExperimentConfig(
        model=name,
        model_params=model,
        init=dict(raw["init"]),
        pilot_size=int(ce.get("pilot_size", 10000)),
        iterations=int(ce.get("iterations", 5)),
        weight_floor=float(ce.get("weight_floor", 1e-4)),
        n_final=int(sampling.get("n", 100000)),
        seed=int(sampling.get("seed", 0)),
        output=str(raw.get("output", {}).get("path", "")) if raw.get("output") else "",
        label=str(raw.get("label", name)),
    )


def _echo_config(cfg: ExperimentConfig, out):
    print(f"# model={cfg.model} params={cfg.model_params} init={cfg.init} "
          f"pilot={cfg.pilot_size} iterations={cfg.iterations} "
          f"n={cfg.n_final} weight_floor={cfg.weight_floor} seed={cfg.seed}",
          file=out)


def _print_rows(rows, out=None):
    out = out or sys.stdout
    cols = ["table", "row", "K_or_ab", "estimate", "std_error", "rel_error",
            "var_ratio", "flags"]
    cells = [[str(r.table), str(r.row), r.label, f"{r.estimate:.6g}",
              f"{r.std_error:.6g}", f"{r.rel_error:.4%}", f"{r.var_ratio:.4g}",
              "|".join(r.flags) or "-"] for r in rows]
    widths = [max(len(c), *(len(row[i]) for row in cells))
              for i, c in enumerate(cols)]
    print("  ".join(c.ljust(w) for c, w in zip(cols, widths)), file=out)
    for row in cells:
        print("  ".join(c.ljust(w) for c, w in zip(row, widths)), file=out)


def _write_csv(rows, path):
    lines = [CSV_HEADER] + [r.csv_line() for r in rows]
    Path(path).write_text("\n".join(lines) + "\n")


def cmd_run(args) -> int:
    cfg = load_config(args.config)
    _echo_config(cfg, sys.stdout)
    row = run_experiment(cfg)
    _print_rows([row])
    out_path = args.output or cfg.output
    if out_path:
        _write_csv([row], out_path)
    return 0


def cmd_table(args) -> int:
    rows = reproduce_table(args.table_id, seed=args.seed)
    for row in rows:
        _echo_config(row.config, sys.stdout)
    _print_rows(rows)
    if args.output:
        _write_csv(rows, args.output)
    return 0


def cmd_models(args) -> int:
    for entry in list_models():
        inits = ", ".join(entry["init_methods"])
        params = ", ".join(entry["parameters"])
        print(f"{entry['name']}\n  parameters: {params}\n  init methods: {inits}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="cemix",
        description="Mixture importance sampling experiments via cross-entropy/EM.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one experiment from a YAML config")
    p_run.add_argument("config")
    p_run.add_argument("--output", default=None, help="CSV output path")
    p_run.set_defaults(fn=cmd_run)

    p_table = sub.add_parser("table", help="reproduce a benchmark table (1-9)")
    p_table.add_argument("table_id", type=int)
    p_table.add_argument("--seed", type=int, default=0)
    p_table.add_argument("--output", default=None, help="CSV output path")
    p_table.set_defaults(fn=cmd_table)

    p_models = sub.add_parser("models", help="list models and init strategies")
    p_models.set_defaults(fn=cmd_models)

    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DegenerateUpdate as exc:
        where = f" (iteration {exc.iteration})" if exc.iteration else ""
        print(f"degenerate update{where}: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except StagnantRarity as exc:
        print(f"stagnant rarity: {exc}", file=sys.stderr)
        return EXIT_STAGNANT
    except CemixError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
