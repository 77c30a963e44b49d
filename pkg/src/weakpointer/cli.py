"""Command-line interface.

Examples::

    weakpointer simulate --scenario S-B --no-timestamp
    weakpointer sweep --scenario S-A --format csv --out sa.csv
    weakpointer sweep --scenario S-B --vary pointer.b=-0.05,0,0.05 --format csv
    weakpointer verify --config my_run.json

Exit codes: 0 success, 2 configuration error, 3 physics error.
"""

import argparse
import csv
import datetime
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import __version__
from .config import dump_config, load_config, normalize_config, scenario_from_config, set_path
from .errors import ConfigError, InvalidInput, PhysicsError, WeakPointerError
from .report import (
    SWEEP_COLUMNS,
    format_cell,
    predict_report,
    simulate_report,
    sweep_row,
    verify_report,
    weak_value_report,
)
from .scenarios import registry_config

EXIT_CONFIG = 2
EXIT_PHYSICS = 3


def _add_common(p):
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--config", metavar="PATH", help="JSON scenario config")
    src.add_argument("--scenario", metavar="NAME", help="built-in scenario (S-A, S-B, S-C, REAL, D1)")
    p.add_argument("--gamma", type=float, help="override constants.gamma")
    p.add_argument("--out", metavar="PATH", help="write output here instead of stdout")
    p.add_argument("--format", choices=("structured", "csv"), default="structured")
    p.add_argument("--no-timestamp", action="store_true", help="omit the generated_at field")


def build_parser():
    parser = argparse.ArgumentParser(prog="weakpointer", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    _add_common(sub.add_parser("weak-value", help="weak value and weak moments"))
    _add_common(sub.add_parser("simulate", help="exact oracle next to first-order predictions"))
    _add_common(sub.add_parser("predict", help="first-order predictions only"))
    p = sub.add_parser("verify", help="identity, rate and convergence-order suites")
    _add_common(p)
    p.add_argument("--gammas", type=float, nargs="+", help="override run.gammas")
    p = sub.add_parser("sweep", help="tabulate a run over couplings or a config parameter")
    _add_common(p)
    p.add_argument("--gammas", type=float, nargs="*", help="override run.gammas")
    p.add_argument("--vary", metavar="KEY=V1,V2,...", help="sweep a config parameter at fixed gamma")
    p.add_argument("--workers", type=int, default=1, help="parallel worker processes")
    _add_common(sub.add_parser("show-config", help="print the canonical config"))
    return parser


def _load_tree(args):
    if args.config:
        tree = load_config(args.config)
        name = Path(args.config).stem
    else:
        tree = normalize_config(registry_config(args.scenario))
        name = args.scenario
    if args.gamma is not None:
        tree["constants"]["gamma"] = float(args.gamma)
    return tree, name


def _stamp(report, args):
    if not args.no_timestamp:
        report["generated_at"] = datetime.datetime.now(datetime.timezone.utc).isoformat()
    return report


def _flatten(tree, prefix=""):
    if isinstance(tree, dict):
        for k, v in tree.items():
            yield from _flatten(v, f"{prefix}.{k}" if prefix else str(k))
    else:
        yield prefix, tree


def _render(report, fmt):
    if fmt == "structured":
        return json.dumps(report, indent=2, sort_keys=True, allow_nan=False) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("key", "value"))
    for k, v in _flatten(report):
        w.writerow((k, json.dumps(v) if isinstance(v, list) else format_cell(v)))
    return buf.getvalue()


def _emit(text, out):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _sweep_point(job):
    tree, name, point, parameter, value, gamma = job
    if parameter != "gamma":
        tree = set_path(tree, parameter, value)
    try:
        scenario = scenario_from_config(tree, name=name)
    except WeakPointerError as exc:
        row = dict.fromkeys(SWEEP_COLUMNS)
        row.update(point=point, parameter=parameter, value=value, gamma=gamma, status="error",
                   error=f"{type(exc).__name__}: {exc}")
        return row
    return sweep_row(scenario, gamma, point, parameter, value)


def _parse_vary(spec):
    key, sep, values = spec.partition("=")
    if not sep or not key:
        raise ConfigError("expected KEY=V1,V2,...", key="--vary")
    try:
        vals = [float(v) for v in values.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"non-numeric value in {values!r}", key="--vary") from None
    return key, vals


def run_sweep(tree, name, args):
    run = tree["run"]
    gamma = tree["constants"]["gamma"]
    if args.vary:
        parameter, values = _parse_vary(args.vary)
    elif "sweep" in run:
        parameter, values = run["sweep"]["parameter"], run["sweep"]["values"]
    else:
        parameter = "gamma"
        values = run["gammas"] if args.gammas is None else list(args.gammas)
    if not values:
        raise ConfigError("sweep needs at least one point", key="run.gammas" if parameter == "gamma" else "--vary")
    if parameter != "gamma":
        set_path(tree, parameter, values[0])  # fails early on a bad key path
    jobs = [
        (tree, name, i, parameter, v, float(v) if parameter == "gamma" else gamma)
        for i, v in enumerate(values)
    ]
    if args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as ex:
            rows = list(ex.map(_sweep_point, jobs))
    else:
        rows = [_sweep_point(j) for j in jobs]
    return rows


def _render_rows(rows, fmt, args):
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(SWEEP_COLUMNS)
        for row in rows:
            w.writerow([format_cell(row[c]) for c in SWEEP_COLUMNS])
        return buf.getvalue()
    from .report import jsonable

    return _render(_stamp({"columns": list(SWEEP_COLUMNS), "rows": jsonable(rows)}, args), "structured")


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "sweep" and args.workers < 1:
            raise ConfigError("must be >= 1", key="--workers")
        tree, name = _load_tree(args)
        if args.command == "show-config":
            _emit(dump_config(tree), args.out)
            return 0
        if args.command == "sweep":
            rows = run_sweep(tree, name, args)
            _emit(_render_rows(rows, args.format, args), args.out)
            if not any(r["status"] == "ok" for r in rows):
                print("error: every sweep point failed", file=sys.stderr)
                return EXIT_PHYSICS
            return 0
        scenario = scenario_from_config(tree, name=name)
        epsilon = tree["run"]["epsilon"]
        if args.command == "weak-value":
            report = weak_value_report(scenario)
        elif args.command == "predict":
            report = predict_report(scenario, epsilon=epsilon)
        elif args.command == "simulate":
            report = simulate_report(scenario, epsilon=epsilon)
        else:
            gammas = tree["run"]["gammas"] if args.gammas is None else args.gammas
            report = verify_report(scenario, gammas, tree["run"]["potential"], tree["run"]["dt"])
        report["command"] = args.command
        _emit(_render(_stamp(report, args), args.format), args.out)
        return 0
    except InvalidInput as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except PhysicsError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_PHYSICS


if __name__ == "__main__":
    raise SystemExit(main())
