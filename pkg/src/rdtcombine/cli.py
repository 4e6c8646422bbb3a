"""Command-line interface: evaluate, simulate, rank.

Configuration can come from a JSON file (``--config``); explicit flags win
over file values.  Output files are written to temporary names and renamed
only on success, so a failing run leaves no partial artifacts.  Every
output embeds its configuration, making reruns reproducible from the
outputs alone.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

from rdtcombine import __version__
from rdtcombine import evaluate as ev
from rdtcombine import sim as simmod
from rdtcombine.combine import METHODS
from rdtcombine.data import DatasetError, load_csv
from rdtcombine.scoring import SCORERS

_EXIT_OK = 0
_EXIT_ERROR = 1
_EXIT_SKIPPED = 2


def _parse_int_list(text: str) -> tuple[int, ...]:
    return tuple(int(part) for part in text.split(",") if part.strip())


def _parse_float_list(text: str) -> tuple[float, ...]:
    return tuple(float(part) for part in text.split(",") if part.strip())


def _parse_methods(text: str, allowed) -> tuple[str, ...]:
    if text == "all":
        return tuple(allowed)
    chosen = tuple(part.strip() for part in text.split(",") if part.strip())
    for m in chosen:
        if m not in allowed:
            raise ValueError(f"unknown method {m!r}; expected one of {allowed}")
    return chosen


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    p = Path(path)
    if not p.exists():
        raise FileNotFoundError(f"config file not found: {p}")
    return json.loads(p.read_text(encoding="utf-8"))


def _setting(args, config: dict, key: str, default):
    value = getattr(args, key, None)
    if value is not None:
        return value
    if key in config:
        return config[key]
    return default


class _AtomicOutputs:
    """Write files under temporary names; publish all of them on success."""

    def __init__(self):
        self.pending: list[tuple[Path, Path]] = []

    def stage(self, final: Path) -> Path:
        tmp = final.with_name(final.name + ".tmp")
        self.pending.append((tmp, final))
        return tmp

    def commit(self):
        for tmp, final in self.pending:
            os.replace(tmp, final)
        self.pending.clear()

    def abort(self):
        for tmp, _ in self.pending:
            tmp.unlink(missing_ok=True)
        self.pending.clear()


def _cmd_evaluate(args) -> int:
    config = _load_config(args.config)
    dataset_paths = list(args.datasets) or list(config.get("datasets", []))
    if not dataset_paths:
        print("evaluate: no datasets given (positional args or config)", file=sys.stderr)
        return _EXIT_ERROR
    out_dir = Path(_setting(args, config, "out", "results"))
    trees = int(_setting(args, config, "trees", 100))
    leaf_sizes = _setting(args, config, "leaf_sizes", (1, 2, 3, 4, 8, 32))
    if isinstance(leaf_sizes, str):
        leaf_sizes = _parse_int_list(leaf_sizes)
    leaf_sizes = tuple(int(s) for s in leaf_sizes)
    methods = _setting(args, config, "methods", "all")
    if isinstance(methods, str):
        methods = _parse_methods(methods, METHODS)
    methods = tuple(methods)
    seed = int(_setting(args, config, "seed", 0))
    repetitions = int(_setting(args, config, "repetitions", 5))
    jobs = int(_setting(args, config, "jobs", 1))
    label = _setting(args, config, "label_col", None)
    positive = _setting(args, config, "positive_label", None)
    nominal = _setting(args, config, "nominal", ())
    if isinstance(nominal, str):
        nominal = tuple(part.strip() for part in nominal.split(",") if part.strip())

    datasets = []
    for path in dataset_paths:
        try:
            datasets.append(
                load_csv(path, label=label, positive_label=positive, nominal=tuple(nominal))
            )
        except (DatasetError, OSError) as exc:
            print(f"evaluate: cannot load {path}: {exc}", file=sys.stderr)
            return _EXIT_ERROR

    report = ev.run_experiment(
        datasets,
        k=trees,
        leaf_sizes=leaf_sizes,
        methods=methods,
        seed=seed,
        repetitions=repetitions,
        jobs=jobs,
        backend=args.backend,
    )

    out_dir.mkdir(parents=True, exist_ok=True)
    outputs = _AtomicOutputs()
    try:
        ev.write_results_csv(report, outputs.stage(out_dir / "results.csv"))
        ev.write_report_json(report, outputs.stage(out_dir / "report.json"))
        outputs.commit()
    except Exception:
        outputs.abort()
        raise

    _print_summary(report)
    if report.skipped:
        print(f"evaluate: {len(report.skipped)} cell group(s) skipped; see report.json")
        return _EXIT_SKIPPED
    return _EXIT_OK


def _print_summary(report: ev.EvaluationReport) -> None:
    by_dataset: dict[str, dict[str, list[float]]] = {}
    for r in report.results:
        by_dataset.setdefault(r.dataset, {}).setdefault(r.method, []).append(r.auc)
    acc: dict[str, dict[str, list[float]]] = {}
    for r in report.results:
        acc.setdefault(r.dataset, {}).setdefault(r.method, []).append(r.accuracy)
    for dataset in sorted(by_dataset):
        print(f"\n{dataset}")
        print(f"  {'method':<10} {'mean AUC':>10} {'mean acc':>10}")
        for method in METHODS:
            if method not in by_dataset[dataset]:
                continue
            mean_auc = sum(by_dataset[dataset][method]) / len(by_dataset[dataset][method])
            mean_acc = sum(acc[dataset][method]) / len(acc[dataset][method])
            print(f"  {method:<10} {mean_auc:>10.4f} {mean_acc:>10.4f}")


def _cmd_simulate(args) -> int:
    config = _load_config(args.config)
    mode = _setting(args, config, "mode", "ensemble")
    if mode not in ("leaf", "ensemble"):
        print(f"simulate: unknown mode {mode!r}", file=sys.stderr)
        return _EXIT_ERROR
    allowed = SCORERS if mode == "leaf" else METHODS
    methods = _setting(args, config, "methods", "all")
    try:
        if isinstance(methods, str):
            methods = _parse_methods(methods, allowed)
        else:
            methods = _parse_methods(",".join(methods), allowed)
        quantiles = _setting(args, config, "quantiles", simmod.DEFAULT_QUANTILES)
        if isinstance(quantiles, str):
            quantiles = _parse_float_list(quantiles)
        cfg = simmod.SimConfig(
            p_pos=float(_setting(args, config, "p_pos", 0.75)),
            max_n=int(_setting(args, config, "max_n", 100)),
            trials=int(_setting(args, config, "trials", 100)),
            ensemble_leaves=int(_setting(args, config, "leaves", 100)),
            seed=int(_setting(args, config, "seed", 0)),
            quantiles=tuple(quantiles),
        )
    except ValueError as exc:
        print(f"simulate: {exc}", file=sys.stderr)
        return _EXIT_ERROR

    out_dir = Path(_setting(args, config, "out", "sim"))
    out_dir.mkdir(parents=True, exist_ok=True)
    outputs = _AtomicOutputs()
    try:
        for method in methods:
            if mode == "leaf":
                summary = simmod.simulate_scorer(cfg, method)
            else:
                summary = simmod.simulate_combiner(cfg, method, backend=args.backend)
            simmod.write_sim_csv(summary, cfg, outputs.stage(out_dir / f"sim_{method}.csv"))
        outputs.commit()
    except Exception:
        outputs.abort()
        raise
    print(f"simulate: wrote {len(methods)} file(s) to {out_dir}")
    return _EXIT_OK


def _parse_band(text: str) -> tuple[float, float]:
    sep = ":" if ":" in text else ","
    parts = text.split(sep)
    if len(parts) != 2:
        raise ValueError(f"expected LO:HI, got {text!r}")
    lo, hi = float(parts[0]), float(parts[1])
    if not 0.0 <= lo <= hi <= 1.0:
        raise ValueError(f"band {text!r} must satisfy 0 <= LO <= HI <= 1")
    return lo, hi


def _cmd_rank(args) -> int:
    rows = []
    ratios: dict[str, float] = {}
    for raw in args.inputs:
        path = Path(raw)
        csv_path = path / "results.csv" if path.is_dir() else path
        if not csv_path.exists():
            print(f"rank: no such results file: {csv_path}", file=sys.stderr)
            return _EXIT_ERROR
        try:
            part, _config = ev.read_results_csv(csv_path)
        except (ValueError, OSError) as exc:
            print(f"rank: cannot read {csv_path}: {exc}", file=sys.stderr)
            return _EXIT_ERROR
        rows.extend(part)
        report_path = csv_path.parent / "report.json"
        if report_path.exists():
            doc = json.loads(report_path.read_text(encoding="utf-8"))
            for entry in doc.get("datasets", []):
                ratios[entry["name"]] = entry["class_ratio"]

    if args.class_ratio_band:
        try:
            lo, hi = _parse_band(args.class_ratio_band)
        except ValueError as exc:
            print(f"rank: {exc}", file=sys.stderr)
            return _EXIT_ERROR
        names = {r.dataset for r in rows}
        unknown = sorted(n for n in names if n not in ratios)
        if unknown:
            print(
                f"rank: class ratios unknown for {unknown}; report.json missing",
                file=sys.stderr,
            )
            return _EXIT_ERROR
        rows = [r for r in rows if lo <= ratios[r.dataset] <= hi]
        if not rows:
            print("rank: no datasets fall inside the class-ratio band", file=sys.stderr)
            return _EXIT_ERROR

    try:
        table = ev.rank_table(rows, args.metric)
    except ValueError as exc:
        print(f"rank: {exc}", file=sys.stderr)
        return _EXIT_ERROR

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    outputs = _AtomicOutputs()
    echo = {
        "inputs": list(args.inputs),
        "metric": args.metric,
        "class_ratio_band": args.class_ratio_band,
        "datasets": sorted({r.dataset for r in rows}),
    }
    try:
        tmp = outputs.stage(out_dir / "ranks.csv")
        with tmp.open("w", newline="", encoding="utf-8") as fh:
            fh.write("# config: " + json.dumps(echo, sort_keys=True) + "\n")
            writer = csv.writer(fh)
            writer.writerow(["method", "min_leaf", "avg_rank"])
            for row in ev.rank_to_rows(table):
                writer.writerow([row["method"], row["min_leaf"], repr(row["avg_rank"])])
        outputs.commit()
    except Exception:
        outputs.abort()
        raise
    print(f"rank: wrote {out_dir / 'ranks.csv'} over {len(table.per_dataset)} dataset(s)")
    return _EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rdtcombine",
        description="Random decision tree ensembles with uncertainty-aware combining",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser("evaluate", help="run the cross-validation grid")
    p_eval.add_argument("datasets", nargs="*", help="dataset CSV paths")
    p_eval.add_argument("--config", help="JSON config file; flags win")
    p_eval.add_argument("--out", help="output directory (default: results)")
    p_eval.add_argument("--seed", type=int)
    p_eval.add_argument("--trees", type=int)
    p_eval.add_argument("--leaf-sizes", dest="leaf_sizes", help="comma-separated")
    p_eval.add_argument("--methods", help="comma-separated or 'all'")
    p_eval.add_argument("--repetitions", type=int)
    p_eval.add_argument("--jobs", type=int, help="parallel workers over grid cells")
    p_eval.add_argument("--label-col", dest="label_col", help="label column name")
    p_eval.add_argument("--positive-label", dest="positive_label")
    p_eval.add_argument("--nominal", help="comma-separated columns forced nominal")
    p_eval.add_argument("--backend", choices=("auto", "numba", "numpy"))
    p_eval.set_defaults(func=_cmd_evaluate)

    p_sim = sub.add_parser("simulate", help="run the leaf-growth simulator")
    p_sim.add_argument("--config", help="JSON config file; flags win")
    p_sim.add_argument("--out", help="output directory (default: sim)")
    p_sim.add_argument("--mode", choices=("leaf", "ensemble"))
    p_sim.add_argument("--methods", help="comma-separated or 'all'")
    p_sim.add_argument("--p-pos", dest="p_pos", type=float)
    p_sim.add_argument("--max-n", dest="max_n", type=int)
    p_sim.add_argument("--trials", type=int)
    p_sim.add_argument("--leaves", type=int, help="leaves per simulated ensemble")
    p_sim.add_argument("--quantiles", help="comma-separated, e.g. 0.1,0.25,0.75,0.9")
    p_sim.add_argument("--seed", type=int)
    p_sim.add_argument("--backend", choices=("auto", "numba", "numpy"))
    p_sim.set_defaults(func=_cmd_simulate)

    p_rank = sub.add_parser("rank", help="aggregate ranks across result files")
    p_rank.add_argument("inputs", nargs="+", help="results.csv files or their directories")
    p_rank.add_argument("--metric", choices=("auc", "accuracy"), default="auc")
    p_rank.add_argument("--out", default="ranks", help="output directory")
    p_rank.add_argument(
        "--class-ratio-band",
        dest="class_ratio_band",
        help="LO:HI — keep only datasets whose positive ratio falls in the band",
    )
    p_rank.set_defaults(func=_cmd_rank)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError) as exc:
        print(f"{args.command}: {exc}", file=sys.stderr)
        return _EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
