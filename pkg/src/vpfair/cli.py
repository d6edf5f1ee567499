"""Command-line entry point.

Exit codes: 0 success, 1 runtime or I/O failure, 2 usage, parse or config error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

from .config import ConfigError, load_config
from .experiment import GridSpec, check_reproduction, emit_csv, emit_plot, run_grid
from .kernels import BINOMIAL_METRICS, DEFAULT_PROTECTED, LABELS, ProtectedSpec
from .metrics import measure
from .simulator import BINOMIAL, MULTINOMIAL

log = logging.getLogger("vpfair")

METRIC_FLAGS = {"ndd": "nDD", "ndr": "nDR", "ndkl": "nDKL", "ndjs": "nDJS"}


class UsageError(Exception):
    pass


def read_ranking_file(path) -> list[int]:
    """One integer label per line, top rank first; an optional ``label`` header."""
    labels = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            token = line.strip()
            if not token or (lineno == 1 and token.lower() == "label"):
                continue
            try:
                value = int(token)
            except ValueError:
                raise UsageError(f"{path}:{lineno}: not an integer label: {token!r}") from None
            if value not in LABELS:
                raise UsageError(f"{path}:{lineno}: label {value} outside -3..3")
            labels.append(value)
    if not labels:
        raise UsageError(f"{path}: no labels found")
    return labels


def _parse_protected(text: str) -> ProtectedSpec:
    try:
        return ProtectedSpec(int(t) for t in text.split(",") if t.strip())
    except ValueError as exc:
        raise UsageError(f"--protected: {exc}") from None


def cmd_measure(args) -> int:
    try:
        labels = read_ranking_file(args.input)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    metrics = [METRIC_FLAGS[m] for m in args.metric] if args.metric else None
    if args.multinomial:
        metrics = metrics or ["nDJS"]
        if any(m in BINOMIAL_METRICS for m in metrics):
            raise UsageError("binomial metrics need a protected group; drop --multinomial or pass --protected")
        protected = DEFAULT_PROTECTED
    else:
        metrics = metrics or list(METRIC_FLAGS.values())
        if args.protected is None:
            protected = ProtectedSpec(DEFAULT_PROTECTED)
            if any(m in BINOMIAL_METRICS for m in metrics):
                log.warning("no --protected given; using the opposing labels -3,-2,-1")
        else:
            protected = _parse_protected(args.protected)
    results = measure(labels, metrics, protected)
    if args.json:
        print(json.dumps({"n": len(labels), "results": [r.as_dict() for r in results]}, indent=2))
    else:
        print(f"{'metric':<6} {'value':>10} {'raw_sum':>12} {'z':>12}")
        for r in results:
            print(f"{r.metric_id:<6} {r.value:>10.6f} {r.raw_sum:>12.6f} {r.z:>12.6f}")
    return 0


def _print_summary(results, out=sys.stdout) -> None:
    for r in results:
        if r.alpha in (-1.0, 0.0, 1.0):
            print(f"  {r.metric:<5} {r.set_name:<4} alpha={r.alpha:+.1f}  mean={r.mean:.4f}  std={r.std:.4f}", file=out)


def cmd_simulate(args) -> int:
    try:
        config = load_config(args.config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    threads = args.threads or config.threads
    config.output_dir.mkdir(parents=True, exist_ok=True)
    for kind, grid in config.grids.items():
        start = time.perf_counter()
        results = run_grid(grid, threads=threads)
        emit_csv(results, config.output_dir / f"{kind}.csv")
        for metric in grid.metrics:
            emit_plot(results, metric, config.output_dir / f"{kind}_{metric}.svg")
        print(f"{kind}: {len(results)} cells in {time.perf_counter() - start:.1f}s -> {config.output_dir}")
        _print_summary(results)
    return 0


def cmd_reproduce(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    common = dict(replicates=args.replicates, base_seed=args.seed)
    binomial = run_grid(GridSpec(BINOMIAL, BINOMIAL_METRICS, **common), threads=args.threads)
    multinomial = run_grid(GridSpec(MULTINOMIAL, ("nDJS",), **common), threads=args.threads)
    emit_csv(binomial, out / "binomial.csv")
    emit_csv(multinomial, out / "multinomial.csv")
    for metric in BINOMIAL_METRICS:
        emit_plot(binomial, metric, out / f"{metric}.svg")
    emit_plot(multinomial, "nDJS", out / "nDJS.svg")

    checks = check_reproduction(binomial, multinomial, args.replicates)
    lines = [f"seed={args.seed} replicates={args.replicates}"]
    if args.replicates < 1000:
        lines.append(f"NOTE: {args.replicates} replicates < 1000; tolerance bands doubled")
    lines += [c.line() for c in checks]
    passed = sum(c.passed for c in checks)
    lines.append(f"{passed}/{len(checks)} checks passed")
    (out / "checks.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")
    print("\n".join(lines))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vpfair", description="Viewpoint fairness metrics for ranked lists.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    m = sub.add_parser("measure", help="score a ranking file")
    m.add_argument("--input", required=True, help="one label (-3..3) per line, top rank first")
    group = m.add_mutually_exclusive_group()
    group.add_argument("--protected", help="comma-separated protected labels, e.g. -3,-2,-1")
    group.add_argument("--multinomial", action="store_true", help="no protected group; nDJS only")
    m.add_argument("--metric", action="extend", nargs="+", choices=sorted(METRIC_FLAGS), help="default: all")
    m.add_argument("--json", action="store_true", help="machine-readable output")
    m.set_defaults(func=cmd_measure)

    s = sub.add_parser("simulate", help="run an alpha-grid study from a TOML config")
    s.add_argument("--config", required=True)
    s.add_argument("--threads", type=int, default=None)
    s.set_defaults(func=cmd_simulate)

    r = sub.add_parser("reproduce", help="run both scenarios at full scale and check the outcomes")
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--out", default="reproduction")
    r.add_argument("--replicates", type=int, default=1000)
    r.add_argument("--threads", type=int, default=1)
    r.set_defaults(func=cmd_reproduce)
    return parser


def _join_negative_values(argv: list[str]) -> list[str]:
    # "--protected -3,-2,-1" would otherwise be read as an unknown option
    out, i = [], 0
    while i < len(argv):
        if argv[i] == "--protected" and i + 1 < len(argv):
            out.append(f"--protected={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    args = parser.parse_args(_join_negative_values(argv))
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    if getattr(args, "replicates", 1) < 1 or (getattr(args, "threads", None) or 1) < 1:
        parser.error("--replicates and --threads must be >= 1")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
