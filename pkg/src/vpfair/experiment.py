"""Alpha-grid simulation study: run, aggregate, write CSV/SVG, check results."""

from __future__ import annotations

import csv
import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence
from xml.sax.saxutils import escape

import numpy as np

from .divergence import jsd
from .kernels import ALL_METRICS, BINOMIAL_METRICS, LABELS, binomial_raw_sum, discounts
from .metrics import category_prefix_distributions
from .normalization import z_binomial, z_multinomial
from .simulator import SETS, LabelSet, ScenarioConfig, generate_batch

DEFAULT_ALPHAS = tuple(i / 10 for i in range(-10, 11))


@dataclass(frozen=True)
class GridSpec:
    scenario: ScenarioConfig
    metrics: tuple[str, ...]
    sets: tuple[str, ...] = ("S1", "S2", "S3")
    alphas: tuple[float, ...] = DEFAULT_ALPHAS
    replicates: int = 1000
    base_seed: int = 0
    label_sets: dict = field(default_factory=lambda: dict(SETS))

    def __post_init__(self):
        if self.replicates < 1:
            raise ValueError("replicates must be >= 1")
        if not self.alphas:
            raise ValueError("alpha grid is empty")
        for a in self.alphas:
            if not -1.0 <= a <= 1.0:
                raise ValueError(f"alpha {a} outside [-1, 1]")
        for name in self.sets:
            if name not in self.label_sets:
                raise ValueError(f"unknown label set {name!r}")
        for m in self.metrics:
            if m not in ALL_METRICS:
                raise ValueError(f"unknown metric {m!r}")


@dataclass(frozen=True)
class CellResult:
    set_name: str
    alpha: float
    metric: str
    mean: float
    std: float
    n: int


def _cell_values(label_set: LabelSet, spec: GridSpec, alpha: float) -> dict[str, np.ndarray]:
    batch = generate_batch(label_set, spec.scenario, alpha, spec.replicates, spec.base_seed)
    n = label_set.total
    protected = sorted(spec.scenario.protected)
    s_p = sum(label_set.count(v) for v in protected)
    zs = {m: z_binomial(m, n, s_p) for m in spec.metrics if m in BINOMIAL_METRICS}
    z_js = z_multinomial(n)
    disc = discounts(n)
    out = {m: np.empty(len(batch)) for m in spec.metrics}
    for k, (ranking, _) in enumerate(batch):
        mask = np.isin(ranking, protected)
        for m in spec.metrics:
            if m == "nDJS":
                p, q = category_prefix_distributions(ranking, LABELS)
                out[m][k] = float(np.sum(jsd(p, q) * disc)) / z_js
            else:
                z = zs[m]
                out[m][k] = binomial_raw_sum(m, mask) / z if z > 0 else 0.0
    return out


def run_grid(spec: GridSpec, threads: int = 1) -> list[CellResult]:
    """Mean and sample std of each metric per (set, alpha) cell.

    Every cell reuses replicate streams ``(base_seed, k)``, so cells differ only
    through alpha and the label set (common random numbers across the grid).
    """
    jobs = [(name, alpha) for name in spec.sets for alpha in spec.alphas]

    def run(job):
        name, alpha = job
        return _cell_values(spec.label_sets[name], spec, alpha)

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            values = list(pool.map(run, jobs))
    else:
        values = [run(job) for job in jobs]

    results = []
    for (name, alpha), cell in zip(jobs, values):
        for m in spec.metrics:
            v = cell[m]
            std = float(np.std(v, ddof=1)) if v.size > 1 else 0.0
            results.append(CellResult(name, alpha, m, float(np.mean(v)), std, int(v.size)))
    return results


def _sort_key(r: CellResult):
    return (r.metric, r.set_name, r.alpha)


def format_csv(results: Sequence[CellResult]) -> str:
    if not results:
        raise ValueError("no results to write")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["set", "alpha", "metric", "mean", "std", "n"])
    for r in sorted(results, key=_sort_key):
        alpha = 0.0 if r.alpha == 0 else r.alpha  # no "-0.000000"
        writer.writerow([r.set_name, f"{alpha:.6f}", r.metric, f"{r.mean:.6f}", f"{r.std:.6f}", r.n])
    return buf.getvalue()


def emit_csv(results: Sequence[CellResult], destination) -> Path:
    text = format_csv(results)
    path = Path(destination)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    return path


def read_csv(path) -> list[CellResult]:
    with open(path, encoding="utf-8", newline="") as fh:
        return [
            CellResult(row["set"], float(row["alpha"]), row["metric"], float(row["mean"]), float(row["std"]), int(row["n"]))
            for row in csv.DictReader(fh)
        ]


_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def render_svg(results: Sequence[CellResult], metric: str, width: int = 480, height: int = 360) -> str:
    """Mean-vs-alpha line chart, one polyline per label set, y fixed to [0, 1].

    Values above 1 (nDR) are clipped at the frame like the rest of the chart.
    """
    rows = [r for r in results if r.metric == metric]
    if not rows:
        raise ValueError(f"no results for metric {metric!r}")
    sets = list(dict.fromkeys(r.set_name for r in sorted(rows, key=_sort_key)))
    left, right, top, bottom = 56, 16, 28, 44
    pw, ph = width - left - right, height - top - bottom

    def x(a):
        return left + (a + 1.0) / 2.0 * pw

    def y(v):
        return top + (1.0 - v) * ph

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
        f'<title>{escape(metric)} vs alpha</title>',
        f'<defs><clipPath id="frame"><rect x="{left}" y="{top}" width="{pw}" height="{ph}"/></clipPath></defs>',
        '<rect width="100%" height="100%" fill="white"/>',
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for t in range(6):
        v = t / 5
        parts.append(f'<line x1="{left - 4}" y1="{y(v):.2f}" x2="{left}" y2="{y(v):.2f}" stroke="black"/>')
        parts.append(f'<text x="{left - 8}" y="{y(v) + 4:.2f}" font-size="11" text-anchor="end">{v:.1f}</text>')
    for t in range(-2, 3):
        a = t / 2
        parts.append(f'<line x1="{x(a):.2f}" y1="{top + ph}" x2="{x(a):.2f}" y2="{top + ph + 4}" stroke="black"/>')
        parts.append(f'<text x="{x(a):.2f}" y="{top + ph + 17}" font-size="11" text-anchor="middle">{a:g}</text>')
    parts.append(f'<text x="{left + pw / 2}" y="{height - 8}" font-size="12" text-anchor="middle">alpha (ranking bias)</text>')
    parts.append(
        f'<text x="14" y="{top + ph / 2}" font-size="12" text-anchor="middle" '
        f'transform="rotate(-90 14 {top + ph / 2})">mean {escape(metric)}</text>'
    )
    for k, name in enumerate(sets):
        pts = sorted((r.alpha, r.mean) for r in rows if r.set_name == name)
        coords = " ".join(f"{x(a):.2f},{y(v):.2f}" for a, v in pts)
        color = _COLORS[k % len(_COLORS)]
        parts.append(
            f'<polyline data-set="{escape(name)}" points="{coords}" fill="none" stroke="{color}" '
            f'stroke-width="1.5" clip-path="url(#frame)"/>'
        )
        ly = top + 14 + 16 * k
        parts.append(f'<line x1="{left + pw - 70}" y1="{ly}" x2="{left + pw - 50}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        parts.append(f'<text x="{left + pw - 44}" y="{ly + 4}" font-size="11">{escape(name)}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def emit_plot(results: Sequence[CellResult], metric: str, destination) -> Path:
    path = Path(destination)
    path.write_text(render_svg(results, metric), encoding="utf-8")
    return path


# ---------------------------------------------------------------------------
# reproduction checks


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: {self.detail}"


def _means(results: Iterable[CellResult], metric: str) -> dict[str, dict[float, float]]:
    table: dict[str, dict[float, float]] = {}
    for r in results:
        if r.metric == metric:
            table.setdefault(r.set_name, {})[round(r.alpha, 10)] = r.mean
    return table


def _approx(name, values, target, tol):
    ok = all(abs(v - target) <= tol for v in values.values())
    shown = ", ".join(f"{k}={v:.4f}" for k, v in values.items())
    return Check(name, ok, f"{shown} (target {target} +/- {tol:g})")


def _within(name, values, lo, hi):
    ok = all(lo <= v <= hi for v in values.values())
    shown = ", ".join(f"{k}={v:.4f}" for k, v in values.items())
    return Check(name, ok, f"{shown} (range [{lo:g}, {hi:g}])")


def _at_least(name, values, lo, strict=False):
    ok = all((v > lo) if strict else (v >= lo) for v in values.values())
    shown = ", ".join(f"{k}={v:.4f}" for k, v in values.items())
    return Check(name, ok, f"{shown} ({'>' if strict else '>='} {lo:g})")


def shape_ok(curve: dict[float, float], slack: float) -> tuple[bool, str]:
    """Minimum at alpha=0 and non-decreasing along both arms, with at most one
    adjacent-pair dip no larger than ``slack``."""
    alphas = sorted(curve)
    if 0.0 not in curve:
        return False, "alpha=0 missing from grid"
    if min(curve.values()) < curve[0.0]:
        return False, f"minimum at alpha={min(curve, key=curve.get)}, not 0"
    dips = []
    for arm in ([a for a in alphas if a >= 0], [a for a in reversed(alphas) if a <= 0]):
        for a, b in zip(arm, arm[1:]):
            drop = curve[a] - curve[b]
            if drop > 0:
                dips.append((a, b, drop))
    bad = [d for d in dips if d[2] > slack]
    if bad or len(dips) > 1:
        return False, f"non-monotone steps: {[(a, b, round(d, 5)) for a, b, d in dips]}"
    return True, f"{len(dips)} dip(s) within {slack:g}"


def check_reproduction(binomial: Sequence[CellResult], multinomial: Sequence[CellResult], replicates: int) -> list[Check]:
    """Evaluate the reported Monte-Carlo behavior of all four metrics.

    Tolerances apply to 1000 replicates; for fewer replicates every tolerance
    band is doubled.
    """
    widen = 1.0 if replicates >= 1000 else 2.0
    tol = 0.03 * widen
    extra = tol - 0.03  # added to each side of a stated interval
    slack = 0.005 * widen
    checks = []

    dd = _means(binomial, "nDD")
    checks.append(_approx("nDD mean at alpha=0", {s: c[0.0] for s, c in dd.items()}, 0.08, tol))
    checks.append(_at_least("nDD mean at alpha=-1", {s: c[-1.0] for s, c in dd.items()}, 0.98 - extra))
    top = {s: c[1.0] for s, c in dd.items()}
    checks.append(_within("nDD mean at alpha=+1", top, 0.52 - extra, 0.88 + extra))
    order = [top[s] for s in ("S1", "S2", "S3") if s in top]
    checks.append(Check("nDD ordering S1 > S2 > S3 at alpha=+1", all(a > b for a, b in zip(order, order[1:])),
                        ", ".join(f"{v:.4f}" for v in order)))

    dr = _means(binomial, "nDR")
    checks.append(_approx("nDR mean at alpha=0", {s: c[0.0] for s, c in dr.items()}, 0.04, tol))
    checks.append(_within("nDR mean at alpha=+1", {s: c[1.0] for s, c in dr.items()}, 0.16 - extra, 0.27 + extra))
    checks.append(_at_least("nDR mean at alpha=-1", {s: c[-1.0] for s, c in dr.items()}, 1.0, strict=True))

    kl = _means(binomial, "nDKL")
    checks.append(_approx("nDKL mean at alpha=0", {s: c[0.0] for s, c in kl.items()}, 0.03, tol))
    checks.append(_at_least("nDKL mean at alpha=-1", {s: c[-1.0] for s, c in kl.items()}, 0.98 - extra))
    checks.append(_within("nDKL mean at alpha=+1", {s: c[1.0] for s, c in kl.items()}, 0.37 - extra, 0.81 + extra))

    js = _means(multinomial, "nDJS")
    checks.append(_approx("nDJS mean at alpha=0", {s: c[0.0] for s, c in js.items()}, 0.03, tol))
    checks.append(_within("nDJS mean at alpha=-1", {s: c[-1.0] for s, c in js.items()}, 0.15 - extra, 0.24 + extra))
    checks.append(_within("nDJS mean at alpha=+1", {s: c[1.0] for s, c in js.items()}, 0.05 - extra, 0.12 + extra))

    for metric, table in (("nDD", dd), ("nDR", dr), ("nDKL", kl), ("nDJS", js)):
        for s, curve in table.items():
            ok, detail = shape_ok(curve, slack)
            checks.append(Check(f"{metric} curve shape on {s}", ok, detail))
    return checks
