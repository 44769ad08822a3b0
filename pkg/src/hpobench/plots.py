"""Dependency-free SVG line charts of scaled metrics against sample size.

Output is a pure function of the ledger: no timestamps, fixed number formatting,
so identical results give byte-identical files.
"""
from __future__ import annotations

from pathlib import Path
from typing import Dict, List, Sequence, Tuple

import numpy as np

WIDTH, HEIGHT = 720, 440
MARGIN = dict(left=70, right=170, top=40, bottom=60)
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf")
METRIC_LABELS = {"mape": "MAPE", "r2": "R-squared", "runtime": "runtime (s)"}


def minmax_scale(values: np.ndarray) -> np.ndarray:
    """Scale to [0, 1] over the whole array; a constant array maps to 0."""
    v = np.asarray(values, dtype=float)
    lo, hi = np.min(v), np.max(v)
    if hi == lo:
        return np.zeros_like(v)
    return (v - lo) / (hi - lo)


def series_for(ledger, metric: str, variate: str) -> Dict[str, Tuple[np.ndarray, np.ndarray]]:
    """Per algorithm: sorted sizes and the metric averaged over repeats."""
    out = {}
    for alg in ledger.algorithms():
        cells = ledger.select(variate, alg)
        if not cells:
            continue
        sizes = sorted({c.sample_size for c in cells})
        vals = [np.mean([c.metric(metric) for c in cells if c.sample_size == s]) for s in sizes]
        out[alg] = (np.array(sizes, dtype=float), np.array(vals, dtype=float))
    return out


def _f(x: float) -> str:
    return f"{x:.2f}"


def render_svg(series: Dict[str, Tuple[np.ndarray, np.ndarray]], title: str, ylabel: str,
               display: Dict[str, str] = None) -> str:
    display = display or {}
    names = list(series)
    raw = np.concatenate([series[n][1] for n in names]) if names else np.zeros(0)
    scaled_all = minmax_scale(raw) if raw.size else raw
    scaled, pos = {}, 0
    for n in names:
        k = series[n][1].size
        scaled[n] = scaled_all[pos:pos + k]
        pos += k
    xs = np.concatenate([series[n][0] for n in names]) if names else np.array([0.0, 1.0])
    xmin, xmax = float(xs.min()), float(xs.max())
    if xmax == xmin:
        xmax = xmin + 1.0

    pw = WIDTH - MARGIN["left"] - MARGIN["right"]
    ph = HEIGHT - MARGIN["top"] - MARGIN["bottom"]

    def px(x):
        return MARGIN["left"] + (x - xmin) / (xmax - xmin) * pw

    def py(y):
        return MARGIN["top"] + (1.0 - y) * ph

    out: List[str] = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        "<!-- data: algorithm,sample_size,raw,scaled -->",
    ]
    for n in names:
        for x, r, s in zip(series[n][0], series[n][1], scaled[n]):
            out.append(f"<!-- {n},{int(x)},{float(r)!r},{float(s)!r} -->")
    out.append(f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>')
    out.append(f'<text x="{WIDTH / 2:.0f}" y="22" text-anchor="middle" font-size="15">{title}</text>')

    x0, y0 = MARGIN["left"], MARGIN["top"] + ph
    out.append(f'<line x1="{x0}" y1="{y0}" x2="{x0 + pw}" y2="{y0}" stroke="black"/>')
    out.append(f'<line x1="{x0}" y1="{MARGIN["top"]}" x2="{x0}" y2="{y0}" stroke="black"/>')
    for t in (0.0, 0.25, 0.5, 0.75, 1.0):
        y = py(t)
        out.append(f'<line x1="{x0 - 5}" y1="{_f(y)}" x2="{x0 + pw}" y2="{_f(y)}" stroke="#dddddd"/>')
        out.append(f'<text x="{x0 - 8}" y="{_f(y + 4)}" text-anchor="end">{t:.2f}</text>')
    ticks = sorted({int(x) for n in names for x in series[n][0]})
    step = max(1, int(np.ceil(len(ticks) / 10)))
    for t in ticks[::step]:
        x = px(t)
        out.append(f'<line x1="{_f(x)}" y1="{y0}" x2="{_f(x)}" y2="{y0 + 5}" stroke="black"/>')
        out.append(f'<text x="{_f(x)}" y="{y0 + 18}" text-anchor="middle">{t}</text>')
    out.append(f'<text x="{x0 + pw / 2:.0f}" y="{HEIGHT - 15}" text-anchor="middle">sample size</text>')
    out.append(f'<text x="18" y="{MARGIN["top"] + ph / 2:.0f}" text-anchor="middle" '
               f'transform="rotate(-90 18 {MARGIN["top"] + ph / 2:.0f})">{ylabel} (min-max scaled)</text>')

    for i, n in enumerate(names):
        color = COLORS[i % len(COLORS)]
        pts = " ".join(f"{_f(px(x))},{_f(py(y))}" for x, y in zip(series[n][0], scaled[n]))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="2" points="{pts}"/>')
        for x, y in zip(series[n][0], scaled[n]):
            out.append(f'<circle cx="{_f(px(x))}" cy="{_f(py(y))}" r="3" fill="{color}"/>')
        ly = MARGIN["top"] + 10 + 20 * i
        lx = x0 + pw + 20
        out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 24}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{lx + 30}" y="{ly + 4}">{display.get(n, n)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_plots(ledger, out_dir, metrics: Sequence[str] = ("mape", "r2", "runtime"),
               variates: Sequence[str] = None) -> List[Path]:
    """Write ``{metric}_{variate}.svg`` for every metric and variate present."""
    from .runner import DISPLAY

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for variate in variates or ledger.variates():
        for metric in metrics:
            series = series_for(ledger, metric, variate)
            if not series:
                continue
            title = f"{METRIC_LABELS[metric]} vs sample size ({variate})"
            path = out / f"{metric}_{variate}.svg"
            path.write_text(render_svg(series, title, METRIC_LABELS[metric], DISPLAY))
            paths.append(path)
    return paths
