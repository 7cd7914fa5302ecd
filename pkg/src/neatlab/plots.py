"""Dependency-free SVG renderers for summary curves and archive heatmaps.

Hand-rolled SVG keeps artifacts byte-reproducible (no timestamps or generated
ids) and the package free of plotting dependencies.
"""

import math
import os

from .errors import FormatError
from .experiments import SUMMARY_COLUMNS, read_csv

_FITNESS_COLOR = "#2a6f97"
_Q_COLOR = "#b5541c"

# five-stop dark-blue -> yellow ramp for heatmap cells
_RAMP = [(68, 1, 84), (59, 82, 139), (33, 145, 140), (94, 201, 98), (253, 231, 37)]


def _nice_ticks(lo: float, hi: float, target: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / target
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 2.5, 5.0, 10.0):
        step = mult * mag
        if raw <= step:
            break
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + 1e-9 * step:
        ticks.append(round(t, 10))
        t += step
    return ticks


def _color_lerp(t: float) -> str:
    t = min(max(t, 0.0), 1.0)
    pos = t * (len(_RAMP) - 1)
    i = min(int(pos), len(_RAMP) - 2)
    f = pos - i
    rgb = [round(a + (b - a) * f) for a, b in zip(_RAMP[i], _RAMP[i + 1])]
    return f"#{rgb[0]:02x}{rgb[1]:02x}{rgb[2]:02x}"


def line_plot_svg(xs, means, stds, title: str, ylabel: str, color: str) -> str:
    """Line plot with a +/- one-standard-deviation band."""
    width, height = 640, 420
    ml, mr, mt, mb = 70, 20, 40, 50
    pw, ph = width - ml - mr, height - mt - mb
    lo = min(m - s for m, s in zip(means, stds))
    hi = max(m + s for m, s in zip(means, stds))
    if hi == lo:
        hi = lo + 1.0
    pad = 0.05 * (hi - lo)
    lo, hi = lo - pad, hi + pad
    x0, x1 = min(xs), max(xs)
    if x1 == x0:
        x1 = x0 + 1

    def sx(x):
        return ml + (x - x0) / (x1 - x0) * pw

    def sy(y):
        return mt + (hi - y) / (hi - lo) * ph

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2:.1f}" y="24" text-anchor="middle" '
        f'font-family="sans-serif" font-size="16">{title}</text>',
    ]
    band = [f"{sx(x):.2f},{sy(m + s):.2f}" for x, m, s in zip(xs, means, stds)]
    band += [f"{sx(x):.2f},{sy(m - s):.2f}"
             for x, m, s in zip(reversed(xs), reversed(means), reversed(stds))]
    parts.append(f'<polygon points="{" ".join(band)}" fill="{color}" fill-opacity="0.2"/>')
    line = " ".join(f"{sx(x):.2f},{sy(m):.2f}" for x, m in zip(xs, means))
    parts.append(f'<polyline points="{line}" fill="none" stroke="{color}" stroke-width="2"/>')
    parts.append(f'<line x1="{ml}" y1="{mt + ph}" x2="{ml + pw}" y2="{mt + ph}" stroke="black"/>')
    parts.append(f'<line x1="{ml}" y1="{mt}" x2="{ml}" y2="{mt + ph}" stroke="black"/>')
    for t in _nice_ticks(x0, x1):
        parts.append(f'<line x1="{sx(t):.2f}" y1="{mt + ph}" x2="{sx(t):.2f}" '
                     f'y2="{mt + ph + 5}" stroke="black"/>')
        parts.append(f'<text x="{sx(t):.2f}" y="{mt + ph + 20}" text-anchor="middle" '
                     f'font-family="sans-serif" font-size="11">{t:g}</text>')
    for t in _nice_ticks(lo, hi):
        parts.append(f'<line x1="{ml - 5}" y1="{sy(t):.2f}" x2="{ml}" '
                     f'y2="{sy(t):.2f}" stroke="black"/>')
        parts.append(f'<text x="{ml - 9}" y="{sy(t) + 4:.2f}" text-anchor="end" '
                     f'font-family="sans-serif" font-size="11">{t:g}</text>')
    parts.append(f'<text x="{ml + pw / 2:.1f}" y="{height - 10}" text-anchor="middle" '
                 f'font-family="sans-serif" font-size="13">generation</text>')
    parts.append(f'<text x="18" y="{mt + ph / 2:.1f}" text-anchor="middle" '
                 f'font-family="sans-serif" font-size="13" '
                 f'transform="rotate(-90 18 {mt + ph / 2:.1f})">{ylabel}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def render_plots(summary_csv: str, out_dir: str | None = None) -> list[str]:
    """Render fitness.svg and modularity.svg (mean +/- one sample std) from a summary CSV."""
    header, rows = read_csv(summary_csv)
    if tuple(header) != SUMMARY_COLUMNS or not rows:
        raise FormatError(f"{summary_csv} does not match the summary schema {SUMMARY_COLUMNS}")
    try:
        gens = [int(r[0]) for r in rows]
        cols = [[float(r[i]) for r in rows] for i in range(1, 5)]
    except ValueError as exc:
        raise FormatError(f"non-numeric value in {summary_csv}: {exc}") from None
    out_dir = out_dir or os.path.dirname(os.path.abspath(summary_csv))
    os.makedirs(out_dir, exist_ok=True)
    outputs = []
    for name, title, mean_col, std_col, color in (
            ("fitness", "best fitness per generation", cols[0], cols[1], _FITNESS_COLOR),
            ("modularity", "best-genome modularity per generation", cols[2], cols[3], _Q_COLOR)):
        path = os.path.join(out_dir, f"{name}.svg")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(line_plot_svg(gens, mean_col, std_col, title,
                                   name.replace("modularity", "Q score"), color))
        outputs.append(path)
    return outputs


def heatmap_svg(archive) -> str:
    """Archive grid colored by fitness: Q on x, D on y, origin bottom-left."""
    n = archive.grid_size
    cell = 24
    ml, mt, mb, mr = 60, 40, 50, 120
    width = ml + n * cell + mr
    height = mt + n * cell + mb
    elites = [e for _, e in archive.items()]
    if elites:
        fmin = min(e.fitness for e in elites)
        fmax = max(e.fitness for e in elites)
    else:
        fmin = fmax = 0.0
    span = (fmax - fmin) or 1.0
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{ml + n * cell / 2:.0f}" y="22" text-anchor="middle" '
        f'font-family="sans-serif" font-size="15">archive fitness over (Q, D)</text>',
    ]
    occupied = {key: e for key, e in archive.items()}
    for qi in range(n):
        for di in range(n):
            x = ml + qi * cell
            y = mt + (n - 1 - di) * cell
            elite = occupied.get((qi, di))
            fill = _color_lerp((elite.fitness - fmin) / span) if elite else "#eeeeee"
            parts.append(f'<rect x="{x}" y="{y}" width="{cell}" height="{cell}" '
                         f'fill="{fill}" stroke="white" stroke-width="0.5"/>')
    for frac in (0.0, 0.5, 1.0):
        xt = ml + frac * n * cell
        yt = mt + (1 - frac) * n * cell
        parts.append(f'<text x="{xt:.0f}" y="{mt + n * cell + 18}" text-anchor="middle" '
                     f'font-family="sans-serif" font-size="11">{frac:g}</text>')
        parts.append(f'<text x="{ml - 8}" y="{yt + 4:.0f}" text-anchor="end" '
                     f'font-family="sans-serif" font-size="11">{frac:g}</text>')
    parts.append(f'<text x="{ml + n * cell / 2:.0f}" y="{height - 12}" text-anchor="middle" '
                 f'font-family="sans-serif" font-size="13">Q (greedy-max modularity)</text>')
    parts.append(f'<text x="16" y="{mt + n * cell / 2:.0f}" text-anchor="middle" '
                 f'font-family="sans-serif" font-size="13" '
                 f'transform="rotate(-90 16 {mt + n * cell / 2:.0f})">D (torque deviation)</text>')
    # colorbar
    bar_x = ml + n * cell + 30
    for i in range(100):
        t = i / 99.0
        y = mt + (1 - t) * (n * cell - 1)
        parts.append(f'<rect x="{bar_x}" y="{y:.1f}" width="16" height="{n * cell / 99 + 1:.1f}" '
                     f'fill="{_color_lerp(t)}"/>')
    parts.append(f'<text x="{bar_x + 22}" y="{mt + n * cell:.0f}" font-family="sans-serif" '
                 f'font-size="11">{fmin:.1f}</text>')
    parts.append(f'<text x="{bar_x + 22}" y="{mt + 10}" font-family="sans-serif" '
                 f'font-size="11">{fmax:.1f}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
