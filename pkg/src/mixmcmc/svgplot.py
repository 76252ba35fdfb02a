"""Minimal self-contained SVG renderers for run summaries.

Hand-rolled on purpose: the output is deterministic, diffable text with no
rendering dependency. Each function returns a complete SVG document.
"""

import numpy as np

WIDTH = 640
HEIGHT = 480
MARGIN = 60


def _fmt(v):
    return f"{v:.2f}"


def _header(title):
    return [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" '
        f'height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH // 2}" y="24" text-anchor="middle" '
        f'font-family="sans-serif" font-size="16">{title}</text>',
    ]


def _axes(x_min, x_max, y_min, y_max):
    left, right = MARGIN, WIDTH - MARGIN
    top, bottom = MARGIN, HEIGHT - MARGIN
    parts = [
        f'<line x1="{left}" y1="{bottom}" x2="{right}" y2="{bottom}" stroke="black"/>',
        f'<line x1="{left}" y1="{bottom}" x2="{left}" y2="{top}" stroke="black"/>',
        f'<text x="{left}" y="{bottom + 20}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="11">{_fmt(x_min)}</text>',
        f'<text x="{right}" y="{bottom + 20}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="11">{_fmt(x_max)}</text>',
        f'<text x="{left - 8}" y="{bottom}" text-anchor="end" '
        f'font-family="sans-serif" font-size="11">{_fmt(y_min)}</text>',
        f'<text x="{left - 8}" y="{top + 4}" text-anchor="end" '
        f'font-family="sans-serif" font-size="11">{_fmt(y_max)}</text>',
    ]
    return parts


def _scale(values, lo, hi, out_lo, out_hi):
    values = np.asarray(values, dtype=float)
    span = hi - lo
    if span <= 0:
        span = 1.0
    return out_lo + (values - lo) / span * (out_hi - out_lo)


def density_curve_svg(grid, density, title="Posterior predictive density"):
    """Polyline of a density curve over a 1-d grid."""
    grid = np.asarray(grid, dtype=float).reshape(-1)
    density = np.asarray(density, dtype=float).reshape(-1)
    if grid.shape != density.shape:
        raise ValueError("grid and density lengths differ")
    x_min, x_max = float(grid.min()), float(grid.max())
    y_min, y_max = 0.0, float(max(density.max(), 1e-12))
    xs = _scale(grid, x_min, x_max, MARGIN, WIDTH - MARGIN)
    ys = _scale(density, y_min, y_max, HEIGHT - MARGIN, MARGIN)
    points = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in zip(xs, ys))
    parts = _header(title)
    parts += _axes(x_min, x_max, y_min, y_max)
    parts.append(f'<polyline points="{points}" fill="none" stroke="crimson" stroke-width="1.5"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def histogram_svg(values, title="Posterior of the number of clusters"):
    """Bar chart of the relative frequencies of integer values."""
    values = np.asarray(values, dtype=int).reshape(-1)
    if values.size == 0:
        raise ValueError("empty series")
    uniq, counts = np.unique(values, return_counts=True)
    freqs = counts / counts.sum()
    x_min, x_max = float(uniq.min()) - 0.5, float(uniq.max()) + 0.5
    y_max = float(freqs.max())
    parts = _header(title)
    parts += _axes(x_min, x_max, 0.0, y_max)
    bottom = HEIGHT - MARGIN
    for value, freq in zip(uniq, freqs):
        x0 = _scale(value - 0.4, x_min, x_max, MARGIN, WIDTH - MARGIN)
        x1 = _scale(value + 0.4, x_min, x_max, MARGIN, WIDTH - MARGIN)
        top = _scale(freq, 0.0, y_max, bottom, MARGIN)
        parts.append(
            f'<rect x="{_fmt(x0)}" y="{_fmt(top)}" width="{_fmt(x1 - x0)}" '
            f'height="{_fmt(bottom - top)}" fill="steelblue"/>'
        )
        parts.append(
            f'<text x="{_fmt((x0 + x1) / 2)}" y="{bottom + 20}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="11">{int(value)}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def traceplot_svg(values, title="Trace of the number of clusters"):
    """Step trace of a series against its iteration index."""
    values = np.asarray(values, dtype=float).reshape(-1)
    if values.size == 0:
        raise ValueError("empty series")
    t = values.shape[0]
    y_min, y_max = float(values.min()) - 0.5, float(values.max()) + 0.5
    xs = _scale(np.arange(t), 0, max(t - 1, 1), MARGIN, WIDTH - MARGIN)
    ys = _scale(values, y_min, y_max, HEIGHT - MARGIN, MARGIN)
    points = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in zip(xs, ys))
    parts = _header(title)
    parts += _axes(0.0, float(t - 1), y_min, y_max)
    parts.append(f'<polyline points="{points}" fill="none" stroke="darkgreen" stroke-width="1"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
