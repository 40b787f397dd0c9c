"""Deterministic SVG rendering of a simulation report.

Draws the density histogram of the standardized statistics, the kernel
density curve, and the standard normal density for comparison.  The
output is plain string assembly with fixed float formatting, so a given
report always produces byte-identical SVG.
"""

from __future__ import annotations

import math

from .simulate import ExperimentReport

_W, _H = 640.0, 420.0
_L, _R, _T, _B = 62.0, 18.0, 46.0, 50.0


def _fmt(x: float) -> str:
    return f"{x:.3f}".rstrip("0").rstrip(".")


def _normal_pdf(x: float) -> float:
    return math.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)


def emit_plot(report: ExperimentReport) -> str:
    edges = report.histogram["edges"]
    counts = report.histogram["counts"]
    total = sum(counts)
    grid = report.kde["grid"]
    density = report.kde["density"]

    x_lo = min(edges[0], grid[0], -4.0)
    x_hi = max(edges[-1], grid[-1], 4.0)
    bar_density = [
        c / (total * (edges[i + 1] - edges[i])) if total else 0.0
        for i, c in enumerate(counts)
    ]
    y_hi = 1.08 * max([*bar_density, *density, _normal_pdf(0.0)])

    plot_w = _W - _L - _R
    plot_h = _H - _T - _B

    def sx(x: float) -> float:
        return _L + (x - x_lo) / (x_hi - x_lo) * plot_w

    def sy(y: float) -> float:
        return _T + plot_h - y / y_hi * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{int(_W)}" height="{int(_H)}" '
        f'viewBox="0 0 {int(_W)} {int(_H)}">',
        f'<rect width="{int(_W)}" height="{int(_H)}" fill="white"/>',
    ]

    cfg = report.config
    law = cfg.get("law", {})
    family = law.get("family", "?")
    params = ", ".join(f"{k}={v}" for k, v in sorted(law.items()) if k != "family")
    label = f"{family}({params})" if params else family
    title = f"{label} p={cfg.get('p')} n={cfg.get('n')} reps={cfg.get('reps')}"
    subtitle = f"KS p-value {report.ks.p_value:.4g}, variance {report.summary.variance:.4g}"
    parts.append(
        f'<text x="{_fmt(_W / 2)}" y="20" text-anchor="middle" '
        f'font-family="monospace" font-size="13">{title}</text>'
    )
    parts.append(
        f'<text x="{_fmt(_W / 2)}" y="36" text-anchor="middle" '
        f'font-family="monospace" font-size="11" fill="#555">{subtitle}</text>'
    )

    # histogram bars
    for i, d in enumerate(bar_density):
        x0, x1 = sx(edges[i]), sx(edges[i + 1])
        y0 = sy(d)
        parts.append(
            f'<rect x="{_fmt(x0)}" y="{_fmt(y0)}" width="{_fmt(x1 - x0)}" '
            f'height="{_fmt(_T + plot_h - y0)}" fill="#9ecae1" stroke="#6baed6" '
            f'stroke-width="0.5"/>'
        )

    def polyline(xs, ys, color: str, dash: str | None = None) -> str:
        pts = " ".join(f"{_fmt(sx(x))},{_fmt(sy(y))}" for x, y in zip(xs, ys))
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        return (
            f'<polyline fill="none" stroke="{color}" stroke-width="1.6"{dash_attr} '
            f'points="{pts}"/>'
        )

    parts.append(polyline(grid, density, "#d62728"))
    normal_xs = [x_lo + (x_hi - x_lo) * i / 255 for i in range(256)]
    parts.append(polyline(normal_xs, [_normal_pdf(x) for x in normal_xs], "#222222", dash="5,3"))

    # axes
    parts.append(
        f'<line x1="{_fmt(_L)}" y1="{_fmt(_T + plot_h)}" x2="{_fmt(_L + plot_w)}" '
        f'y2="{_fmt(_T + plot_h)}" stroke="black" stroke-width="1"/>'
    )
    parts.append(
        f'<line x1="{_fmt(_L)}" y1="{_fmt(_T)}" x2="{_fmt(_L)}" '
        f'y2="{_fmt(_T + plot_h)}" stroke="black" stroke-width="1"/>'
    )
    for tick in range(int(math.ceil(x_lo)), int(math.floor(x_hi)) + 1):
        parts.append(
            f'<line x1="{_fmt(sx(tick))}" y1="{_fmt(_T + plot_h)}" x2="{_fmt(sx(tick))}" '
            f'y2="{_fmt(_T + plot_h + 4)}" stroke="black" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{_fmt(sx(tick))}" y="{_fmt(_T + plot_h + 16)}" text-anchor="middle" '
            f'font-family="monospace" font-size="10">{tick}</text>'
        )
    n_yticks = 4
    for j in range(n_yticks + 1):
        y = y_hi * j / n_yticks
        parts.append(
            f'<line x1="{_fmt(_L - 4)}" y1="{_fmt(sy(y))}" x2="{_fmt(_L)}" '
            f'y2="{_fmt(sy(y))}" stroke="black" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{_fmt(_L - 8)}" y="{_fmt(sy(y) + 3)}" text-anchor="end" '
            f'font-family="monospace" font-size="10">{y:.2f}</text>'
        )
    parts.append(
        f'<text x="{_fmt(_L + plot_w / 2)}" y="{_fmt(_H - 12)}" text-anchor="middle" '
        f'font-family="monospace" font-size="11">standardized log-determinant</text>'
    )

    # legend
    lx = _L + plot_w - 150
    parts.append(
        f'<line x1="{_fmt(lx)}" y1="{_fmt(_T + 12)}" x2="{_fmt(lx + 22)}" y2="{_fmt(_T + 12)}" '
        f'stroke="#d62728" stroke-width="1.6"/>'
    )
    parts.append(
        f'<text x="{_fmt(lx + 27)}" y="{_fmt(_T + 15)}" font-family="monospace" '
        f'font-size="10">kernel density</text>'
    )
    parts.append(
        f'<line x1="{_fmt(lx)}" y1="{_fmt(_T + 26)}" x2="{_fmt(lx + 22)}" y2="{_fmt(_T + 26)}" '
        f'stroke="#222222" stroke-width="1.6" stroke-dasharray="5,3"/>'
    )
    parts.append(
        f'<text x="{_fmt(lx + 27)}" y="{_fmt(_T + 29)}" font-family="monospace" '
        f'font-size="10">N(0,1) density</text>'
    )

    parts.append("</svg>")
    return "\n".join(parts) + "\n"
