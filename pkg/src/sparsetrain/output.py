"""CSV and SVG emission. Both are byte-stable for identical inputs."""
from __future__ import annotations

import csv
import io
import math
from xml.sax.saxutils import escape

import numpy as np

from .montecarlo import SweepPoint, SweepResult

SWEEP_COLUMNS = ("snr", "snr_rel", "mean_mse", "std_err", "mean_precision", "mean_recall", "n_trials")
THEORY_COLUMNS = (
    "snr",
    "snr_rel",
    "mmse_hc",
    "mmse_hg",
    "mi_hc",
    "mi_hg",
    "penalty_hc",
    "penalty_hg",
    "rdf_ratio_hc",
    "rdf_ratio_hg",
)
COMPARE_COLUMNS = (
    "k_c",
    "L",
    "snr",
    "fletcher_measurements",
    "fletcher_energy",
    "ours_measurements",
    "ours_energy",
    "energy_ratio",
)


def format_number(value) -> str:
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    return format(float(value), ".9g")


def write_csv(columns, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        if len(row) != len(columns):
            raise ValueError(f"row has {len(row)} fields, header has {len(columns)}")
        writer.writerow([format_number(v) for v in row])
    return buf.getvalue()


def read_csv(text: str) -> tuple[list[str], list[list[float]]]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    rows = [[float(v) for v in row] for row in reader if row]
    for row in rows:
        if len(row) != len(header):
            raise ValueError("row arity does not match the header")
    return header, rows


def sweep_csv(result: SweepResult) -> str:
    rows = [
        (p.snr, p.snr_relative, p.mean_mse, p.std_err, p.mean_precision, p.mean_recall, p.n_trials)
        for p in result.points
    ]
    return write_csv(SWEEP_COLUMNS, rows)


def sweep_from_csv(text: str) -> SweepResult:
    header, rows = read_csv(text)
    if tuple(header) != SWEEP_COLUMNS:
        raise ValueError(f"not a sweep CSV, header {header}")
    points = tuple(
        SweepPoint(
            snr=r[0],
            snr_relative=r[1],
            mean_mse=r[2],
            std_err=r[3],
            mean_precision=r[4],
            mean_recall=r[5],
            n_trials=int(r[6]),
        )
        for r in rows
    )
    return SweepResult(points)


def theory_csv(snr_grid, snr0, curves) -> str:
    grid = np.asarray(snr_grid, dtype=float)
    rel = grid / snr0 if snr0 > 0 else np.full(grid.size, math.inf)
    data = [grid, rel] + [curves[name].values for name in THEORY_COLUMNS[2:]]
    return write_csv(THEORY_COLUMNS, list(zip(*data)))


def compare_csv(records) -> str:
    rows = [
        (
            r.k_c,
            r.L,
            r.snr,
            r.fletcher_measurements,
            r.fletcher_energy,
            r.ours_measurements,
            r.ours_energy,
            r.energy_ratio,
        )
        for r in records
    ]
    return write_csv(COMPARE_COLUMNS, rows)


_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b")
_WIDTH, _HEIGHT = 640, 400
_LEFT, _RIGHT, _TOP, _BOTTOM = 60, 150, 30, 50


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def line_chart_svg(x, series: dict, title: str = "", x_label: str = "SNR / SNR0", y_label: str = "") -> str:
    """Self-contained SVG line chart with a log-scaled x axis.

    The y range is [0, 1] unless the data exceeds 1. Points with non-positive
    or non-finite x are dropped.
    """
    x = np.asarray(x, dtype=float)
    keep = np.isfinite(x) & (x > 0)
    x = x[keep]
    ys = {name: np.asarray(vals, dtype=float)[keep] for name, vals in series.items()}
    plot_w = _WIDTH - _LEFT - _RIGHT
    plot_h = _HEIGHT - _TOP - _BOTTOM

    if x.size:
        lo, hi = math.floor(math.log10(x.min())), math.ceil(math.log10(x.max()))
        if hi == lo:
            hi = lo + 1
    else:
        lo, hi = 0, 1
    finite = [v[np.isfinite(v)] for v in ys.values()]
    y_max = max([1.0] + [float(v.max()) for v in finite if v.size])

    def px(v):
        return _LEFT + (math.log10(v) - lo) / (hi - lo) * plot_w

    def py(v):
        return _TOP + plot_h - (v / y_max) * plot_h

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" height="{_HEIGHT}" '
        f'viewBox="0 0 {_WIDTH} {_HEIGHT}">',
        f'<rect x="0" y="0" width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>',
        f'<rect x="{_LEFT}" y="{_TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>',
    ]
    if title:
        out.append(f'<text x="{_LEFT + plot_w / 2:.2f}" y="18" text-anchor="middle" font-size="14">{escape(title)}</text>')
    for e in range(lo, hi + 1):
        xp = _fmt(px(10.0**e))
        out.append(f'<line x1="{xp}" y1="{_TOP}" x2="{xp}" y2="{_TOP + plot_h}" stroke="#dddddd"/>')
        out.append(
            f'<text x="{xp}" y="{_TOP + plot_h + 16}" text-anchor="middle" font-size="11">1e{e}</text>'
        )
    for k in range(5):
        yv = y_max * k / 4
        yp = _fmt(py(yv))
        out.append(f'<line x1="{_LEFT}" y1="{yp}" x2="{_LEFT + plot_w}" y2="{yp}" stroke="#dddddd"/>')
        out.append(f'<text x="{_LEFT - 6}" y="{yp}" text-anchor="end" font-size="11">{yv:.2f}</text>')
    out.append(
        f'<text x="{_LEFT + plot_w / 2:.2f}" y="{_HEIGHT - 10}" text-anchor="middle" font-size="12">{escape(x_label)}</text>'
    )
    if y_label:
        out.append(
            f'<text x="14" y="{_TOP + plot_h / 2:.2f}" text-anchor="middle" font-size="12" '
            f'transform="rotate(-90 14 {_TOP + plot_h / 2:.2f})">{escape(y_label)}</text>'
        )
    for n, (name, vals) in enumerate(ys.items()):
        colour = _PALETTE[n % len(_PALETTE)]
        pts = " ".join(f"{_fmt(px(a))},{_fmt(py(b))}" for a, b in zip(x, vals) if math.isfinite(b))
        out.append(f'<polyline fill="none" stroke="{colour}" stroke-width="2" points="{pts}"/>')
        ly = _TOP + 14 + 18 * n
        lx = _LEFT + plot_w + 10
        out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 20}" y2="{ly}" stroke="{colour}" stroke-width="2"/>')
        out.append(f'<text x="{lx + 26}" y="{ly + 4}" font-size="11">{escape(name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def csv_to_svg(text: str, columns=None, title: str = "") -> str:
    header, rows = read_csv(text)
    if "snr_rel" not in header:
        raise ValueError("CSV has no snr_rel column to plot against")
    if columns is None:
        if "mean_mse" in header:
            columns = ["mean_mse"]
        elif "mmse_hc" in header:
            columns = ["mmse_hc", "mmse_hg"]
        else:
            columns = [c for c in header if c not in ("snr", "snr_rel")]
    missing = [c for c in columns if c not in header]
    if missing:
        raise ValueError(f"unknown columns {missing}")
    data = np.array(rows, dtype=float).reshape(len(rows), len(header))
    x = data[:, header.index("snr_rel")]
    series = {c: data[:, header.index(c)] for c in columns}
    return line_chart_svg(x, series, title=title)
