"""CSV results and dependency-free SVG line charts."""
from __future__ import annotations

import csv
from collections import OrderedDict
from pathlib import Path
from typing import IO, Iterable, Optional, Sequence, Union
from xml.sax.saxutils import escape

import numpy as np

from .experiment import RECORD_COLUMNS

WIDTH, HEIGHT = 800, 600
MARGIN = dict(left=80, right=150, top=40, bottom=70)
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf")
X_CANDIDATES = ("epsilon", "delta", "nu", "seed", "n")


class EmptyReportError(ValueError):
    pass


def format_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, np.generic):
        v = v.item()
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, float):
        return repr(v)
    return str(v)


class CsvAppender:
    """Writes the header on open, then one flushed row per :meth:`append`."""

    def __init__(self, path: Union[str, Path, IO[str]], columns: Sequence[str]):
        self.columns = tuple(columns)
        self._owned = not hasattr(path, "write")
        self._fh = open(path, "w", newline="") if self._owned else path
        self._writer = csv.writer(self._fh, lineterminator="\n")
        self._writer.writerow(self.columns)
        self._fh.flush()

    def append(self, record: dict) -> None:
        self._writer.writerow([format_value(record[c]) for c in self.columns])
        self._fh.flush()

    def close(self) -> None:
        if self._owned:
            self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def read_csv(path: Union[str, Path]) -> list[dict]:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    out = []
    for r in rows:
        rec = {}
        for k, v in r.items():
            try:
                rec[k] = int(v)
            except ValueError:
                try:
                    rec[k] = float(v)
                except ValueError:
                    rec[k] = v
        out.append(rec)
    return out


def pick_x_axis(records: Sequence[dict]) -> str:
    for name in X_CANDIDATES:
        if name in records[0] and len({r[name] for r in records}) > 1:
            return name
    return "epsilon"


def _ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    return [lo + (hi - lo) * i / (count - 1) for i in range(count)]


def _padded(vals: Iterable[float]) -> tuple[float, float]:
    vals = list(vals)
    lo, hi = min(vals), max(vals)
    if hi == lo:
        pad = abs(lo) * 0.05 or 0.05
    else:
        pad = (hi - lo) * 0.05
    return lo - pad, hi + pad


def render_svg(records: Sequence[dict], x: Optional[str] = None, y: str = "success_prob",
               series: str = "n") -> str:
    """Line chart of ``y`` against ``x`` with one polyline per ``series`` value."""
    if not records:
        raise EmptyReportError("no records to plot")
    x = x or pick_x_axis(records)
    groups: "OrderedDict[object, list]" = OrderedDict()
    for r in records:
        groups.setdefault(r.get(series), []).append((float(r[x]), float(r[y])))
    x0, x1 = _padded(float(r[x]) for r in records)
    y0, y1 = _padded(float(r[y]) for r in records)
    left, top = MARGIN["left"], MARGIN["top"]
    pw = WIDTH - MARGIN["left"] - MARGIN["right"]
    ph = HEIGHT - MARGIN["top"] - MARGIN["bottom"]

    def sx(v):
        return left + (v - x0) / (x1 - x0) * pw

    def sy(v):
        return top + ph - (v - y0) / (y1 - y0) * ph

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" width="{WIDTH}" height="{HEIGHT}">',
           f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
           f'<g stroke="black" stroke-width="1">'
           f'<line x1="{left}" y1="{top + ph}" x2="{left + pw}" y2="{top + ph}"/>'
           f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + ph}"/></g>']
    out.append('<g font-family="sans-serif" font-size="12">')
    for t in _ticks(x0, x1):
        out.append(f'<line x1="{sx(t):.2f}" y1="{top + ph}" x2="{sx(t):.2f}" y2="{top + ph + 5}" stroke="black"/>'
                   f'<text x="{sx(t):.2f}" y="{top + ph + 20}" text-anchor="middle">{t:.4g}</text>')
    for t in _ticks(y0, y1):
        out.append(f'<line x1="{left - 5}" y1="{sy(t):.2f}" x2="{left}" y2="{sy(t):.2f}" stroke="black"/>'
                   f'<text x="{left - 8}" y="{sy(t) + 4:.2f}" text-anchor="end">{t:.4g}</text>')
    out.append(f'<text class="xlabel" x="{left + pw / 2:.1f}" y="{HEIGHT - 20}" text-anchor="middle" font-size="14">'
               f'{escape(x)}</text>')
    out.append(f'<text class="ylabel" x="20" y="{top + ph / 2:.1f}" text-anchor="middle" font-size="14" '
               f'transform="rotate(-90 20 {top + ph / 2:.1f})">{escape(y)}</text>')
    out.append("</g>")
    for i, (key, pts) in enumerate(groups.items()):
        color = COLORS[i % len(COLORS)]
        pts.sort()
        coords = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in pts)
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="2" points="{coords}"/>')
        label = escape(f"{series}={key}")
        ly = top + 10 + 20 * i
        out.append(f'<g class="legend"><line x1="{left + pw + 15}" y1="{ly}" x2="{left + pw + 40}" y2="{ly}" '
                   f'stroke="{color}" stroke-width="2"/><text x="{left + pw + 45}" y="{ly + 4}" '
                   f'font-family="sans-serif" font-size="12">{label}</text></g>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_report(records: Sequence[dict], kind: str, path: Union[str, Path], x: Optional[str] = None) -> Path:
    if not records:
        raise EmptyReportError("no records to report")
    path = Path(path)
    if kind == "csv":
        with CsvAppender(path, RECORD_COLUMNS) as out:
            for r in records:
                out.append(r)
    elif kind == "svg":
        path.write_text(render_svg(records, x))
    else:
        raise ValueError(f"unknown report kind {kind!r}")
    return path

