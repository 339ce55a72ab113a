"""Deterministic file output: pole tables (CSV), full report (JSON), pole scatter (SVG)."""
from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from pathlib import Path

import numpy as np

CSV_COLUMNS = ("lambda", "re_s", "im_s", "re_z", "im_z", "stable")
SVG_SIZE = 800
SVG_SCALE = 300.0  # pixels per unit of the mapped plane
SVG_CLIP = 1.3


def pole_rows(results, attr="poles"):
    """Flatten a sweep into ``(lambda, re_s, im_s, re_z, im_z, stable)`` rows."""
    from .synth import disc_view

    rows = []
    for r in results:
        poles = getattr(r, attr)
        mapped = r.mapped if attr == "poles" else disc_view(poles)
        for p, z in zip(poles, mapped):
            rows.append((float(r.lam), float(p.real), float(p.imag),
                         float(z.real), float(z.imag), bool(r.stable)))
    return rows


def _fmt(x):
    if isinstance(x, bool):
        return "1" if x else "0"
    return repr(float(x))


def csv_text(rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def read_csv(text):
    """Inverse of :func:`csv_text`."""
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if tuple(header) != CSV_COLUMNS:
        raise ValueError(f"unexpected CSV header {header}")
    return [tuple(float(v) for v in row[:5]) + (row[5] == "1",) for row in reader]


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": _jsonable(obj.real), "im": _jsonable(obj.imag)}
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    return obj


def json_text(report: dict):
    return json.dumps(_jsonable(report), sort_keys=True, indent=2) + "\n"


def _ramp(t):
    """Blue to red as ``t`` goes 0 -> 1."""
    r = int(round(30 + 200 * t))
    b = int(round(230 - 200 * t))
    return f"#{r:02x}50{b:02x}"


def svg_text(results, title="closed-loop poles, z = (1+s)/(1-s)"):
    c = SVG_SIZE / 2
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_SIZE}" height="{SVG_SIZE}" '
        f'viewBox="0 0 {SVG_SIZE} {SVG_SIZE}">',
        f'<rect x="0" y="0" width="{SVG_SIZE}" height="{SVG_SIZE}" fill="white"/>',
        f'<line x1="0" y1="{c}" x2="{SVG_SIZE}" y2="{c}" stroke="#bbbbbb"/>',
        f'<line x1="{c}" y1="0" x2="{c}" y2="{SVG_SIZE}" stroke="#bbbbbb"/>',
        f'<circle id="unit-circle" cx="{c}" cy="{c}" r="{SVG_SCALE:g}" fill="none" stroke="black" stroke-width="2"/>',
        f'<text x="10" y="20" font-family="sans-serif" font-size="14">{title}</text>',
    ]
    count = len(results)
    for i, r in enumerate(results):
        t = i / (count - 1) if count > 1 else 0.0
        color = _ramp(t)
        marks = []
        for z in r.mapped:
            if not np.isfinite(z):
                continue
            x = float(np.clip(z.real, -SVG_CLIP, SVG_CLIP))
            y = float(np.clip(z.imag, -SVG_CLIP, SVG_CLIP))
            marks.append(f'<circle cx="{c + SVG_SCALE * x:.3f}" cy="{c - SVG_SCALE * y:.3f}" r="4" '
                         f'fill="{color}"/>')
        if marks:
            out.append(f'<g class="lambda" data-lambda="{r.lam!r}">')
            out.extend(marks)
            out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_outputs(outdir, report: dict, sweep=None, formats=("csv", "json", "svg")):
    """Write the requested files and return ``{name: sha256}`` (also stored in the report)."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    texts = {}
    results = sweep.results if sweep is not None else ()
    if "csv" in formats:
        texts["poles.csv"] = csv_text(pole_rows(results))
        texts["open_loop_poles.csv"] = csv_text(pole_rows(results, "open_loop"))
    if "svg" in formats:
        texts["poles.svg"] = svg_text(results)
    digests = {name: hashlib.sha256(t.encode()).hexdigest() for name, t in texts.items()}
    if "json" in formats:
        report = dict(report, files=dict(digests))
        texts["report.json"] = json_text(report)
        digests["report.json"] = hashlib.sha256(texts["report.json"].encode()).hexdigest()
    for name, t in texts.items():
        (outdir / name).write_text(t)
    return digests
