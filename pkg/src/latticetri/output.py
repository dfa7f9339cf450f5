"""Deterministic CSV/JSON/SVG writers and run manifests."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Sequence


def fmt(x) -> str:
    """Shortest round-trip text for floats; str() for everything else."""
    if isinstance(x, float):
        if math.isnan(x) or math.isinf(x):
            return str(x)
        return repr(x)
    if x is None:
        return ""
    return str(x)


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) for v in r])
    return buf.getvalue()


def json_text(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def write_text(path, text: str) -> Path:
    p = Path(path)
    with open(p, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    return p


def sha256_file(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


@dataclass
class RunManifest:
    subcommand: str
    parameters: dict
    version: str
    duration: float = 0.0
    outputs: list = field(default_factory=list)

    def add_output(self, path) -> None:
        self.outputs.append({"path": str(path), "sha256": sha256_file(path)})

    def write(self, path) -> None:
        write_text(path, json_text(asdict(self)))


def svg_scatter(
    points: Sequence[tuple[float, float]],
    curve: Sequence[tuple[float, float]] = (),
    width: int = 640,
    height: int = 400,
    title: str = "",
    xlabel: str = "",
    ylabel: str = "",
) -> str:
    """Static scatter plot with an optional reference polyline."""
    allpts = list(points) + list(curve)
    if not allpts:
        raise ValueError("nothing to plot")
    xs = [p[0] for p in allpts]
    ys = [p[1] for p in allpts]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    if x1 == x0:
        x1 = x0 + 1
    if y1 == y0:
        y1 = y0 + 1
    pad = 50

    def X(x):
        return pad + (x - x0) / (x1 - x0) * (width - 2 * pad)

    def Y(y):
        return height - pad - (y - y0) / (y1 - y0) * (height - 2 * pad)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" y2="{height - pad}" stroke="black"/>',
        f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height - pad}" stroke="black"/>',
    ]
    for v, anchor_x in ((x0, pad), (x1, width - pad)):
        out.append(f'<text x="{anchor_x:.2f}" y="{height - pad + 16}" font-size="11" text-anchor="middle">{v:.4g}</text>')
    for v, anchor_y in ((y0, height - pad), (y1, pad)):
        out.append(f'<text x="{pad - 4}" y="{anchor_y:.2f}" font-size="11" text-anchor="end">{v:.4g}</text>')
    if title:
        out.append(f'<text x="{width / 2:.2f}" y="20" font-size="14" text-anchor="middle">{title}</text>')
    if xlabel:
        out.append(f'<text x="{width / 2:.2f}" y="{height - 10}" font-size="12" text-anchor="middle">{xlabel}</text>')
    if ylabel:
        out.append(f'<text x="14" y="{height / 2:.2f}" font-size="12" text-anchor="middle" transform="rotate(-90 14 {height / 2:.2f})">{ylabel}</text>')
    if curve:
        path = " ".join(f"{X(x):.2f},{Y(y):.2f}" for x, y in curve)
        out.append(f'<polyline fill="none" stroke="steelblue" stroke-width="1.5" points="{path}"/>')
    for x, y in points:
        out.append(f'<circle cx="{X(x):.2f}" cy="{Y(y):.2f}" r="1.6" fill="black"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
