"""Typed result tables and their CSV / JSON / SVG serialization.

A :class:`ResultBundle` holds named tables plus a metadata block.  Data files
are deterministic: floats are written with 17 significant digits and the
wall-clock time lives only in the separate ``*_meta.json`` file.
"""

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = ["Column", "Table", "ResultBundle", "write_bundle", "read_table_csv", "read_bundle_json", "svg_polylines", "svg_contours"]

UNITS_NOTE = "natural units: hbar = 1, 2M = 1, E = k^2; lengths in the cavity's length unit"

_TYPES = {"int": int, "float": float, "str": str}


@dataclass(frozen=True)
class Column:
    name: str
    type: str = "float"
    unit: str = ""

    def header(self):
        return f"{self.name}:{self.type}[{self.unit}]"

    @classmethod
    def parse(cls, text):
        name, rest = text.split(":", 1)
        typ, unit = rest.split("[", 1)
        return cls(name, typ, unit.rstrip("]"))


@dataclass
class Table:
    columns: list
    rows: list = field(default_factory=list)

    def column(self, name):
        i = [c.name for c in self.columns].index(name)
        return [r[i] for r in self.rows]

    def add(self, *values):
        if len(values) != len(self.columns):
            raise ValueError(f"row has {len(values)} values for {len(self.columns)} columns")
        self.rows.append(tuple(_TYPES[c.type](v) for c, v in zip(self.columns, values)))


@dataclass
class ResultBundle:
    name: str
    tables: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)
    svgs: dict = field(default_factory=dict)


def _fmt(v):
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def write_table_csv(table, path, title=""):
    path = Path(path)
    with path.open("w", newline="") as fh:
        fh.write(f"# {title}\n# {UNITS_NOTE}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([c.header() for c in table.columns])
        for row in table.rows:
            w.writerow([_fmt(v) for v in row])
    return path


def read_table_csv(path):
    with Path(path).open(newline="") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    reader = csv.reader(lines)
    columns = [Column.parse(h) for h in next(reader)]
    table = Table(columns)
    for row in reader:
        table.add(*row)
    return table


def _jsonable(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, float) and not np.isfinite(v):
        return str(v)
    return v


def _table_json(table):
    return {
        "columns": [c.header() for c in table.columns],
        "rows": [[_jsonable(v) for v in r] for r in table.rows],
    }


def write_bundle(bundle, outdir, formats=("csv",)):
    """Write every table in each requested format; returns the file list."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    files = []
    if "csv" in formats:
        for key, table in sorted(bundle.tables.items()):
            files.append(write_table_csv(table, outdir / f"{bundle.name}_{key}.csv", f"{bundle.name}/{key}"))
    if "json" in formats:
        payload = {
            "name": bundle.name,
            "units": UNITS_NOTE,
            "tables": {k: _table_json(t) for k, t in sorted(bundle.tables.items())},
        }
        path = outdir / f"{bundle.name}.json"
        path.write_text(json.dumps(payload, indent=1, sort_keys=True, default=_jsonable) + "\n")
        files.append(path)
    if "svg" in formats:
        for key, text in sorted(bundle.svgs.items()):
            path = outdir / f"{bundle.name}_{key}.svg"
            path.write_text(text)
            files.append(path)
    meta = outdir / f"{bundle.name}_meta.json"
    meta.write_text(json.dumps(bundle.metadata, indent=1, sort_keys=True, default=_jsonable) + "\n")
    files.append(meta)
    return files


def read_bundle_json(path):
    payload = json.loads(Path(path).read_text())
    bundle = ResultBundle(payload["name"])
    for key, tj in payload["tables"].items():
        t = Table([Column.parse(h) for h in tj["columns"]])
        for r in tj["rows"]:
            t.add(*r)
        bundle.tables[key] = t
    meta = Path(path).with_name(f"{payload['name']}_meta.json")
    if meta.exists():
        bundle.metadata = json.loads(meta.read_text())
    return bundle


def _frame(xs, ys, size):
    x0, x1 = float(np.min(xs)), float(np.max(xs))
    y0, y1 = float(np.min(ys)), float(np.max(ys))
    span = max(x1 - x0, y1 - y0, 1e-12)
    pad = 0.05 * span

    def to_px(x, y):
        return (size * (x - x0 + pad) / (span + 2 * pad), size * (1 - (y - y0 + pad) / (span + 2 * pad)))

    return to_px


def svg_polylines(polylines, size=480):
    """Polylines given as (N, 2) arrays in data coordinates, equal aspect."""
    allpts = np.concatenate([np.asarray(p, dtype=float) for p in polylines])
    to_px = _frame(allpts[:, 0], allpts[:, 1], size)
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}">']
    for p in polylines:
        pts = " ".join("%.2f,%.2f" % to_px(x, y) for x, y in np.asarray(p, dtype=float))
        parts.append(f'<polyline fill="none" stroke="black" stroke-width="0.7" points="{pts}"/>')
    parts.append("</svg>\n")
    return "\n".join(parts)


def svg_contours(x, y, z, levels=12, size=480):
    """Contour paths of z on the grid (x, y), traced by contourpy."""
    import contourpy

    z = np.asarray(z, dtype=float)
    finite = np.isfinite(z)
    if not finite.any():
        return svg_polylines([np.array([[x[0], y[0]], [x[-1], y[-1]]])], size)
    gen = contourpy.contour_generator(np.asarray(x), np.asarray(y), np.ma.masked_invalid(z))
    lines = []
    for lev in np.linspace(np.nanmin(z), np.nanmax(z), levels + 2)[1:-1]:
        lines.extend(seg for seg in gen.lines(lev) if len(seg) > 1)
    frame = np.array([[x[0], y[0]], [x[-1], y[0]], [x[-1], y[-1]], [x[0], y[-1]], [x[0], y[0]]])
    return svg_polylines([frame] + lines, size)
