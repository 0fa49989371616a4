"""JSON and CSV serialization of fields, spectra, curves and traces.

CSV files start with a ``# {json}`` line holding the run configuration,
followed by a header row.  Output is UTF-8 with LF line endings.
"""
from __future__ import annotations

import csv
import io as _io
import json

import numpy as np

from .errors import InvalidParameter
from .graph import GraphField, make_graph


def _pair(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def field_to_dict(f: GraphField) -> dict:
    g = f.graph
    return {
        "n_edges": g.n_edges,
        "length": g.length,
        "m_points": g.m_points,
        "vertex_value": _pair(f.vertex_value),
        "edges": [[_pair(z) for z in row] for row in f.edges],
    }


def field_from_dict(d: dict) -> GraphField:
    try:
        g = make_graph(d["n_edges"], d["length"], d["m_points"])
        v0 = complex(*d["vertex_value"])
        edges = np.array([[complex(re, im) for re, im in row] for row in d["edges"]])
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidParameter(f"malformed GraphField document: {exc}") from exc
    if not np.any(edges.imag) and v0.imag == 0:
        return GraphField(g, v0.real, edges.real)
    return GraphField(g, v0, edges)


def dumps_json(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, default=_json_default) + "\n"


def _json_default(obj):
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if hasattr(obj, "value"):
        return obj.value
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _csv(header: list, rows, config: dict | None) -> str:
    buf = _io.StringIO()
    if config is not None:
        buf.write("# " + json.dumps(config, sort_keys=True, default=_json_default) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in r])
    return buf.getvalue()


def read_csv(text: str) -> tuple[dict | None, list, list]:
    """``(config, header, rows)``; numeric cells are returned as floats."""
    lines = text.splitlines()
    config = None
    if lines and lines[0].startswith("# "):
        config = json.loads(lines[0][2:])
        lines = lines[1:]
    reader = csv.reader(lines)
    header = next(reader)
    rows = [[float(c) for c in r] for r in reader]
    return config, header, rows


def eigen_table_csv(report, config: dict | None = None) -> str:
    rows = [(i, lam, res) for i, (lam, res) in enumerate(zip(report.eigenvalues, report.residuals))]
    return _csv(["index", "lambda", "residual"], rows, config)


def eigencurve_csv(curve, config: dict | None = None) -> str:
    return _csv(["alpha", "mu2", "residual"], zip(curve.alphas, curve.mu2, curve.residuals), config)


def trace_csv(trace, config: dict | None = None) -> str:
    cfg = dict(trace.config)
    if config:
        cfg.update(config)
    rows = zip(trace.times, trace.charge, trace.energy, trace.orbital_distance, trace.sup_norm)
    return _csv(["t", "Q", "E", "dist", "sup"], rows, cfg)
