"""File formats: distribution specs, degree-sequence files, edge lists, JSON/CSV reports."""

from __future__ import annotations

import csv
import dataclasses
import enum
import hashlib
import io
import json
import math
from pathlib import Path

import numpy as np

from suslab.config_sampler import MultiGraph
from suslab.degree_model import (
    DegreeDistribution,
    DegreeSequence,
    power_log_tail,
    power_loglog_tail,
    power_tail,
)


def dist_from_spec(spec: dict) -> DegreeDistribution:
    """Build a law from its JSON description.

    ``{"type": "explicit", "p": {"1": 0.5, "3": 0.5}}``,
    ``{"type": "power_tail", "alpha": 0.5, "kmin": 2, "kmax": 1000000, "p1_floor": 0.1}``,
    ``{"type": "power_log_tail", "alpha": 2.0, ...}``,
    ``{"type": "power_loglog_tail", ...}`` or
    ``{"type": "lambda_mix", "h": <spec>, "lambda": 0.3}``.
    """
    kind = spec.get("type", "explicit")
    tail_kw = {k: spec[k] for k in ("kmin", "kmax", "p1_floor") if k in spec}
    if kind == "explicit":
        return DegreeDistribution.explicit({int(k): float(v) for k, v in spec["p"].items()}, spec.get("normalize", False))
    if kind == "power_tail":
        return power_tail(float(spec["alpha"]), **tail_kw)
    if kind == "power_log_tail":
        return power_log_tail(float(spec["alpha"]), **tail_kw)
    if kind == "power_loglog_tail":
        return power_loglog_tail(**tail_kw)
    if kind == "lambda_mix":
        from suslab.harness import lambda_family

        return lambda_family(dist_from_spec(spec["h"]), float(spec["lambda"]))
    raise ValueError(f"unknown distribution type {kind!r}")


def load_dist(path_or_spec) -> DegreeDistribution:
    if isinstance(path_or_spec, dict):
        return dist_from_spec(path_or_spec)
    return dist_from_spec(json.loads(Path(path_or_spec).read_text()))


def read_sequence(path) -> DegreeSequence:
    """Plain text, one ``degree count`` pair per line; ``#`` starts a comment."""
    counts: dict[int, int] = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"{path}:{lineno}: expected 'degree count'")
        k, c = int(parts[0]), int(parts[1])
        counts[k] = counts.get(k, 0) + c
    return DegreeSequence.from_counts(counts)


def write_sequence(seq: DegreeSequence, path) -> None:
    Path(path).write_text("".join(f"{k} {c}\n" for k, c in sorted(seq.counts.items())))


def sequence_digest(seq: DegreeSequence) -> str:
    return hashlib.sha256(seq.degrees.astype("<i8").tobytes()).hexdigest()[:16]


def format_edge_list(g: MultiGraph, header: dict | None = None) -> str:
    """``u v`` per line with 1-based labels, after ``#`` header lines."""
    out = io.StringIO()
    fields = {"n": g.n, "m": g.m}
    fields.update(header or {})
    out.write("# suslab edge list " + " ".join(f"{k}={v}" for k, v in fields.items()) + "\n")
    np.savetxt(out, g.edges + 1, fmt="%d")
    return out.getvalue()


def parse_edge_list(text: str) -> MultiGraph:
    n = None
    rows = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            for tok in line[1:].split():
                if tok.startswith("n="):
                    n = int(tok[2:])
            continue
        u, v = line.split()[:2]
        rows.append((int(u) - 1, int(v) - 1))
    edges = np.array(rows, dtype=np.int64).reshape(-1, 2)
    if n is None:
        n = int(edges.max()) + 1 if edges.size else 0
    return MultiGraph(n, edges)


def read_edge_list(path) -> MultiGraph:
    return parse_edge_list(Path(path).read_text())


def jsonable(obj):
    """Plain JSON types, with infinities written as the string ``"inf"``."""
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        if hasattr(obj, "to_dict"):
            return jsonable(obj.to_dict())
        return jsonable(dataclasses.asdict(obj))
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        if math.isnan(x):
            return None
        return x
    return obj


def dumps(obj) -> str:
    return json.dumps(jsonable(obj), indent=2, sort_keys=True) + "\n"


def _csv_cell(v):
    if isinstance(v, (float, np.floating)):
        x = float(v)
        return "" if math.isinf(x) or math.isnan(x) else repr(x)
    if isinstance(v, (np.integer,)):
        return int(v)
    return v


def rows_to_csv(rows: list[dict]) -> str:
    """One CSV row per dict; infinite values become empty cells."""
    out = io.StringIO()
    if not rows:
        return ""
    cols = list(rows[0])
    w = csv.writer(out, lineterminator="\n")
    w.writerow(cols)
    for r in rows:
        w.writerow([_csv_cell(r.get(c)) for c in cols])
    return out.getvalue()
