"""Readers for the fixed banditlab output schemas.

Required columns are validated and named on mismatch. Unknown columns are
ignored, with one documented exception: an optional ``z`` column (contextual
runs) becomes part of the series name, since silently merging contexts would
corrupt the curves.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

AGGREGATE_COLUMNS = ("policy", "checkpoint", "mean", "stderr", "q_lo", "q_hi")
HEATMAP_COLUMNS = ("mu1", "mu2", "ratio")


class SchemaError(ValueError):
    pass


def _require_columns(fieldnames, required, path):
    missing = [c for c in required if c not in (fieldnames or ())]
    if missing:
        raise SchemaError(f"{path}: missing required column(s) {', '.join(missing)}")


def read_aggregate(path: str | Path) -> dict[str, dict[str, np.ndarray]]:
    """Aggregate CSV as {series: {checkpoint, mean, stderr, q_lo, q_hi}}."""
    series: dict[str, dict[str, list]] = {}
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        _require_columns(reader.fieldnames, AGGREGATE_COLUMNS, path)
        has_z = "z" in (reader.fieldnames or ())
        for row in reader:
            name = row["policy"] + (f"@{row['z']}" if has_z else "")
            entry = series.setdefault(
                name, {"checkpoint": [], "mean": [], "stderr": [], "q_lo": [], "q_hi": []}
            )
            entry["checkpoint"].append(float(row["checkpoint"]))
            for col in ("mean", "stderr", "q_lo", "q_hi"):
                entry[col].append(float(row[col]))
    if not series:
        raise SchemaError(f"{path}: no data rows")
    return {
        name: {col: np.asarray(vals) for col, vals in entry.items()}
        for name, entry in series.items()
    }


def read_heatmap(path: str | Path):
    """Heatmap CSV as (mu1 values, mu2 values, ratio matrix with NaN blanks)."""
    rows = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        _require_columns(reader.fieldnames, HEATMAP_COLUMNS, path)
        for row in reader:
            ratio = row["ratio"]
            rows.append(
                (float(row["mu1"]), float(row["mu2"]), float(ratio) if ratio else math.nan)
            )
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    mu1 = sorted({r[0] for r in rows})
    mu2 = sorted({r[1] for r in rows})
    index1 = {v: i for i, v in enumerate(mu1)}
    index2 = {v: i for i, v in enumerate(mu2)}
    grid = np.full((len(mu1), len(mu2)), math.nan)
    for m1, m2, ratio in rows:
        grid[index1[m1], index2[m2]] = ratio
    return np.asarray(mu1), np.asarray(mu2), grid


def read_bounds(path: str | Path) -> dict[str, list[dict[str, float]]]:
    """Bounds JSON as {z: [{lower, upper, failure_prob}, ...]} in arm order."""
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict) or not data:
        raise SchemaError(f"{path}: expected a nonempty mapping of contexts")
    for z, arms in data.items():
        if not isinstance(arms, list) or not arms:
            raise SchemaError(f"{path}: context {z!r} must map to a nonempty arm list")
        for i, arm in enumerate(arms):
            for key in ("lower", "upper"):
                if key not in arm:
                    raise SchemaError(f"{path}: context {z!r} arm {i} missing field {key!r}")
    return data


def read_truth(path: str | Path) -> dict[str, list[float]]:
    """Optional ground truth: {z: [mean per arm]}."""
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise SchemaError(f"{path}: expected a mapping of contexts to mean lists")
    return {str(z): [float(m) for m in means] for z, means in data.items()}
