"""CSV tables with a ``# key = value`` comment header."""

from __future__ import annotations

import csv
import json

import numpy as np

__all__ = ["write_table", "read_table", "format_meta", "parse_meta"]


def format_meta(meta):
    lines = []
    for key, val in meta.items():
        lines.append(f"# {key} = {json.dumps(val, default=_jsonable)}")
    return lines


def _jsonable(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    return str(obj)


def parse_meta(lines):
    meta = {}
    for line in lines:
        body = line.lstrip("#").strip()
        if "=" not in body:
            continue
        key, raw = body.split("=", 1)
        try:
            meta[key.strip()] = json.loads(raw.strip())
        except json.JSONDecodeError:
            meta[key.strip()] = raw.strip()
    return meta


def write_table(path, columns, meta=None):
    """Write equal-length columns (a dict name -> array) with a comment header."""
    names = list(columns)
    data = [np.asarray(columns[n]) for n in names]
    if len({d.shape[0] for d in data}) > 1:
        raise ValueError("columns must have equal length")
    with open(path, "w", newline="") as fh:
        for line in format_meta(meta or {}):
            fh.write(line + "\n")
        w = csv.writer(fh)
        w.writerow(names)
        for row in zip(*data):
            w.writerow([repr(float(v)) if not isinstance(v, (bool, np.bool_)) else int(v)
                        for v in row])


def read_table(path):
    """Return ``(meta, columns)``; columns are float arrays keyed by header name."""
    comments, rows = [], []
    with open(path, newline="") as fh:
        for line in fh:
            if line.startswith("#"):
                comments.append(line.rstrip("\n"))
            elif line.strip():
                rows.append(line)
    reader = list(csv.reader(rows))
    if not reader:
        return parse_meta(comments), {}
    header = [h.strip() for h in reader[0]]
    try:
        [float(h) for h in header]
        header, body = [f"c{i}" for i in range(len(header))], reader
    except ValueError:
        body = reader[1:]
    cols = {h: np.array([float(r[i]) for r in body]) for i, h in enumerate(header)}
    return parse_meta(comments), cols
