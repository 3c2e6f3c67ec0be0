"""Deterministic writers: columnar text, dense matrices and JSON sidecars."""
import json
from pathlib import Path

import numpy as np

FMT = "%.12e"


def _header(lines):
    return "\n".join(lines)


def write_columns(path, columns, names, comments=()):
    """Columnar text with ``# key = value`` comments and a column-name line."""
    data = np.column_stack([np.asarray(c, dtype=float) for c in columns])
    head = list(comments) + [" ".join(names)]
    np.savetxt(path, data, fmt=FMT, header=_header(head), comments="# ")
    return Path(path)


def write_matrix(path, matrix, comments=()):
    np.savetxt(path, np.asarray(matrix, dtype=float), fmt=FMT,
               header=_header(comments), comments="# ")
    return Path(path)


def read_columns(path):
    return np.loadtxt(path, comments="#", ndmin=2)


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if np.isfinite(x) else str(x)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def write_json(path, payload):
    text = json.dumps(_plain(payload), indent=2, sort_keys=True)
    Path(path).write_text(text + "\n", encoding="utf-8")
    return Path(path)
