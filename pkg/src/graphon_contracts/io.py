"""Delimited-text tables and the run manifest."""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

from . import __version__


def _fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    return repr(float(x))


def write_table(path, header, rows, delimiter=","):
    """Write one header line and one line per row; floats use ``repr``."""
    path = Path(path)
    lines = [delimiter.join(header)]
    for row in rows:
        lines.append(delimiter.join(_fmt(x) for x in row))
    path.write_text("\n".join(lines) + "\n")
    return path


def read_table(path, delimiter=","):
    lines = Path(path).read_text().splitlines()
    header = lines[0].split(delimiter)
    data = np.array([[float(c) if c else np.nan for c in ln.split(delimiter)] for ln in lines[1:]])
    return header, data


def write_grid(path, row_label, row_values, col_values, values):
    """Matrix table: header = ``row_label`` then column coordinates; first column = row coordinates."""
    header = [row_label] + [_fmt(c) for c in col_values]
    rows = ([r] + list(v) for r, v in zip(row_values, values))
    return write_table(path, header, rows)


def sha256(path):
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if np.isfinite(v) else None
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def write_manifest(out_dir, command, config_text, resolved, results, files):
    """Write ``manifest.json`` listing every emitted file with its SHA-256."""
    out_dir = Path(out_dir)
    manifest = {
        "package_version": __version__,
        "command": command,
        "config_text": config_text,
        "config": resolved,
        "results": results,
        "files": {Path(f).name: sha256(f) for f in sorted(files, key=lambda p: Path(p).name)},
    }
    path = out_dir / "manifest.json"
    path.write_text(json.dumps(_plain(manifest), indent=2, sort_keys=True) + "\n")
    return path
