"""
File writers shared by the command-line runner.

Raw arrays are stored as little-endian float64 with a JSON sidecar
(``<name>.json``) describing shape, column meaning and units. Complex data
is stored as interleaved real/imaginary pairs (last axis of length 2).
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .errors import InvalidParameterError


def write_raw(path, data, **meta) -> Path:
    """Write ``data`` as ``<f8`` bytes plus a ``.json`` sidecar; returns the data path."""
    path = Path(path)
    arr = np.asarray(data)
    complex_data = np.iscomplexobj(arr)
    if complex_data:
        arr = np.stack([arr.real, arr.imag], axis=-1)
    arr = np.ascontiguousarray(arr, dtype="<f8")
    path.write_bytes(arr.tobytes())
    side = {"dtype": "<f8", "shape": list(arr.shape), "complex_interleaved": complex_data}
    side.update(meta)
    sidecar_path(path).write_text(dump_json(side))
    return path


def sidecar_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".json")


def read_raw(path) -> tuple[np.ndarray, dict]:
    """Inverse of :func:`write_raw`."""
    path = Path(path)
    meta = json.loads(sidecar_path(path).read_text())
    if meta.get("dtype") != "<f8":
        raise InvalidParameterError(f"unsupported raw dtype {meta.get('dtype')!r}")
    arr = np.frombuffer(path.read_bytes(), dtype="<f8").reshape(meta["shape"])
    if meta.get("complex_interleaved"):
        arr = arr[..., 0] + 1j * arr[..., 1]
    return arr, meta


def write_csv(path, header, rows) -> Path:
    """RFC 4180 style CSV; floats are written with ``repr`` so they round-trip."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    return path


def dump_json(obj) -> str:
    """Deterministic JSON text (sorted keys, NaN/inf mapped to null)."""
    return json.dumps(_clean(obj), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_clean(v) for v in obj.tolist()]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if np.isfinite(v) else None
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj
