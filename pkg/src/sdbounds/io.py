"""File formats, serialization and run manifests.

Operator files::

    {"dim": 2, "re": [[0, 1], [1, 0]], "im": [[0, 0], [0, 0]]}

``im`` may be omitted (real operator). State files use ``{"re": [...],
"im": [...]}``. CSV floats are written with 12 significant digits; every
file is written to a temporary name and renamed into place.
"""
from __future__ import annotations

import csv
import io as _io
import json
import math
import os
import sys
import tempfile
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import __version__
from .config import TOL
from .errors import DimensionMismatch, NonNormalizedState, ParseError
from .linalg import as_density_matrix, validate_hermitian


def _read_json(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    if not isinstance(data, dict):
        raise ParseError(f"{path}: top-level JSON value must be an object")
    return data


def _array(data: dict, key: str, path, ndim: int, required: bool = True):
    if key not in data:
        if required:
            raise ParseError(f"{path}: missing field {key!r}")
        return None
    try:
        arr = np.array(data[key], dtype=np.float64)
    except (TypeError, ValueError):
        raise ParseError(f"{path}: field {key!r} is not a numeric array") from None
    if arr.ndim != ndim:
        raise ParseError(f"{path}: field {key!r} must be {ndim}-dimensional, got shape {arr.shape}")
    return arr


def operator_from_dict(data: dict, path="<operator>") -> np.ndarray:
    re = _array(data, "re", path, 2)
    im = _array(data, "im", path, 2, required=False)
    if im is None:
        im = np.zeros_like(re)
    if im.shape != re.shape:
        raise DimensionMismatch(f"{path}: 're' shape {re.shape} != 'im' shape {im.shape}")
    if "dim" in data and (not isinstance(data["dim"], int) or re.shape != (data["dim"], data["dim"])):
        raise DimensionMismatch(f"{path}: declared dim {data['dim']!r} but matrix has shape {re.shape}")
    return re + 1j * im


def load_operator(path) -> np.ndarray:
    return validate_hermitian(operator_from_dict(_read_json(path), path))


def load_density(path) -> np.ndarray:
    return as_density_matrix(operator_from_dict(_read_json(path), path))


def state_from_dict(data: dict, path="<state>", renormalize: bool = False) -> np.ndarray:
    re = _array(data, "re", path, 1)
    im = _array(data, "im", path, 1, required=False)
    if im is None:
        im = np.zeros_like(re)
    if im.shape != re.shape:
        raise DimensionMismatch(f"{path}: 're' length {re.size} != 'im' length {im.size}")
    v = re + 1j * im
    norm = float(np.linalg.norm(v))
    if norm == 0.0:
        raise NonNormalizedState(f"{path}: zero vector")
    if abs(norm - 1.0) > TOL.loader_renorm and not renormalize:
        raise NonNormalizedState(f"{path}: norm {norm:.12g} outside the renormalization window "
                                 f"{TOL.loader_renorm:g}; pass --renormalize to accept")
    return v / norm


def load_state(path, renormalize: bool = False) -> np.ndarray:
    return state_from_dict(_read_json(path), path, renormalize)


def operator_to_dict(h: np.ndarray) -> dict:
    h = np.asarray(h, dtype=np.complex128)
    return {"dim": int(h.shape[0]), "re": h.real.tolist(), "im": h.imag.tolist()}


def state_to_dict(v: np.ndarray) -> dict:
    v = np.asarray(v, dtype=np.complex128)
    return {"re": v.real.tolist(), "im": v.imag.tolist()}


def fmt(value) -> str:
    """CSV cell: 12 significant digits for floats, ``true``/``false`` for booleans."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        if math.isnan(value):
            return "nan"
        return f"{float(value):.12g}"
    return str(value)


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(c) for c in row])
    return buf.getvalue()


def json_text(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, default=_json_default) + "\n"


def _json_default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def write_atomic(path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def make_manifest(command: str, config: dict, master_seed: int | None = None,
                  argv: Sequence[str] | None = None, outputs: Sequence[str] = ()) -> dict:
    return {
        "command": command,
        "argv": list(sys.argv if argv is None else argv),
        "config": config,
        "master_seed": master_seed,
        "tool_version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds").replace("+00:00", "Z"),
        "tolerances": TOL.as_dict(),
        "outputs": list(outputs),
    }
