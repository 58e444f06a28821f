"""
File formats.

State file (JSON)::

    {"dims": [2, 2], "kind": "ket" | "density",
     "data": [[re, im], ...]           # ket
           | [[[re, im], ...], ...]}   # density, row-major

Correlation table (JSON)::

    {"dims": [...], "entries": [{"ops": [k1, ..., kn], "mean": x}, ...]}

Floats are written with 17 significant digits so every double round-trips.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .correlations import format_float
from .errors import DimensionError, InvalidStateError
from .linalg import DEFAULT_TOL, check_partition, validate_density
from .ssc import CorrelationTable


class SchemaError(InvalidStateError):
    """A file does not follow the expected layout."""


def dumps(obj, indent: int = 2) -> str:
    """JSON text with 17-significant-digit floats and stable layout."""
    return _encode(obj, indent, 0) + "\n"


def _encode(obj, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None or isinstance(obj, (bool, np.bool_)):
        return json.dumps(None if obj is None else bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        if len(obj) <= 3 and all(_is_flat(v) for v in obj.values()):
            inner = ", ".join(f"{json.dumps(str(k), ensure_ascii=False)}: {_encode(v, indent, level + 1)}"
                              for k, v in obj.items())
            return "{" + inner + "}"
        items = [f"{pad}{json.dumps(str(k), ensure_ascii=False)}: {_encode(v, indent, level + 1)}"
                 for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in seq):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in seq) + "]"
        items = [pad + _encode(v, indent, level + 1) for v in seq]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot encode {type(obj).__name__}")


def _is_flat(v) -> bool:
    if isinstance(v, (dict,)):
        return False
    if isinstance(v, (list, tuple, np.ndarray)):
        return all(not isinstance(x, (dict, list, tuple, np.ndarray)) for x in v)
    return True


def complex_pairs(a: np.ndarray) -> list:
    """Nested ``[re, im]`` lists mirroring the array's shape."""
    a = np.asarray(a, dtype=complex)
    if a.ndim == 0:
        return [float(a.real), float(a.imag)]
    return [complex_pairs(x) for x in a]


def _from_pairs(data, ndim: int) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.ndim != ndim + 1 or arr.shape[-1] != 2:
        raise SchemaError(f"expected {ndim}-d data of [re, im] pairs, got shape {arr.shape}")
    return arr[..., 0] + 1j * arr[..., 1]


@dataclass(frozen=True, eq=False)
class StateFile:
    dims: tuple[int, ...]
    kind: str
    data: np.ndarray

    def density(self) -> np.ndarray:
        if self.kind == "density":
            return self.data
        return np.outer(self.data, self.data.conj()) / float(np.vdot(self.data, self.data).real)

    def to_dict(self) -> dict:
        return {"dims": list(self.dims), "kind": self.kind, "data": complex_pairs(self.data)}


def parse_state(obj: dict, tol: float = DEFAULT_TOL) -> StateFile:
    """Validate and convert a decoded state file.

    Densities must pass ``validate_density`` at ``tol``.
    """
    if not isinstance(obj, dict) or not {"dims", "kind", "data"} <= set(obj):
        raise SchemaError("state file needs 'dims', 'kind' and 'data'")
    kind = obj["kind"]
    if kind not in ("ket", "density"):
        raise SchemaError(f"kind must be 'ket' or 'density', got {kind!r}")
    try:
        dims = check_partition(obj["dims"])
        data = _from_pairs(obj["data"], 1 if kind == "ket" else 2)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, InvalidStateError):
            raise
        raise SchemaError(f"malformed state file: {exc}") from None
    total = int(np.prod(dims))
    expected = (total,) if kind == "ket" else (total, total)
    if data.shape != expected:
        raise DimensionError(f"data shape {data.shape} does not match dims {list(dims)}")
    if kind == "ket" and np.linalg.norm(data) == 0.0:
        raise InvalidStateError("ket is the zero vector")
    if kind == "density":
        report = validate_density(data, tol)
        if not report.ok:
            raise InvalidStateError(
                "invalid density matrix: " + "; ".join(report.failures())
                + f" (min eigenvalue {report.min_eigenvalue:.17g})"
            )
    return StateFile(dims, kind, data)


def load_state(path, tol: float = DEFAULT_TOL) -> StateFile:
    try:
        obj = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not valid JSON ({exc})") from None
    return parse_state(obj, tol)


def write_state(path, state: StateFile) -> None:
    Path(path).write_text(dumps(state.to_dict()))


def load_table(path) -> CorrelationTable:
    try:
        obj = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not valid JSON ({exc})") from None
    if not isinstance(obj, dict):
        raise SchemaError("correlation table file must hold a JSON object")
    return CorrelationTable.from_dict(obj)


def write_table(path, table: CorrelationTable) -> None:
    Path(path).write_text(dumps(table.to_dict()))
