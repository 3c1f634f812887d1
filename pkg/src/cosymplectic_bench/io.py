"""Instance documents (JSON) and sweep rows (CSV).

Floats are written with Python's shortest round-trip representation, so a
document read back and written again is byte-identical and every value is
bit-faithful.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import astuple, dataclass, fields
from pathlib import Path

import numpy as np

from .ambient import make_standard_structure
from .submanifold import InvalidPointError, SubmanifoldPoint

SCHEMA_VERSION = 1


class DocumentError(ValueError):
    """Malformed instance document; ``path`` names the offending field, e.g. ``h[0][1][2]``."""

    def __init__(self, message: str, path: str):
        super().__init__(f"{path}: {message}")
        self.path = path


def _number(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise DocumentError(f"expected a number, got {type(value).__name__}", path)
    if not math.isfinite(value):
        raise DocumentError("non-finite number", path)
    return float(value)


def _array(value, path: str, depth: int) -> np.ndarray:
    """Nested list of numbers with a rectangular shape of the given depth."""

    def walk(v, p, level):
        if level == 0:
            return _number(v, p)
        if not isinstance(v, list):
            raise DocumentError(f"expected a list, got {type(v).__name__}", p)
        return [walk(x, f"{p}[{k}]", level - 1) for k, x in enumerate(v)]

    nested = walk(value, path, depth)
    try:
        arr = np.array(nested, dtype=float)
    except ValueError:
        raise DocumentError("ragged array", path) from None
    if arr.ndim != depth:
        raise DocumentError(f"ragged array (expected {depth} levels)", path)
    return arr


@dataclass(frozen=True, eq=False)
class InstanceDocument:
    m: int
    c: float
    tangent_frame: np.ndarray
    normal_frame: np.ndarray
    h: np.ndarray
    geometric_mode: bool = True
    seed: int | None = None
    schema_version: int = SCHEMA_VERSION

    @classmethod
    def from_point(cls, pt: SubmanifoldPoint, seed: int | None = None) -> "InstanceDocument":
        return cls(pt.ambient.m, pt.c, pt.tangent_frame, pt.normal_frame, pt.h, pt.geometric_mode, seed)

    def to_point(self) -> SubmanifoldPoint:
        ambient = make_standard_structure(self.m, self.c)
        try:
            return SubmanifoldPoint(ambient, self.tangent_frame, self.normal_frame, self.h, self.geometric_mode)
        except InvalidPointError as exc:
            raise DocumentError(str(exc).split(": ", 1)[-1], exc.path or "<root>") from exc

    def to_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "ambient": {"m": self.m, "c": self.c},
            "tangent_frame": np.asarray(self.tangent_frame, dtype=float).tolist(),
            "normal_frame": np.asarray(self.normal_frame, dtype=float).tolist(),
            "h": np.asarray(self.h, dtype=float).tolist(),
            "geometric_mode": self.geometric_mode,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, doc) -> "InstanceDocument":
        if not isinstance(doc, dict):
            raise DocumentError("expected an object", "<root>")
        for key in ("schema_version", "ambient", "tangent_frame", "normal_frame", "h"):
            if key not in doc:
                raise DocumentError("missing field", key)
        version = doc["schema_version"]
        if version != SCHEMA_VERSION or isinstance(version, bool):
            raise DocumentError(f"unsupported version {version!r} (expected {SCHEMA_VERSION})", "schema_version")
        amb = doc["ambient"]
        if not isinstance(amb, dict):
            raise DocumentError("expected an object", "ambient")
        m = amb.get("m")
        if isinstance(m, bool) or not isinstance(m, int) or m < 1:
            raise DocumentError("expected a positive integer", "ambient.m")
        if "c" not in amb:
            raise DocumentError("missing field", "ambient.c")
        c = _number(amb["c"], "ambient.c")
        geometric = doc.get("geometric_mode", True)
        if not isinstance(geometric, bool):
            raise DocumentError("expected a boolean", "geometric_mode")
        seed = doc.get("seed")
        if seed is not None and (isinstance(seed, bool) or not isinstance(seed, int)):
            raise DocumentError("expected an integer or null", "seed")
        tangent = _array(doc["tangent_frame"], "tangent_frame", 2)
        normal = _array(doc["normal_frame"], "normal_frame", 2) if doc["normal_frame"] else np.zeros((0, 2 * m + 1))
        h = _array(doc["h"], "h", 3) if doc["h"] else np.zeros((0,) + (tangent.shape[0],) * 2)
        return cls(m, c, tangent, normal, h, geometric, seed)

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=1) + "\n"

    @classmethod
    def loads(cls, text: str) -> "InstanceDocument":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise DocumentError(f"invalid JSON: {exc}", "<root>") from exc
        return cls.from_dict(doc)


def save_point(pt: SubmanifoldPoint, path, seed: int | None = None) -> None:
    Path(path).write_text(InstanceDocument.from_point(pt, seed).dumps())


def load_point(path) -> SubmanifoldPoint:
    return InstanceDocument.loads(Path(path).read_text()).to_point()


# -- sweep rows ----------------------------------------------------------------------------------


@dataclass(frozen=True)
class SweepRow:
    instance_id: int
    seed: int
    n: int
    m: int
    c: float
    tau: float
    inf_k: float
    delta: float
    h_norm2: float
    mean_norm2: float
    p_norm2: float
    lhs: float
    rhs: float
    slack: float
    verdict: str
    classification: str
    equality_residual_max: float


SWEEP_COLUMNS = tuple(f.name for f in fields(SweepRow))


def _cell(value) -> str:
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def write_sweep_csv(rows, stream) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(SWEEP_COLUMNS)
    for row in rows:
        writer.writerow([_cell(v) for v in astuple(row)])


def sweep_csv_text(rows) -> str:
    buf = io.StringIO()
    write_sweep_csv(rows, buf)
    return buf.getvalue()


def read_sweep_csv(stream) -> list[dict]:
    """Rows as dicts with numeric columns converted back to numbers."""
    reader = csv.DictReader(stream)
    if tuple(reader.fieldnames or ()) != SWEEP_COLUMNS:
        raise ValueError(f"unexpected columns {reader.fieldnames}")
    types = {f.name: f.type for f in fields(SweepRow)}
    out = []
    for rec in reader:
        out.append(
            {k: int(v) if types[k] == "int" else float(v) if types[k] == "float" else v for k, v in rec.items()}
        )
    return out
