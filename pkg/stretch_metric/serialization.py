# stretch_metric/serialization.py
"""
Input & Output
==============
JSON input models for the three spaces, and CSV / SVG writers that
never leave a partial file behind (write to a temporary file in the
target directory, then rename).
"""

import csv
import io
import json
import logging
import os
import sys
import tempfile
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence

import numpy as np
from pydantic import BaseModel, Field, model_validator

from .errors import InvalidArgumentError
from .polygon import PolygonShape
from .quadrant import QuadrantPoint, UnitBallTriangle
from .surface import SurfacePoint, Triangulation
from .triangle import EdgeLengths, TriCoords, edges_to_coords

logger = logging.getLogger("stretch-metric.serialization")


# ═══════════════════════════════════════════════════════════════════════════
# INPUT MODELS
# ═══════════════════════════════════════════════════════════════════════════

class TriangleInput(BaseModel):
    """A triangle given by Heron coordinates or by edge lengths."""
    coords: Optional[List[float]] = Field(default=None, min_length=3, max_length=3)
    edges: Optional[List[float]] = Field(default=None, min_length=3, max_length=3)
    vector: Optional[List[float]] = Field(default=None, min_length=3, max_length=3)

    @model_validator(mode="after")
    def _one_source(self):
        if (self.coords is None) == (self.edges is None):
            raise ValueError("give exactly one of 'coords' or 'edges'")
        return self

    def to_coords(self) -> TriCoords:
        if self.coords is not None:
            return TriCoords.from_array(self.coords)
        return edges_to_coords(EdgeLengths(*self.edges))


class QuadrantInput(BaseModel):
    point: List[float] = Field(min_length=2, max_length=2)
    vector: Optional[List[float]] = Field(default=None, min_length=2, max_length=2)

    def to_point(self) -> QuadrantPoint:
        return QuadrantPoint(*self.point)


class SurfaceInput(BaseModel):
    """Triangulation plus slot values keyed f0, f1, ... (value at position 0 is opposite the first edge)."""
    edges: int = Field(ge=3)
    faces: List[List[int]]
    boundary: List[bool]
    coords: Dict[str, List[float]]
    vector: Optional[Dict[str, List[float]]] = None

    def to_triangulation(self) -> Triangulation:
        return Triangulation.build(self.edges, self.faces, self.boundary)

    def _slot_array(self, table: Dict[str, List[float]], what: str) -> np.ndarray:
        rows = []
        for f in range(len(self.faces)):
            key = f"f{f}"
            if key not in table or len(table[key]) != 3:
                raise InvalidArgumentError(f"{what} needs three values under '{key}'")
            rows.append(table[key])
        return np.array(rows, dtype=float)

    def to_point(self) -> SurfacePoint:
        return SurfacePoint(self.to_triangulation(), self._slot_array(self.coords, "coords"))

    def vector_array(self) -> Optional[np.ndarray]:
        return None if self.vector is None else self._slot_array(self.vector, "vector")


class PolygonInput(BaseModel):
    n: int = Field(ge=3)
    vertices: List[List[float]]
    vector: Optional[List[List[float]]] = None

    @model_validator(mode="after")
    def _count(self):
        if len(self.vertices) != self.n or any(len(v) != 2 for v in self.vertices):
            raise ValueError(f"expected {self.n} vertices of two coordinates each")
        if self.vector is not None and (len(self.vector) != self.n or any(len(v) != 2 for v in self.vector)):
            raise ValueError(f"vector needs {self.n} rows of two components")
        return self

    def to_shape(self) -> PolygonShape:
        shape, _ = PolygonShape.from_vertices(self.vertices)
        return shape


def load_json(source: str) -> Any:
    """Parse JSON from a file path, or from stdin when source is '-'."""
    if source == "-":
        return json.load(sys.stdin)
    path = Path(source)
    if not path.exists():
        raise InvalidArgumentError(f"Input file not found: {path}")
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)


# ═══════════════════════════════════════════════════════════════════════════
# OUTPUT
# ═══════════════════════════════════════════════════════════════════════════

def format_value(value: Any) -> str:
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.17g}"
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if value is None:
        return ""
    return str(value)


def write_text_atomic(target: Optional[str], text: str) -> None:
    """Write text to target (stdout for None or '-') via a temporary file and rename."""
    if target in (None, "-"):
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    path = Path(target)
    directory = path.parent if str(path.parent) else Path(".")
    directory.mkdir(parents=True, exist_ok=True)
    handle = tempfile.NamedTemporaryFile("w", dir=directory, prefix=f".{path.name}.", suffix=".tmp",
                                         delete=False, encoding="utf-8", newline="")
    try:
        with handle:
            handle.write(text)
        os.replace(handle.name, path)
    except BaseException:
        Path(handle.name).unlink(missing_ok=True)
        raise
    logger.debug(f"Wrote {len(text)} characters to {path}")


def csv_text(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_value(v) for v in row])
    return buffer.getvalue()


def records_csv(records: List[Dict[str, Any]]) -> str:
    """CSV of dict records; the header is the union of keys in first-seen order."""
    header: List[str] = []
    for record in records:
        for key in record:
            if key not in header:
                header.append(key)
    return csv_text(header, ([record.get(key) for key in header] for record in records))


def _svg(points: Sequence[Sequence[float]], extra: str = "") -> str:
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    pad = 0.1 * max(max(xs) - min(xs), max(ys) - min(ys), 1e-9)
    x0, y0 = min(xs) - pad, min(ys) - pad
    width, height = max(xs) - min(xs) + 2 * pad, max(ys) - min(ys) + 2 * pad
    # y flipped so the figure reads with the usual axis orientation
    coords = " ".join(f"{format_value(float(x))},{format_value(float(-y))}" for x, y in points)
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" '
        f'viewBox="{format_value(x0)} {format_value(-(y0 + height))} {format_value(width)} {format_value(height)}">\n'
        f'  <polygon points="{coords}" fill="none" stroke="black" vector-effect="non-scaling-stroke"/>\n'
        f"{extra}</svg>\n"
    )


def unit_ball_svg(ball: UnitBallTriangle) -> str:
    origin = '  <circle cx="0" cy="0" r="0.01" fill="black"/>\n'
    return _svg(list(ball.vertices()), origin)


def polygon_svg(shape: PolygonShape) -> str:
    return _svg(shape.vertices.tolist())
