"""Level curves of grid functions by marching squares."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple, Optional

import numpy as np

from .field import Box, ScalarField


@dataclass
class Contour:
    """Polylines of one level; closed ones repeat their first vertex at the end."""

    level: float
    polylines: list[np.ndarray] = field(default_factory=list)

    @staticmethod
    def is_closed(poly: np.ndarray) -> bool:
        return len(poly) > 2 and bool(np.all(poly[0] == poly[-1]))

    def closed(self) -> list[np.ndarray]:
        return [p for p in self.polylines if self.is_closed(p)]

    def __len__(self) -> int:
        return len(self.polylines)

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("polyline_id,x,y\n")
            for n, poly in enumerate(self.polylines):
                for x, y in poly:
                    fh.write(f"{n},{x:.17g},{y:.17g}\n")

    def to_svg(self, path, box: Box, stroke_width: float = 0.01) -> None:
        """One path per polyline; the view box is ``box`` with y pointing up."""
        w = box.x1 - box.x0
        hgt = box.y1 - box.y0
        lines = [
            '<?xml version="1.0" encoding="UTF-8"?>',
            f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="{box.x0:g} {-box.y1:g} {w:g} {hgt:g}">',
            f'<g transform="scale(1,-1)" fill="none" stroke="black" stroke-width="{stroke_width:g}">',
        ]
        for poly in self.polylines:
            pts = poly[:-1] if self.is_closed(poly) else poly
            d = "M " + " L ".join(f"{x:.6f} {y:.6f}" for x, y in pts)
            if self.is_closed(poly):
                d += " Z"
            lines.append(f'<path d="{d}"/>')
        lines += ["</g>", "</svg>", ""]
        Path(path).write_text("\n".join(lines))


# Corner order: 0 = (i, j), 1 = (i+1, j), 2 = (i+1, j+1), 3 = (i, j+1).
# Edge order: 0 bottom (0-1), 1 right (1-2), 2 top (3-2), 3 left (0-3).
_EDGE_CORNERS = ((0, 1), (1, 2), (3, 2), (0, 3))
_CORNER_OFFSETS = ((0, 0), (1, 0), (1, 1), (0, 1))
# Each corner touches two edges.
_CORNER_EDGES = ((0, 3), (0, 1), (1, 2), (2, 3))


def _edge_key(i: int, j: int, e: int) -> tuple[int, int, int]:
    # Horizontal edges are keyed by their left node, vertical ones by their lower node.
    if e == 0:
        return (0, i, j)
    if e == 2:
        return (0, i, j + 1)
    if e == 3:
        return (1, i, j)
    return (1, i + 1, j)


def _cell_segments(above: tuple[bool, bool, bool, bool], centre_above: bool) -> list[tuple[int, int]]:
    crossed = [e for e, (a, b) in enumerate(_EDGE_CORNERS) if above[a] != above[b]]
    if len(crossed) == 2:
        return [tuple(crossed)]
    if len(crossed) == 4:
        # Saddle: cut off the corners on the side the centre does not belong to.
        cut = [c for c in range(4) if above[c] != centre_above]
        return [_CORNER_EDGES[c] for c in cut]
    return []


def extract_contour(fld: ScalarField, level: float) -> Contour:
    """Trace ``{field = level}`` with linear interpolation along cell edges.

    Nodes with value ``>= level`` count as inside; saddle cells join the
    inside corners when the cell-centre average is ``>= level``.
    """
    v = fld.values
    level = float(level)
    contour = Contour(level=level)
    if not (v.min() <= level <= v.max()):
        return contour
    ny, nx = v.shape
    ox, oy = fld.origin
    h = fld.h
    above = v >= level
    a00 = above[:-1, :-1]
    mixed = (a00 != above[:-1, 1:]) | (a00 != above[1:, 1:]) | (a00 != above[1:, :-1])
    vertices: dict[tuple[int, int, int], tuple[float, float]] = {}
    neighbours: dict[tuple[int, int, int], list[tuple[int, int, int]]] = {}

    def vertex(i, j, e):
        key = _edge_key(i, j, e)
        if key not in vertices:
            ca, cb = _EDGE_CORNERS[e]
            (ia, ja), (ib, jb) = _CORNER_OFFSETS[ca], _CORNER_OFFSETS[cb]
            va, vb = v[j + ja, i + ia], v[j + jb, i + ib]
            t = (level - va) / (vb - va)
            xa, ya = ox + (i + ia) * h, oy + (j + ja) * h
            xb, yb = ox + (i + ib) * h, oy + (j + jb) * h
            vertices[key] = (xa + t * (xb - xa), ya + t * (yb - ya))
        return key

    for j, i in zip(*np.nonzero(mixed)):
        j, i = int(j), int(i)
        corners = tuple(bool(above[j + dj, i + di]) for di, dj in _CORNER_OFFSETS)
        centre = 0.25 * (v[j, i] + v[j, i + 1] + v[j + 1, i + 1] + v[j + 1, i]) >= level
        for e0, e1 in _cell_segments(corners, centre):
            k0, k1 = vertex(i, j, e0), vertex(i, j, e1)
            neighbours.setdefault(k0, []).append(k1)
            neighbours.setdefault(k1, []).append(k0)

    seen: set = set()

    def walk(start):
        chain = [start]
        seen.add(start)
        prev, cur = None, start
        while True:
            nxt = [n for n in neighbours[cur] if n != prev or neighbours[cur].count(n) > 1]
            nxt = [n for n in nxt if n not in seen or (n == start and len(chain) > 2)]
            if not nxt:
                return chain
            prev, cur = cur, nxt[0]
            chain.append(cur)
            if cur == start:
                return chain
            seen.add(cur)

    ends = [k for k, nb in neighbours.items() if len(nb) == 1]
    for k in ends:
        if k not in seen:
            contour.polylines.append(np.array([vertices[c] for c in walk(k)]))
    for k in neighbours:
        if k not in seen:
            contour.polylines.append(np.array([vertices[c] for c in walk(k)]))
    return contour


class ContourMetrics(NamedTuple):
    mean_radius: float
    min_radius: float
    max_radius: float
    enclosed_area: float

    @property
    def aspect(self) -> float:
        return self.max_radius / self.min_radius


def polygon_area_centroid(poly: np.ndarray) -> tuple[float, np.ndarray]:
    """Signed shoelace area and area centroid of a closed polyline."""
    x, y = poly[:-1, 0], poly[:-1, 1]
    xn, yn = poly[1:, 0], poly[1:, 1]
    cross = x * yn - xn * y
    area = 0.5 * cross.sum()
    cx = ((x + xn) * cross).sum() / (6.0 * area)
    cy = ((y + yn) * cross).sum() / (6.0 * area)
    return area, np.array([cx, cy])


def perimeter(poly: np.ndarray) -> float:
    return float(np.hypot(*np.diff(poly, axis=0).T).sum())


def contour_metrics(c: Contour, centre: Optional[tuple[float, float]] = None) -> ContourMetrics:
    """Radii and area of the longest closed polyline.

    Radii are measured to the vertices from the area centroid, or from
    ``centre`` when given.
    """
    closed = c.closed()
    if not closed:
        raise ValueError("contour has no closed polyline")
    poly = max(closed, key=perimeter)
    area, centroid = polygon_area_centroid(poly)
    if centre is not None:
        centroid = np.asarray(centre, dtype=float)
    r = np.hypot(*(poly[:-1] - centroid).T)
    return ContourMetrics(float(r.mean()), float(r.min()), float(r.max()), abs(float(area)))


def isoperimetric_ratio(poly: np.ndarray) -> float:
    """``4 pi A / P**2``; equals 1 only for a circle."""
    area, _ = polygon_area_centroid(poly)
    return float(4.0 * math.pi * abs(area) / perimeter(poly) ** 2)
