#!/usr/bin/env python
# -*- coding: utf-8 -*-
#
# Copyright 2025 NXP
#
# SPDX-License-Identifier: BSD-3-Clause

"""T-junction extensions, the extended T-mesh and the analysis-suitability test."""

import logging
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Dict, List, NamedTuple, Optional, Set, Tuple

import prettytable

from .errors import InsufficientTrace
from .tmesh import Orientation, Point, Symbol, TJunction, TMesh, anchors, t_junctions, trace_indices

logger = logging.getLogger(__name__)


class VertexClass(str, Enum):
    """Classification of vertices of the extended mesh."""

    ACTIVE = "active"
    CROSSING = "crossing"
    OVERLAP = "overlap"
    EXTENDED = "extended"


@dataclass(frozen=True)
class Extension:
    """Face and edge extension of one T-junction.

    Both parts lie on the line through the junction. The face part is the closed
    range ``[face_lo, face_hi]``, the edge part the half-open range which excludes
    the junction itself.
    """

    owner: TJunction
    face_lo: int
    face_hi: int
    edge_lo: int
    edge_hi: int

    @property
    def orientation(self) -> Orientation:
        """Direction of the line the extension runs on."""
        return self.owner.orientation

    @property
    def line(self) -> int:
        """Row of a horizontal extension or column of a vertical one."""
        i, j = self.owner.vertex
        return j if self.orientation is Orientation.HORIZONTAL else i

    @property
    def position(self) -> int:
        """Coordinate of the junction along the line."""
        i, j = self.owner.vertex
        return i if self.orientation is Orientation.HORIZONTAL else j

    @property
    def lo(self) -> int:
        """Low end of the closed hull of face and edge."""
        return min(self.face_lo, self.edge_lo)

    @property
    def hi(self) -> int:
        """High end of the closed hull of face and edge."""
        return max(self.face_hi, self.edge_hi)

    def face_contains(self, along: int) -> bool:
        """Is the coordinate inside the closed face extension."""
        return self.face_lo <= along <= self.face_hi

    def edge_contains(self, along: int) -> bool:
        """Is the coordinate inside the half-open edge extension."""
        return self.edge_lo <= along <= self.edge_hi and along != self.position

    def point(self, along: int) -> Point:
        """Lattice point on the extension line."""
        if self.orientation is Orientation.HORIZONTAL:
            return (along, self.line)
        return (self.line, along)

    def units(self) -> List[Point]:
        """Unit edges covered by face and edge."""
        return [self.point(k) for k in range(self.lo, self.hi)]

    def __str__(self) -> str:
        axis = "row" if self.orientation is Orientation.HORIZONTAL else "column"
        return (
            f"{self.owner.symbol.value}{self.owner.vertex} {axis} {self.line}: "
            f"face [{self.face_lo},{self.face_hi}] edge [{self.edge_lo},{self.edge_hi}]"
        )


class ASVerdict(NamedTuple):
    """Outcome of the analysis-suitability test."""

    suitable: bool
    witness: Optional[Tuple[TJunction, TJunction, Point]] = None


def _extension_for(mesh: TMesh, junction: TJunction) -> Extension:
    direction = junction.orientation
    trace = trace_indices(mesh, junction.vertex, direction)
    i, j = junction.vertex
    own = i if direction is Orientation.HORIZONTAL else j
    position = trace.index(own)
    # face on the side of the missing edge, edge along the stem
    missing_low = junction.symbol in (Symbol.VDASH, Symbol.BOT)
    try:
        if missing_low:
            if position < 2:
                raise IndexError(position)
            face_lo, face_hi = trace[position - 2], own
            edge_lo, edge_hi = own, trace[position + 1]
        else:
            if position < 1:
                raise IndexError(position)
            face_lo, face_hi = own, trace[position + 2]
            edge_lo, edge_hi = trace[position - 1], own
    except IndexError as exc:
        raise InsufficientTrace(
            f"Trace through T-junction {junction.vertex} is too short ({exc})"
        ) from exc
    return Extension(junction, face_lo, face_hi, edge_lo, edge_hi)


def tjunction_extensions(mesh: TMesh) -> List[Extension]:
    """Extensions of all T-junctions, ordered as the T-junctions.

    :param mesh: Admissible mesh.
    :return: One extension per T-junction.
    :raises InsufficientTrace: A trace does not offer the needed indices.
    """
    return [_extension_for(mesh, junction) for junction in t_junctions(mesh)]


def _overlap_region(extension: Extension, include_edge: bool) -> Tuple[int, int]:
    if include_edge:
        return extension.lo, extension.hi
    return extension.face_lo, extension.face_hi


@dataclass
class ExtendedTMesh:
    """Mesh with all T-junction extensions added and its vertices classified."""

    base: TMesh
    extensions: List[Extension]
    ext_mesh: TMesh
    classification: Dict[Point, VertexClass] = field(default_factory=dict)

    def count(self, vertex_class: VertexClass) -> int:
        """Number of vertices in one class."""
        return sum(1 for value in self.classification.values() if value is vertex_class)

    @property
    def n_active(self) -> int:
        """Number of active vertices (anchors of the base mesh)."""
        return self.count(VertexClass.ACTIVE)

    @property
    def n_crossing(self) -> int:
        """Number of crossing vertices."""
        return self.count(VertexClass.CROSSING)

    @property
    def n_overlap(self) -> int:
        """Number of overlap vertices."""
        return self.count(VertexClass.OVERLAP)

    @property
    def n_extended(self) -> int:
        """Number of extended vertices, inactive base vertices included."""
        return self.count(VertexClass.EXTENDED)

    @property
    def n_ext(self) -> int:
        """Number of vertices of the extended mesh."""
        return len(self.ext_mesh.vertices)

    @cached_property
    def tjunction_vertices(self) -> Set[Point]:
        """Vertices of the base mesh which are T-junctions."""
        return {extension.owner.vertex for extension in self.extensions}

    def vertices_of(self, vertex_class: VertexClass) -> List[Point]:
        """Sorted vertices of one class."""
        return sorted(
            (v for v, c in self.classification.items() if c is vertex_class),
            key=lambda p: (p[1], p[0]),
        )

    def summary(self) -> Dict[str, int]:
        """Vertex counts per class."""
        return {
            "n_a": self.n_active,
            "n_plus": self.n_crossing,
            "n_minus": self.n_overlap,
            "n_star": self.n_extended,
            "n_ext": self.n_ext,
        }

    def classification_table(self) -> prettytable.PrettyTable:
        """Table of classified vertices (the inactive base vertices are omitted)."""
        table = prettytable.PrettyTable(["Vertex", "Class", "T-junction"])
        table.align = "l"
        table.hrules = prettytable.HEADER
        table.vrules = prettytable.NONE
        base_vertices = self.base.vertices
        for vertex in sorted(self.classification, key=lambda p: (p[1], p[0])):
            vertex_class = self.classification[vertex]
            if vertex_class is VertexClass.EXTENDED and vertex in base_vertices:
                continue
            table.add_row(
                [
                    str(vertex),
                    vertex_class.value,
                    "yes" if vertex in self.tjunction_vertices else "",
                ]
            )
        return table


def extend(mesh: TMesh, include_edge_overlap: bool = False) -> ExtendedTMesh:
    """Create the extended mesh and classify its vertices.

    Classes are assigned by precedence active, crossing, overlap, extended.

    :param mesh: Admissible mesh.
    :param include_edge_overlap: Let edge extensions take part in overlap detection.
    :return: Extended mesh with classification.
    """
    extensions = tjunction_extensions(mesh)
    h_units = set(mesh.h_units)
    v_units = set(mesh.v_units)
    for extension in extensions:
        target = h_units if extension.orientation is Orientation.HORIZONTAL else v_units
        target.update(extension.units())
    ext_mesh = TMesh(mesh.domain, h_units, v_units) if extensions else mesh

    horizontal = [e for e in extensions if e.orientation is Orientation.HORIZONTAL]
    vertical = [e for e in extensions if e.orientation is Orientation.VERTICAL]

    crossing: Set[Point] = set()
    for h_ext in horizontal:
        for v_ext in vertical:
            if h_ext.face_contains(v_ext.line) and v_ext.face_contains(h_ext.line):
                crossing.add((v_ext.line, h_ext.line))

    overlap: Set[Point] = set()
    for group in (horizontal, vertical):
        for number, first in enumerate(group):
            for second in group[number + 1 :]:
                if first.line != second.line:
                    continue
                lo_a, hi_a = _overlap_region(first, include_edge_overlap)
                lo_b, hi_b = _overlap_region(second, include_edge_overlap)
                for along in range(max(lo_a, lo_b), min(hi_a, hi_b) + 1):
                    point = first.point(along)
                    if first.orientation is Orientation.HORIZONTAL:
                        on_perpendicular = mesh.on_v_skeleton(point)
                    else:
                        on_perpendicular = mesh.on_h_skeleton(point)
                    if on_perpendicular:
                        overlap.add(point)

    active = set(anchors(mesh))
    classification: Dict[Point, VertexClass] = {}
    for vertex in ext_mesh.vertices:
        if vertex in active:
            classification[vertex] = VertexClass.ACTIVE
        elif vertex in crossing:
            classification[vertex] = VertexClass.CROSSING
        elif vertex in overlap:
            classification[vertex] = VertexClass.OVERLAP
        else:
            classification[vertex] = VertexClass.EXTENDED
    extended = ExtendedTMesh(mesh, extensions, ext_mesh, classification)
    logger.debug(f"Extended mesh counts: {extended.summary()}")
    return extended


def _intersection(h_ext: Extension, v_ext: Extension) -> Optional[Point]:
    if h_ext.lo <= v_ext.line <= h_ext.hi and v_ext.lo <= h_ext.line <= v_ext.hi:
        return (v_ext.line, h_ext.line)
    return None


def is_analysis_suitable(mesh: TMesh) -> ASVerdict:
    """Check that no horizontal T-junction extension meets a vertical one.

    :param mesh: Admissible mesh.
    :return: Verdict, with one witnessing pair and their intersection point on failure.
    """
    extensions = tjunction_extensions(mesh)
    horizontal = [e for e in extensions if e.orientation is Orientation.HORIZONTAL]
    vertical = [e for e in extensions if e.orientation is Orientation.VERTICAL]
    for h_ext in horizontal:
        for v_ext in vertical:
            point = _intersection(h_ext, v_ext)
            if point is not None:
                logger.debug(
                    f"Extensions of {h_ext.owner.vertex} and {v_ext.owner.vertex} meet at {point}"
                )
                return ASVerdict(False, (h_ext.owner, v_ext.owner, point))
    return ASVerdict(True)


def _walk(
    mesh: TMesh, start: Point, orientation: Orientation, step: int, stops: int
) -> List[Point]:
    """Lattice points from ``start`` until the ``stops``-th perpendicular skeleton point."""
    di, dj = (step, 0) if orientation is Orientation.HORIZONTAL else (0, step)
    path: List[Point] = []
    point = start
    while stops:
        point = (point[0] + di, point[1] + dj)
        if not mesh.domain.contains(point):
            raise InsufficientTrace(f"Walk from {start} leaves the domain at {point}")
        path.append(point)
        left, right, down, up = mesh.arms(point)
        across = (down or up) if orientation is Orientation.HORIZONTAL else (left or right)
        if across or mesh.domain.is_corner(point):
            stops -= 1
    return path


def as_oracle(mesh: TMesh) -> bool:
    """Brute-force analysis-suitability check working on the unit edges only.

    Every interior valence three point of the active region walks its line over the
    lattice, two perpendicular crossings beyond the missing edge and one along the
    opposite edge. The mesh fails when a horizontal and a vertical walk share a point.
    """
    domain = mesh.domain
    swept: Dict[Orientation, Set[Point]] = {o: set() for o in Orientation}
    for point in domain.lattice():
        if not domain.in_active_region(point) or domain.on_boundary(point):
            continue
        left, right, down, up = mesh.arms(point)
        if left + right + down + up != 3:
            continue
        if left and right:
            orientation, missing = Orientation.VERTICAL, (1 if down else -1)
        else:
            orientation, missing = Orientation.HORIZONTAL, (1 if left else -1)
        swept[orientation].add(point)
        swept[orientation].update(_walk(mesh, point, orientation, missing, 2))
        swept[orientation].update(_walk(mesh, point, orientation, -missing, 1))
    return not swept[Orientation.HORIZONTAL] & swept[Orientation.VERTICAL]
