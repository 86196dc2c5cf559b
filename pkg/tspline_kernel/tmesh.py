#!/usr/bin/env python
# -*- coding: utf-8 -*-
#
# Copyright 2025 NXP
#
# SPDX-License-Identifier: BSD-3-Clause

"""Index-space T-mesh: construction, admissibility, traces, segments and symbols.

The skeleton is kept as two sets of unit edges. A horizontal unit ``(i, j)`` is
the closed segment ``[i, i + 1] x {j}``, a vertical unit ``(i, j)`` is
``{i} x [j, j + 1]``. Everything else (vertices, maximal edges, segments, faces)
is derived from those sets on demand and cached.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, NamedTuple, Optional, Sequence, Set, Tuple

from typing_extensions import Self

from .errors import DanglingEdge, InvalidDomain, SpanOutOfDomain, VertexNotOnSkeleton

logger = logging.getLogger(__name__)

Point = Tuple[int, int]
LineSpan = Tuple[int, int, int]

MIN_DOMAIN_SIDE = 7
FRAME_WIDTH = 2


class Orientation(str, Enum):
    """Direction of a line, edge, segment or trace."""

    HORIZONTAL = "horizontal"
    VERTICAL = "vertical"

    @property
    def other(self) -> "Orientation":
        """The perpendicular direction."""
        if self is Orientation.HORIZONTAL:
            return Orientation.VERTICAL
        return Orientation.HORIZONTAL


class Symbol(str, Enum):
    """Symbols of the symbolic T-mesh."""

    PLUS = "+"
    VDASH = "⊢"
    DASHV = "⊣"
    BOT = "⊥"
    TOP = "⊤"
    VERTICAL_EDGE = "|"
    HORIZONTAL_EDGE = "-"
    EMPTY = "·"

    @property
    def is_tjunction(self) -> bool:
        """True for the four oriented valence three symbols."""
        return self in (Symbol.VDASH, Symbol.DASHV, Symbol.BOT, Symbol.TOP)

    @property
    def orientation(self) -> Optional[Orientation]:
        """Orientation of a T-junction symbol (the direction its extensions run)."""
        if self in (Symbol.VDASH, Symbol.DASHV):
            return Orientation.HORIZONTAL
        if self in (Symbol.BOT, Symbol.TOP):
            return Orientation.VERTICAL
        return None


# arms of a symbol: (left, right, down, up)
_ARMS: Dict[Symbol, Tuple[bool, bool, bool, bool]] = {
    Symbol.PLUS: (True, True, True, True),
    Symbol.VDASH: (False, True, True, True),
    Symbol.DASHV: (True, False, True, True),
    Symbol.BOT: (True, True, False, True),
    Symbol.TOP: (True, True, True, False),
    Symbol.VERTICAL_EDGE: (False, False, True, True),
    Symbol.HORIZONTAL_EDGE: (True, True, False, False),
    Symbol.EMPTY: (False, False, False, False),
}


@dataclass(frozen=True)
class IndexDomain:
    """Rectangular index domain ``[m_lo, m_hi] x [n_lo, n_hi]``."""

    m_lo: int
    m_hi: int
    n_lo: int
    n_hi: int

    def __post_init__(self) -> None:
        if self.m_hi - self.m_lo < MIN_DOMAIN_SIDE or self.n_hi - self.n_lo < MIN_DOMAIN_SIDE:
            raise InvalidDomain(
                f"Index domain [{self.m_lo},{self.m_hi}]x[{self.n_lo},{self.n_hi}] is too small, "
                f"both sides must span at least {MIN_DOMAIN_SIDE} indices"
            )

    @classmethod
    def parse(cls, values: Sequence[int]) -> Self:
        """Create domain from ``[m_lo, m_hi, n_lo, n_hi]``."""
        if len(values) != 4:
            raise InvalidDomain(f"Index domain needs four integers, got {len(values)}")
        return cls(*(int(v) for v in values))

    @property
    def active_region(self) -> Tuple[int, int, int, int]:
        """Closed active region as ``(i_lo, i_hi, j_lo, j_hi)``."""
        return (
            self.m_lo + FRAME_WIDTH,
            self.m_hi - FRAME_WIDTH,
            self.n_lo + FRAME_WIDTH,
            self.n_hi - FRAME_WIDTH,
        )

    def contains(self, point: Point) -> bool:
        """Is the lattice point inside the closed domain."""
        i, j = point
        return self.m_lo <= i <= self.m_hi and self.n_lo <= j <= self.n_hi

    def in_active_region(self, point: Point) -> bool:
        """Is the lattice point inside the closed active region."""
        i_lo, i_hi, j_lo, j_hi = self.active_region
        return i_lo <= point[0] <= i_hi and j_lo <= point[1] <= j_hi

    def in_frame_region(self, point: Point) -> bool:
        """Is the lattice point inside the closed frame region."""
        i, j = point
        return self.contains(point) and (
            i <= self.m_lo + FRAME_WIDTH
            or i >= self.m_hi - FRAME_WIDTH
            or j <= self.n_lo + FRAME_WIDTH
            or j >= self.n_hi - FRAME_WIDTH
        )

    def on_boundary(self, point: Point) -> bool:
        """Is the lattice point on the domain boundary."""
        i, j = point
        return i in (self.m_lo, self.m_hi) or j in (self.n_lo, self.n_hi)

    def is_corner(self, point: Point) -> bool:
        """Is the lattice point one of the four domain corners."""
        return point[0] in (self.m_lo, self.m_hi) and point[1] in (self.n_lo, self.n_hi)

    def line_range(self, orientation: Orientation) -> range:
        """Indices of all lines with the given orientation."""
        if orientation is Orientation.HORIZONTAL:
            return range(self.n_lo, self.n_hi + 1)
        return range(self.m_lo, self.m_hi + 1)

    def span_range(self, orientation: Orientation) -> Tuple[int, int]:
        """Full span of a line with the given orientation."""
        if orientation is Orientation.HORIZONTAL:
            return self.m_lo, self.m_hi
        return self.n_lo, self.n_hi

    def lattice(self) -> Iterable[Point]:
        """All lattice points, row by row from the bottom."""
        for j in range(self.n_lo, self.n_hi + 1):
            for i in range(self.m_lo, self.m_hi + 1):
                yield (i, j)

    def __str__(self) -> str:
        return f"[{self.m_lo},{self.m_hi}]x[{self.n_lo},{self.n_hi}]"


class IndexRect(NamedTuple):
    """Closed index rectangle, used for faces (whose interiors are the open rectangles)."""

    i_lo: int
    i_hi: int
    j_lo: int
    j_hi: int

    def boundary_contains(self, point: Point) -> bool:
        """Is the point on the boundary of the rectangle."""
        i, j = point
        on_vertical_side = i in (self.i_lo, self.i_hi) and self.j_lo <= j <= self.j_hi
        on_horizontal_side = j in (self.j_lo, self.j_hi) and self.i_lo <= i <= self.i_hi
        return on_vertical_side or on_horizontal_side


class Edge(NamedTuple):
    """Maximal open edge between two consecutive vertices of a line."""

    orientation: Orientation
    line: int
    lo: int
    hi: int


@dataclass(frozen=True)
class Segment:
    """Maximal closed run of contiguous edges and vertices on one line."""

    orientation: Orientation
    line: int
    lo: int
    hi: int
    vertices: Tuple[Point, ...] = field(compare=False)

    def contains(self, point: Point) -> bool:
        """Is the lattice point on the segment."""
        along, across = _along_across(self.orientation, point)
        return across == self.line and self.lo <= along <= self.hi

    @property
    def sort_key(self) -> Tuple[int, int, int]:
        """Bottom-most then left-most key (horizontal before vertical on ties)."""
        if self.orientation is Orientation.HORIZONTAL:
            return (self.line, self.lo, 0)
        return (self.lo, self.line, 1)

    def __str__(self) -> str:
        if self.orientation is Orientation.HORIZONTAL:
            return f"[{self.lo},{self.hi}]x{{{self.line}}}"
        return f"{{{self.line}}}x[{self.lo},{self.hi}]"


class TJunction(NamedTuple):
    """Interior valence three anchor with its symbol."""

    vertex: Point
    symbol: Symbol

    @property
    def orientation(self) -> Orientation:
        """Horizontal for ⊢/⊣, vertical for ⊥/⊤."""
        orientation = self.symbol.orientation
        assert orientation is not None
        return orientation

    def __str__(self) -> str:
        return f"{self.symbol.value}({self.vertex[0]},{self.vertex[1]})"


class LineRef(NamedTuple):
    """Reference to a full line of the index domain."""

    orientation: Orientation
    index: int

    def __str__(self) -> str:
        axis = "j" if self.orientation is Orientation.HORIZONTAL else "i"
        return f"{self.orientation.value} line {axis}={self.index}"


@dataclass
class ConditionResult:
    """Outcome of one admissibility condition."""

    name: str
    passed: bool = True
    witnesses: List = field(default_factory=list)


@dataclass
class AdmissibilityReport:
    """Result of the three admissibility conditions."""

    frame_lines: ConditionResult
    active_lines: ConditionResult
    element_boundaries: ConditionResult

    @property
    def admissible(self) -> bool:
        """True when all conditions hold."""
        return all(condition.passed for condition in self.conditions)

    @property
    def conditions(self) -> List[ConditionResult]:
        """All conditions in order."""
        return [self.frame_lines, self.active_lines, self.element_boundaries]


def _along_across(orientation: Orientation, point: Point) -> Tuple[int, int]:
    """Split a point into (coordinate along the line, line index)."""
    if orientation is Orientation.HORIZONTAL:
        return point[0], point[1]
    return point[1], point[0]


def _point(orientation: Orientation, along: int, line: int) -> Point:
    if orientation is Orientation.HORIZONTAL:
        return (along, line)
    return (line, along)


class TMesh:
    """Immutable index-space T-mesh."""

    def __init__(
        self, domain: IndexDomain, h_units: Iterable[Point], v_units: Iterable[Point]
    ) -> None:
        """Initialize the mesh from unit edges, adding the domain boundary.

        :param domain: Index domain of the mesh.
        :param h_units: Horizontal unit edges ``[i, i+1] x {j}`` given by ``(i, j)``.
        :param v_units: Vertical unit edges ``{i} x [j, j+1]`` given by ``(i, j)``.
        :raises SpanOutOfDomain: Unit edge outside of the domain.
        :raises DanglingEdge: Skeleton is not a rectangular partition.
        """
        self.domain = domain
        h_set: Set[Point] = set(h_units)
        v_set: Set[Point] = set(v_units)
        for i in range(domain.m_lo, domain.m_hi):
            h_set.update({(i, domain.n_lo), (i, domain.n_hi)})
        for j in range(domain.n_lo, domain.n_hi):
            v_set.update({(domain.m_lo, j), (domain.m_hi, j)})
        for i, j in h_set:
            if not (domain.m_lo <= i < domain.m_hi and domain.n_lo <= j <= domain.n_hi):
                raise SpanOutOfDomain(f"Horizontal edge at ({i},{j}) is outside {domain}")
        for i, j in v_set:
            if not (domain.m_lo <= i <= domain.m_hi and domain.n_lo <= j < domain.n_hi):
                raise SpanOutOfDomain(f"Vertical edge at ({i},{j}) is outside {domain}")
        self.h_units: FrozenSet[Point] = frozenset(h_set)
        self.v_units: FrozenSet[Point] = frozenset(v_set)
        self._validate_partition()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TMesh):
            return NotImplemented
        return (
            self.domain == other.domain
            and self.h_units == other.h_units
            and self.v_units == other.v_units
        )

    def __hash__(self) -> int:
        return hash((self.domain, self.h_units, self.v_units))

    def __repr__(self) -> str:
        return (
            f"<TMesh domain={self.domain} vertices={len(self.vertices)} "
            f"segments={len(self.segments)}>"
        )

    # ------------------------------------------------------------------ topology
    def arms(self, point: Point) -> Tuple[bool, bool, bool, bool]:
        """Incident unit edges of a lattice point as (left, right, down, up)."""
        i, j = point
        return (
            (i - 1, j) in self.h_units,
            (i, j) in self.h_units,
            (i, j - 1) in self.v_units,
            (i, j) in self.v_units,
        )

    def valence(self, point: Point) -> int:
        """Number of unit edges meeting at the lattice point."""
        return sum(self.arms(point))

    def _validate_partition(self) -> None:
        for point in self.domain.lattice():
            left, right, down, up = self.arms(point)
            count = left + right + down + up
            if count == 1:
                raise DanglingEdge(f"Edge ends at {point} without meeting another edge")
            if count == 2 and not (left and right) and not (down and up):
                if not self.domain.is_corner(point):
                    raise DanglingEdge(f"Edges bend at {point}, which no rectangle admits")

    @cached_property
    def vertices(self) -> FrozenSet[Point]:
        """All vertices: valence three or four points plus the domain corners."""
        return frozenset(
            point
            for point in self.domain.lattice()
            if self.valence(point) >= 3 or self.domain.is_corner(point)
        )

    def is_vertex(self, point: Point) -> bool:
        """Is the lattice point a vertex."""
        return point in self.vertices

    def on_skeleton(self, point: Point) -> bool:
        """Is the lattice point on the skeleton."""
        return self.domain.contains(point) and self.valence(point) > 0

    def on_h_skeleton(self, point: Point) -> bool:
        """Is the lattice point on the horizontal skeleton (horizontal edges and vertices)."""
        left, right, _, _ = self.arms(point)
        return left or right or point in self.vertices

    def on_v_skeleton(self, point: Point) -> bool:
        """Is the lattice point on the vertical skeleton (vertical edges and vertices)."""
        _, _, down, up = self.arms(point)
        return down or up or point in self.vertices

    def has_unit(self, orientation: Orientation, point: Point) -> bool:
        """Is the unit edge starting at ``point`` along ``orientation`` in the skeleton."""
        units = self.h_units if orientation is Orientation.HORIZONTAL else self.v_units
        return point in units

    def covers(self, orientation: Orientation, line: int, lo: int, hi: int) -> bool:
        """Does the skeleton contain the closed segment ``[lo, hi]`` of the line."""
        return all(
            self.has_unit(orientation, _point(orientation, k, line)) for k in range(lo, hi)
        )

    @cached_property
    def segments(self) -> List[Segment]:
        """All segments, horizontal ones first, each direction ordered by line then start."""
        result: List[Segment] = []
        for orientation in Orientation:
            for line in self.domain.line_range(orientation):
                result.extend(self._line_segments(orientation, line))
        return result

    def _line_segments(self, orientation: Orientation, line: int) -> List[Segment]:
        lo_limit, hi_limit = self.domain.span_range(orientation)
        segments: List[Segment] = []
        start: Optional[int] = None
        for k in range(lo_limit, hi_limit + 1):
            present = k < hi_limit and self.has_unit(orientation, _point(orientation, k, line))
            if present and start is None:
                start = k
            if not present and start is not None:
                vertices = tuple(
                    _point(orientation, a, line)
                    for a in range(start, k + 1)
                    if _point(orientation, a, line) in self.vertices
                )
                segments.append(Segment(orientation, line, start, k, vertices))
                start = None
        return segments

    def segments_on(self, orientation: Orientation, line: int) -> List[Segment]:
        """Ordered segments of one line."""
        return [s for s in self.segments if s.orientation is orientation and s.line == line]

    @cached_property
    def _segment_index(self) -> Dict[Tuple[Orientation, Point], int]:
        index: Dict[Tuple[Orientation, Point], int] = {}
        for number, segment in enumerate(self.segments):
            for vertex in segment.vertices:
                index[(segment.orientation, vertex)] = number
        return index

    def segment_of(self, vertex: Point, orientation: Orientation) -> Segment:
        """The unique segment of the given orientation through a vertex."""
        try:
            return self.segments[self._segment_index[(orientation, vertex)]]
        except KeyError as exc:
            raise VertexNotOnSkeleton(f"{vertex} is not a vertex of the mesh") from exc

    def segment_ordinal(self, vertex: Point, orientation: Orientation) -> int:
        """Zero-based ordinal of the vertex's segment among the segments of its line."""
        segment = self.segment_of(vertex, orientation)
        return self.segments_on(orientation, segment.line).index(segment)

    @cached_property
    def edges(self) -> List[Edge]:
        """Maximal open edges between consecutive vertices."""
        result: List[Edge] = []
        for segment in self.segments:
            coords = [_along_across(segment.orientation, v)[0] for v in segment.vertices]
            for lo, hi in zip(coords, coords[1:]):
                result.append(Edge(segment.orientation, segment.line, lo, hi))
        return result

    @property
    def h_edges(self) -> List[Edge]:
        """Maximal horizontal edges."""
        return [e for e in self.edges if e.orientation is Orientation.HORIZONTAL]

    @property
    def v_edges(self) -> List[Edge]:
        """Maximal vertical edges."""
        return [e for e in self.edges if e.orientation is Orientation.VERTICAL]

    @cached_property
    def faces(self) -> List[IndexRect]:
        """Rectangles of the partition (closed index boxes of the open faces)."""
        domain = self.domain
        parent: Dict[Point, Point] = {}

        def find(cell: Point) -> Point:
            while parent[cell] != cell:
                parent[cell] = parent[parent[cell]]
                cell = parent[cell]
            return cell

        cells = [
            (i, j) for j in range(domain.n_lo, domain.n_hi) for i in range(domain.m_lo, domain.m_hi)
        ]
        for cell in cells:
            parent[cell] = cell
        for i, j in cells:
            if i + 1 < domain.m_hi and (i + 1, j) not in self.v_units:
                parent[find((i + 1, j))] = find((i, j))
            if j + 1 < domain.n_hi and (i, j + 1) not in self.h_units:
                parent[find((i, j + 1))] = find((i, j))
        groups: Dict[Point, List[Point]] = {}
        for cell in cells:
            groups.setdefault(find(cell), []).append(cell)
        faces = []
        for members in groups.values():
            i_lo = min(c[0] for c in members)
            i_hi = max(c[0] for c in members) + 1
            j_lo = min(c[1] for c in members)
            j_hi = max(c[1] for c in members) + 1
            if (i_hi - i_lo) * (j_hi - j_lo) != len(members):
                raise DanglingEdge(f"Face around cell {members[0]} is not a rectangle")
            faces.append(IndexRect(i_lo, i_hi, j_lo, j_hi))
        return sorted(faces, key=lambda r: (r.j_lo, r.i_lo))

    def crossings(self, orientation: Orientation, line: int) -> List[int]:
        """Indices where the perpendicular skeleton meets the given line, ascending."""
        lo_limit, hi_limit = self.domain.span_range(orientation)
        if orientation is Orientation.HORIZONTAL:
            return [k for k in range(lo_limit, hi_limit + 1) if self.on_v_skeleton((k, line))]
        return [k for k in range(lo_limit, hi_limit + 1) if self.on_h_skeleton((line, k))]

    def is_submesh_of(self, other: "TMesh") -> bool:
        """Can ``other`` be created from this mesh by adding vertices and edges."""
        return (
            self.domain == other.domain
            and self.h_units <= other.h_units
            and self.v_units <= other.v_units
        )

    def lines(self) -> Tuple[List[LineSpan], List[LineSpan]]:
        """Maximal segments as ``(line, lo, hi)`` triples, horizontal then vertical."""
        h_lines: List[LineSpan] = []
        v_lines: List[LineSpan] = []
        for s in self.segments:
            lines = h_lines if s.orientation is Orientation.HORIZONTAL else v_lines
            lines.append((s.line, s.lo, s.hi))
        return h_lines, v_lines

    def with_lines(
        self, h_lines: Sequence[LineSpan] = (), v_lines: Sequence[LineSpan] = ()
    ) -> "TMesh":
        """New mesh with additional line spans."""
        h_units, v_units = _units_from_lines(self.domain, h_lines, v_lines)
        return TMesh(self.domain, self.h_units | h_units, self.v_units | v_units)


def _units_from_lines(
    domain: IndexDomain, h_lines: Sequence[LineSpan], v_lines: Sequence[LineSpan]
) -> Tuple[Set[Point], Set[Point]]:
    h_units: Set[Point] = set()
    v_units: Set[Point] = set()
    for orientation, lines, units in (
        (Orientation.HORIZONTAL, h_lines, h_units),
        (Orientation.VERTICAL, v_lines, v_units),
    ):
        lo_limit, hi_limit = domain.span_range(orientation)
        line_range = domain.line_range(orientation)
        for entry in lines:
            line, lo, hi = (int(x) for x in entry)
            if lo > hi:
                lo, hi = hi, lo
            if line not in line_range or lo < lo_limit or hi > hi_limit or lo == hi:
                raise SpanOutOfDomain(
                    f"{orientation.value.capitalize()} span {line}:[{lo},{hi}] "
                    f"does not fit into {domain}"
                )
            units.update(_point(orientation, k, line) for k in range(lo, hi))
    return h_units, v_units


def build_tmesh(
    domain: IndexDomain, h_lines: Sequence[LineSpan], v_lines: Sequence[LineSpan]
) -> TMesh:
    """Build a normalized T-mesh from line spans.

    Overlapping spans are unioned and the domain boundary is always added.

    :param domain: Index domain.
    :param h_lines: Horizontal spans as ``(row, lo, hi)``.
    :param v_lines: Vertical spans as ``(column, lo, hi)``.
    :return: Normalized mesh.
    :raises SpanOutOfDomain: A span leaves the domain or is empty.
    :raises DanglingEdge: An edge ends without meeting another one.
    """
    h_units, v_units = _units_from_lines(domain, h_lines, v_lines)
    mesh = TMesh(domain, h_units, v_units)
    logger.debug(f"Built {mesh!r}")
    return mesh


def tensor_mesh(domain: IndexDomain) -> TMesh:
    """Tensor-product mesh with every line of the domain present."""
    h_lines = [(j, domain.m_lo, domain.m_hi) for j in domain.line_range(Orientation.HORIZONTAL)]
    v_lines = [(i, domain.n_lo, domain.n_hi) for i in domain.line_range(Orientation.VERTICAL)]
    return build_tmesh(domain, h_lines, v_lines)


# offsets from either end of the domain of lines that must be complete
FRAME_LINE_OFFSETS = (0, 1, 2)
ACTIVE_LINE_OFFSETS = (2, 3)


def validate_admissible(mesh: TMesh) -> AdmissibilityReport:
    """Check the three admissibility conditions, collecting witnesses."""
    domain = mesh.domain
    frame_offsets, active_offsets = FRAME_LINE_OFFSETS, ACTIVE_LINE_OFFSETS
    frame = ConditionResult("frame lines")
    active = ConditionResult("active region lines")
    for orientation in Orientation:
        first = domain.line_range(orientation).start
        last = domain.line_range(orientation).stop - 1
        lo, hi = domain.span_range(orientation)
        for offsets, condition in ((frame_offsets, frame), (active_offsets, active)):
            for index in sorted({first + k for k in offsets} | {last - k for k in offsets}):
                if not mesh.covers(orientation, index, lo, hi):
                    condition.passed = False
                    condition.witnesses.append(LineRef(orientation, index))

    boundaries = ConditionResult("element boundaries")
    for face in mesh.faces:
        on_boundary = [v for v in mesh.vertices if face.boundary_contains(v)]
        for orientation in Orientation:
            by_line: Dict[int, List[int]] = {}
            for vertex in on_boundary:
                along, across = _along_across(orientation.other, vertex)
                by_line.setdefault(across, []).append(along)
            for line, coords in by_line.items():
                coords.sort()
                for lo, hi in zip(coords, coords[1:]):
                    if not mesh.covers(orientation.other, line, lo, hi):
                        boundaries.passed = False
                        other = orientation.other
                        gap = (_point(other, lo, line), _point(other, hi, line))
                        boundaries.witnesses.append(gap)
    report = AdmissibilityReport(frame, active, boundaries)
    logger.debug(f"Admissibility of {mesh!r}: {report.admissible}")
    return report


def trace_indices(mesh: TMesh, vertex: Point, direction: Orientation) -> List[int]:
    """Indices where the perpendicular skeleton crosses the line through ``vertex``.

    :param mesh: The mesh.
    :param vertex: Lattice point on the skeleton.
    :param direction: Direction of the line through the vertex.
    :return: Strictly increasing index list.
    :raises VertexNotOnSkeleton: Point is not on the skeleton.
    """
    if not mesh.on_skeleton(vertex):
        raise VertexNotOnSkeleton(f"{vertex} is not on the skeleton of {mesh!r}")
    _, line = _along_across(direction, vertex)
    return mesh.crossings(direction, line)


def segments(mesh: TMesh) -> List[Segment]:
    """All segments of the mesh."""
    return list(mesh.segments)


def segment_counts(mesh: TMesh) -> Tuple[int, int]:
    """Number of horizontal and vertical segments."""
    horizontal = sum(1 for s in mesh.segments if s.orientation is Orientation.HORIZONTAL)
    return horizontal, len(mesh.segments) - horizontal


@dataclass(frozen=True)
class SymbolicMesh:
    """Symbol per lattice point of the index domain."""

    domain: IndexDomain
    grid: Dict[Point, Symbol] = field(compare=False, hash=False)

    def __getitem__(self, point: Point) -> Symbol:
        return self.grid[point]

    def rows(self) -> List[str]:
        """Text rows, top row first."""
        domain = self.domain
        return [
            "".join(self.grid[(i, j)].value for i in range(domain.m_lo, domain.m_hi + 1))
            for j in range(domain.n_hi, domain.n_lo - 1, -1)
        ]

    def __str__(self) -> str:
        return "\n".join(self.rows())

    @classmethod
    def parse(cls, domain: IndexDomain, text: str) -> Self:
        """Parse text rows (top row first) back to a symbolic mesh."""
        rows = [row for row in text.splitlines() if row.strip()]
        grid: Dict[Point, Symbol] = {}
        for offset, row in enumerate(rows):
            j = domain.n_hi - offset
            for k, char in enumerate(row):
                grid[(domain.m_lo + k, j)] = Symbol(char)
        return cls(domain, grid)


def _symbol_at(mesh: TMesh, point: Point) -> Symbol:
    left, right, down, up = mesh.arms(point)
    if point in mesh.vertices:
        if mesh.valence(point) == 4 or mesh.domain.on_boundary(point):
            return Symbol.PLUS
        if not left:
            return Symbol.VDASH
        if not right:
            return Symbol.DASHV
        if not down:
            return Symbol.BOT
        return Symbol.TOP
    if down and up:
        return Symbol.VERTICAL_EDGE
    if left and right:
        return Symbol.HORIZONTAL_EDGE
    return Symbol.EMPTY


def symbolic(mesh: TMesh) -> SymbolicMesh:
    """Symbolic representation of the mesh."""
    grid = {point: _symbol_at(mesh, point) for point in mesh.domain.lattice()}
    return SymbolicMesh(mesh.domain, grid)


def from_symbolic(sym: SymbolicMesh) -> TMesh:
    """Rebuild a mesh from its symbolic representation."""
    domain = sym.domain

    def arms(point: Point) -> Tuple[bool, bool, bool, bool]:
        if not domain.contains(point):
            return (False, False, False, False)
        left, right, down, up = _ARMS[sym[point]]
        i, j = point
        return (
            left and i > domain.m_lo,
            right and i < domain.m_hi,
            down and j > domain.n_lo,
            up and j < domain.n_hi,
        )

    h_units = [
        (i, j)
        for i, j in domain.lattice()
        if arms((i, j))[1] and arms((i + 1, j))[0]
    ]
    v_units = [
        (i, j)
        for i, j in domain.lattice()
        if arms((i, j))[3] and arms((i, j + 1))[2]
    ]
    return TMesh(domain, h_units, v_units)


def anchors(mesh: TMesh) -> List[Point]:
    """Vertices inside the closed active region, sorted by row then column."""
    return sorted(
        (v for v in mesh.vertices if mesh.domain.in_active_region(v)), key=lambda p: (p[1], p[0])
    )


def t_junctions(mesh: TMesh) -> List[TJunction]:
    """Interior valence three anchors with their orientation symbol."""
    result = []
    for vertex in anchors(mesh):
        symbol = _symbol_at(mesh, vertex)
        if symbol.is_tjunction:
            result.append(TJunction(vertex, symbol))
    return result
