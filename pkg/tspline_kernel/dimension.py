#!/usr/bin/env python
# -*- coding: utf-8 -*-
#
# Copyright 2025 NXP
#
# SPDX-License-Identifier: BSD-3-Clause

"""Conformality constraint system, its simplification and the dimension formula.

Every segment of the extended mesh contributes four rows, the coefficients of
``sum d_v (t - t_v)**3`` over the vertices ``v`` on the segment. The columns are
the vertex cofactors. All arithmetic is exact.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Set, Tuple

import prettytable
from sympy import QQ
from sympy.polys.matrices.sdm import SDM

from .errors import KnotMultiplicityPresent
from .extension import ExtendedTMesh, VertexClass, extend, is_analysis_suitable
from .spline import GlobalKnots
from .tmesh import Orientation, Point, Segment, TMesh

logger = logging.getLogger(__name__)

ROWS_PER_SEGMENT = 4


@dataclass
class RationalMatrix:
    """Sparse exact matrix, rows map column index to a nonzero fraction."""

    shape: Tuple[int, int]
    rows: Dict[int, Dict[int, Fraction]] = field(default_factory=dict)

    def set(self, row: int, column: int, value: Fraction) -> None:
        """Store an entry, zeros are dropped."""
        if value:
            self.rows.setdefault(row, {})[column] = Fraction(value)

    def get(self, row: int, column: int) -> Fraction:
        """Entry at a position."""
        return self.rows.get(row, {}).get(column, Fraction(0))

    def submatrix(self, rows: Sequence[int], columns: Sequence[int]) -> "RationalMatrix":
        """Matrix restricted to the given rows and columns, renumbered in the given order."""
        column_map = {old: new for new, old in enumerate(columns)}
        result = RationalMatrix((len(rows), len(columns)))
        for new_row, old_row in enumerate(rows):
            for old_column, value in self.rows.get(old_row, {}).items():
                if old_column in column_map:
                    result.set(new_row, column_map[old_column], value)
        return result

    @classmethod
    def from_dense(cls, rows: Sequence[Sequence[Fraction]]) -> "RationalMatrix":
        """Create from nested sequences."""
        width = len(rows[0]) if rows else 0
        matrix = cls((len(rows), width))
        for r, row in enumerate(rows):
            for c, value in enumerate(row):
                matrix.set(r, c, Fraction(value))
        return matrix

    def to_dense(self) -> List[List[Fraction]]:
        """Nested lists of fractions."""
        return [[self.get(r, c) for c in range(self.shape[1])] for r in range(self.shape[0])]


def rank(matrix: RationalMatrix) -> int:
    """Exact rank by sparse rational row reduction."""
    if not any(matrix.rows.values()):
        return 0
    elements = {
        r: {c: QQ(value.numerator, value.denominator) for c, value in row.items()}
        for r, row in matrix.rows.items()
        if row
    }
    _, pivots = SDM(elements, matrix.shape, QQ).rref()
    return len(pivots)


def nullity(matrix: RationalMatrix) -> int:
    """Exact nullity, the number of columns minus the rank."""
    return matrix.shape[1] - rank(matrix)


def _block(abscissa: Fraction) -> Tuple[Fraction, Fraction, Fraction, Fraction]:
    """Coefficients of ``(t - abscissa)**3`` from the cubic term down."""
    return (Fraction(1), -3 * abscissa, 3 * abscissa**2, -(abscissa**3))


def _abscissa(knots: GlobalKnots, segment: Segment, vertex: Point) -> Fraction:
    if segment.orientation is Orientation.HORIZONTAL:
        return knots.xi_at(vertex[0])
    return knots.eta_at(vertex[1])


@dataclass
class ConstraintSystem:
    """Global conformality system of an extended mesh."""

    mesh: TMesh
    segments: List[Segment]
    vertices: List[Point]
    matrix: RationalMatrix

    @property
    def n_segments(self) -> int:
        """Number of row blocks."""
        return len(self.segments)

    @property
    def n_vertices(self) -> int:
        """Number of columns."""
        return len(self.vertices)

    def block_rows(self, number: int) -> List[int]:
        """Row indices of the block of the segment with the given position."""
        return list(range(ROWS_PER_SEGMENT * number, ROWS_PER_SEGMENT * (number + 1)))

    def columns_of(self, vertices: Sequence[Point]) -> List[int]:
        """Column indices of vertices."""
        index = {vertex: number for number, vertex in enumerate(self.vertices)}
        return [index[vertex] for vertex in vertices]


def _build_system(
    mesh: TMesh, knots: GlobalKnots, segments: List[Segment], vertices: List[Point]
) -> ConstraintSystem:
    column = {vertex: number for number, vertex in enumerate(vertices)}
    matrix = RationalMatrix((ROWS_PER_SEGMENT * len(segments), len(vertices)))
    for number, segment in enumerate(segments):
        abscissae = [_abscissa(knots, segment, vertex) for vertex in segment.vertices]
        if len(set(abscissae)) != len(abscissae):
            raise KnotMultiplicityPresent(
                f"Segment {segment} has repeated knot values, use the perturbation path"
            )
        for vertex, abscissa in zip(segment.vertices, abscissae):
            if vertex not in column:
                continue
            for offset, value in enumerate(_block(abscissa)):
                matrix.set(ROWS_PER_SEGMENT * number + offset, column[vertex], value)
    return ConstraintSystem(mesh, segments, vertices, matrix)


def assemble(mesh_ext: ExtendedTMesh, knots: GlobalKnots) -> ConstraintSystem:
    """Assemble the constraint system of an extended mesh.

    :param mesh_ext: Extended mesh.
    :param knots: Global knots without repeated values.
    :return: System with one four-row block per segment and one column per vertex.
    :raises KnotMultiplicityPresent: A segment carries vertices with equal knot values.
    """
    mesh = mesh_ext.ext_mesh
    vertices = sorted(mesh.vertices, key=lambda p: (p[1], p[0]))
    system = _build_system(mesh, knots, list(mesh.segments), vertices)
    logger.debug(f"Assembled {system.matrix.shape[0]}x{system.matrix.shape[1]} constraint system")
    return system


@dataclass
class ReducedSystem:
    """System without the eight outermost segments and the vertices only they carry."""

    system: ConstraintSystem
    removed_segments: List[Segment]
    removed_vertices: List[Point]

    @property
    def matrix(self) -> RationalMatrix:
        """Reduced matrix."""
        return self.system.matrix

    @property
    def segments(self) -> List[Segment]:
        """Remaining segments."""
        return self.system.segments

    @property
    def vertices(self) -> List[Point]:
        """Remaining vertices."""
        return self.system.vertices

    @property
    def n_ext(self) -> int:
        """Number of remaining vertices."""
        return len(self.system.vertices)

    @property
    def n_segments(self) -> int:
        """Number of remaining segments."""
        return len(self.system.segments)


def _outer_lines(mesh: TMesh) -> Dict[Orientation, Set[int]]:
    d = mesh.domain
    return {
        Orientation.HORIZONTAL: {d.n_lo, d.n_lo + 1, d.n_hi - 1, d.n_hi},
        Orientation.VERTICAL: {d.m_lo, d.m_lo + 1, d.m_hi - 1, d.m_hi},
    }


def simplify(system: ConstraintSystem) -> ReducedSystem:
    """Remove the two outermost lines on every side of the domain.

    A vertex is removed together with the lines only when both of its segments go.
    """
    outer = _outer_lines(system.mesh)
    removed = [s for s in system.segments if s.line in outer[s.orientation]]
    kept = [s for s in system.segments if s.line not in outer[s.orientation]]
    kept_numbers = [n for n, s in enumerate(system.segments) if s.line not in outer[s.orientation]]
    rows_out, columns_out = outer[Orientation.HORIZONTAL], outer[Orientation.VERTICAL]
    removed_vertices = [v for v in system.vertices if v[1] in rows_out and v[0] in columns_out]
    gone = set(removed_vertices)
    vertices = [v for v in system.vertices if v not in gone]
    rows = [row for number in kept_numbers for row in system.block_rows(number)]
    matrix = system.matrix.submatrix(rows, system.columns_of(vertices))
    kept_system = ConstraintSystem(system.mesh, kept, vertices, matrix)
    reduced = ReducedSystem(kept_system, removed, removed_vertices)
    logger.debug(f"Reduced system keeps {reduced.n_segments} segments and {reduced.n_ext} vertices")
    return reduced


def dim_formula(mesh_ext: ExtendedTMesh) -> int:
    """Topological dimension count: active plus crossing plus overlap vertices."""
    return mesh_ext.n_active + mesh_ext.n_crossing + mesh_ext.n_overlap


@dataclass
class PeelStep:
    """One segment of a diagonalizable ordering with the vertices it owns."""

    segment: Segment
    private: List[Point]


@dataclass
class Ordering:
    """Outcome of the greedy segment peel."""

    steps: List[PeelStep] = field(default_factory=list)
    stuck: List[Segment] = field(default_factory=list)

    @property
    def success(self) -> bool:
        """True when every segment was peeled."""
        return not self.stuck

    @property
    def segments(self) -> List[Segment]:
        """Peeled segments in order."""
        return [step.segment for step in self.steps]


def diagonalizable_order(reduced: ReducedSystem) -> Ordering:
    """Peel segments owning at least four vertices not on any other remaining segment.

    Among eligible segments the bottom-most then left-most is taken.
    """
    kept = set(reduced.vertices)
    remaining = list(reduced.segments)
    ordering = Ordering()
    while remaining:
        usage: Dict[Point, int] = {}
        for segment in remaining:
            for vertex in segment.vertices:
                if vertex in kept:
                    usage[vertex] = usage.get(vertex, 0) + 1
        eligible = []
        for segment in remaining:
            private = [v for v in segment.vertices if v in kept and usage[v] == 1]
            if len(private) >= ROWS_PER_SEGMENT:
                eligible.append(PeelStep(segment, private))
        if not eligible:
            ordering.stuck = sorted(remaining, key=lambda s: s.sort_key)
            logger.info(f"Segment peel is stuck with {len(remaining)} segments left")
            break
        step = min(eligible, key=lambda s: s.segment.sort_key)
        ordering.steps.append(step)
        remaining.remove(step.segment)
    return ordering


def confirm_ordering(reduced: ReducedSystem, ordering: Ordering) -> bool:
    """Check by exact elimination that every peeled block has rank four on its private columns."""
    if not ordering.success:
        return False
    position = {segment: number for number, segment in enumerate(reduced.segments)}
    for step in ordering.steps:
        rows = reduced.system.block_rows(position[step.segment])
        block = reduced.matrix.submatrix(rows, reduced.system.columns_of(step.private))
        if rank(block) != ROWS_PER_SEGMENT:
            return False
    return True


def reduced_segment_property(reduced: ReducedSystem, mesh_ext: ExtendedTMesh) -> bool:
    """Reduced vertices number four per segment and every segment carries four or more."""
    extended = {
        v for v in reduced.vertices if mesh_ext.classification.get(v) is VertexClass.EXTENDED
    }
    if len(extended) != ROWS_PER_SEGMENT * reduced.n_segments:
        return False
    return all(
        sum(1 for v in segment.vertices if v in extended) >= ROWS_PER_SEGMENT
        for segment in reduced.segments
    )


@dataclass
class DimensionReport:
    """Dimension of the smooth spline space by formula and by elimination."""

    formula: int
    nullity: int
    reduced_nullity: int
    diagonalizable: bool
    suitable: bool
    counts: Dict[str, int]
    n_anchors: int
    delta: Optional[Fraction] = None
    reduced_segment_property: bool = False
    confirmed: bool = False

    @property
    def agree(self) -> Optional[bool]:
        """Formula equals nullity, ``None`` when the formula does not apply."""
        if not self.diagonalizable or not self.confirmed:
            return None
        return self.formula == self.nullity

    @property
    def simplification_safe(self) -> bool:
        """Reduction kept the nullity."""
        return self.nullity == self.reduced_nullity

    @property
    def characterisation(self) -> Optional[bool]:
        """Dimension equals the anchor count on meshes without overlap or crossing vertices."""
        if not self.suitable or self.counts["n_minus"] or self.counts["n_plus"]:
            return None
        return self.nullity == self.n_anchors

    def summary_line(self) -> str:
        """Machine readable summary."""
        agree = "n/a" if self.agree is None else str(self.agree).lower()
        return (
            f"formula={self.formula} nullity={self.nullity} "
            f"as={str(self.suitable).lower()} diag={str(self.diagonalizable).lower()} "
            f"confirmed={str(self.confirmed).lower()} agree={agree}"
        )

    def table(self) -> prettytable.PrettyTable:
        """Report as aligned text."""
        table = prettytable.PrettyTable(["Quantity", "Value"])
        table.align = "l"
        table.hrules = prettytable.HEADER
        table.vrules = prettytable.NONE
        rows = [
            ("anchors", self.n_anchors),
            *self.counts.items(),
            ("formula n_a + n_plus + n_minus", self.formula),
            ("nullity(M)", self.nullity),
            ("nullity(reduced M)", self.reduced_nullity),
            ("diagonalizable", self.diagonalizable),
            ("ordering confirmed", self.confirmed),
            ("analysis-suitable", self.suitable),
            ("reduced segment property", self.reduced_segment_property),
            ("agree", "n/a" if self.agree is None else self.agree),
            ("dim = anchors", "n/a" if self.characterisation is None else self.characterisation),
        ]
        if self.delta is not None:
            rows.append(("perturbation delta", str(self.delta)))
        for name, value in rows:
            table.add_row([name, value])
        return table


def dimension_report(
    mesh: TMesh,
    knots: GlobalKnots,
    delta: Optional[Fraction] = None,
    coeffs: Optional[Mapping[Tuple[str, int], Fraction]] = None,
) -> DimensionReport:
    """Compute the dimension by formula and by exact elimination.

    :param mesh: Admissible mesh.
    :param knots: Global knots.
    :param delta: Perturbation used when the knots repeat values.
    :param coeffs: Perturbation coefficients per zero span slot.
    :return: Report.
    :raises KnotMultiplicityPresent: Knots repeat values and no ``delta`` was given.
    """
    if knots.has_multiplicities():
        if delta is None:
            raise KnotMultiplicityPresent(
                "Knot vectors have multiplicities, pass a perturbation delta"
            )
        # pylint: disable=import-outside-toplevel
        from .perturb import perturb

        perturbed_knots, perturbed_mesh = perturb(mesh, knots, delta, coeffs)
        mesh, knots = perturbed_mesh.mesh, perturbed_knots.knots
        logger.info(f"Computing the dimension on the mesh perturbed by {delta}")
    mesh_ext = extend(mesh)
    system = assemble(mesh_ext, knots)
    reduced = simplify(system)
    ordering = diagonalizable_order(reduced)
    report = DimensionReport(
        formula=dim_formula(mesh_ext),
        nullity=nullity(system.matrix),
        reduced_nullity=nullity(reduced.matrix),
        diagonalizable=ordering.success,
        suitable=is_analysis_suitable(mesh).suitable,
        counts=mesh_ext.summary(),
        n_anchors=mesh_ext.n_active,
        delta=delta,
        reduced_segment_property=reduced_segment_property(reduced, mesh_ext),
        confirmed=confirm_ordering(reduced, ordering),
    )
    logger.info(report.summary_line())
    return report
