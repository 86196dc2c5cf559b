#!/usr/bin/env python
# -*- coding: utf-8 -*-
#
# Copyright 2025 NXP
#
# SPDX-License-Identifier: BSD-3-Clause

"""Perturbed knots and meshes.

Every line carrying several segments is split into one line per segment and every
zero knot span is opened to ``c * delta``. The index maps back to the original
mesh (``h_pi`` for columns, ``v_pi`` for rows) are part of the result.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import prettytable

from .errors import NegativeCoefficient, NotASubmesh
from .spline import GlobalKnots, Real, SplineSpace, bspline_eval_array, index_vectors
from .tmesh import IndexDomain, LineSpan, Orientation, Point, TMesh, anchors, build_tmesh

logger = logging.getLogger(__name__)

# perturbation coefficient per zero span slot, keyed by ("xi" | "eta", slot number)
Coefficients = Mapping[Tuple[str, int], Real]

DIRECTION_NAMES = {Orientation.HORIZONTAL: "xi", Orientation.VERTICAL: "eta"}


class SlotCoefficients(Dict[Tuple[str, int], Fraction]):
    """Coefficients per zero span slot ``(direction, ordinal)`` with a common default."""

    def __init__(self, values: Optional[Coefficients] = None, default: Real = 1) -> None:
        super().__init__({key: Fraction(value) for key, value in (values or {}).items()})
        self.default = Fraction(default)

    def get(  # type: ignore[override]
        self, key: Tuple[str, int], default: Optional[Real] = None
    ) -> Fraction:
        return super().get(key, self.default)

    @classmethod
    def parse(cls, texts: Sequence[str], default: Real = 1) -> "SlotCoefficients":
        """Parse ``direction:ordinal=value`` items, e.g. ``xi:0=1/2``.

        :raises ValueError: Malformed item.
        """
        values: Dict[Tuple[str, int], Fraction] = {}
        for text in texts:
            try:
                slot, value = text.split("=", 1)
                name, ordinal = slot.split(":", 1)
                if name not in DIRECTION_NAMES.values():
                    raise ValueError(f"direction must be one of {sorted(DIRECTION_NAMES.values())}")
                values[(name, int(ordinal))] = Fraction(value)
            except (ValueError, ZeroDivisionError) as exc:
                raise ValueError(f"Invalid coefficient '{text}' ({exc})") from exc
        return cls(values, default)


@dataclass
class PerturbedKnots:
    """Perturbed global knots with the maps onto the original indices."""

    knots: GlobalKnots
    h_pi: Tuple[int, ...]
    v_pi: Tuple[int, ...]
    delta: Fraction
    coefficients: Dict[Tuple[str, int], Fraction] = field(default_factory=dict)

    @property
    def strict(self) -> bool:
        """All perturbation coefficients are positive."""
        return all(value > 0 for value in self.coefficients.values())

    def pi(self, point: Point) -> Point:
        """Original lattice point of a perturbed one."""
        d = self.knots.domain
        return self.h_pi[point[0] - d.m_lo], self.v_pi[point[1] - d.n_lo]

    def index_pi(self, orientation: Orientation, index: int) -> int:
        """Original column (horizontal) or row (vertical) of a perturbed index."""
        d = self.knots.domain
        if orientation is Orientation.HORIZONTAL:
            return self.h_pi[index - d.m_lo]
        return self.v_pi[index - d.n_lo]


@dataclass
class PerturbedMesh:
    """Perturbed mesh with provenance of its vertices."""

    mesh: TMesh
    provenance: Dict[Point, Tuple[Point, Tuple[int, int]]] = field(default_factory=dict)

    def origin(self, vertex: Point) -> Point:
        """Original vertex of a perturbed vertex."""
        return self.provenance[vertex][0]


@dataclass
class _IndexMap:
    """Dense renumbering of (original index, segment ordinal) pairs."""

    forward: Dict[Tuple[int, int], int]
    backward: List[int]


def _index_map(mesh: TMesh, orientation: Orientation) -> _IndexMap:
    """Indices of the perpendicular direction: one per segment of each line of ``orientation``."""
    forward: Dict[Tuple[int, int], int] = {}
    backward: List[int] = []
    start = mesh.domain.line_range(orientation).start
    for line in mesh.domain.line_range(orientation):
        copies = max(1, len(mesh.segments_on(orientation, line)))
        for ordinal in range(copies):
            forward[(line, ordinal)] = start + len(backward)
            backward.append(line)
    return _IndexMap(forward, backward)


def _perturbed_values(
    name: str,
    original: Sequence[Fraction],
    backward: Sequence[int],
    first: int,
    delta: Fraction,
    coeffs: Coefficients,
    used: Dict[Tuple[str, int], Fraction],
) -> List[Fraction]:
    values = [original[backward[0] - first]]
    slot = 0
    for left, right in zip(backward, backward[1:]):
        span = original[right - first] - original[left - first]
        if span == 0:
            coefficient = Fraction(coeffs.get((name, slot), 1))
            if coefficient < 0:
                raise NegativeCoefficient(f"Coefficient of {name} slot {slot} is {coefficient}")
            used[(name, slot)] = coefficient
            span = coefficient * delta
            slot += 1
        values.append(values[-1] + span)
    return values


def _check_delta(delta: Real) -> Fraction:
    value = Fraction(delta)
    if value <= 0:
        raise NegativeCoefficient(f"Perturbation delta must be positive, got {delta}")
    return value


def _vertex_image(
    mesh: TMesh, columns: _IndexMap, rows: _IndexMap, vertex: Point
) -> Tuple[Point, Tuple[int, int]]:
    g_v = mesh.segment_ordinal(vertex, Orientation.VERTICAL)
    g_h = mesh.segment_ordinal(vertex, Orientation.HORIZONTAL)
    image = (columns.forward[(vertex[0], g_v)], rows.forward[(vertex[1], g_h)])
    return image, (g_h, g_v)


def _perturbed_domain(mesh: TMesh, columns: _IndexMap, rows: _IndexMap) -> IndexDomain:
    d = mesh.domain
    m_hi = d.m_lo + len(columns.backward) - 1
    return IndexDomain(d.m_lo, m_hi, d.n_lo, d.n_lo + len(rows.backward) - 1)


def _image_spans(
    mesh: TMesh, images: Dict[Point, Point], keep: Optional[TMesh] = None
) -> Tuple[List[LineSpan], List[LineSpan]]:
    """Images of all edges of ``mesh`` (only those in ``keep`` when given)."""
    h_lines: List[LineSpan] = []
    v_lines: List[LineSpan] = []
    for edge in mesh.edges:
        if edge.orientation is Orientation.HORIZONTAL:
            start, end = (edge.lo, edge.line), (edge.hi, edge.line)
        else:
            start, end = (edge.line, edge.lo), (edge.line, edge.hi)
        if keep is not None and not keep.covers(edge.orientation, edge.line, edge.lo, edge.hi):
            continue
        a, b = images[start], images[end]
        if edge.orientation is Orientation.HORIZONTAL:
            h_lines.append((a[1], a[0], b[0]))
        else:
            v_lines.append((a[0], a[1], b[1]))
    return h_lines, v_lines


def perturb(
    mesh: TMesh, knots: GlobalKnots, delta: Real, coeffs: Optional[Coefficients] = None
) -> Tuple[PerturbedKnots, PerturbedMesh]:
    """Perturb a mesh and its knots.

    :param mesh: Admissible mesh.
    :param knots: Global knots of the mesh.
    :param delta: Positive perturbation size.
    :param coeffs: Coefficient per zero span slot, 1 when missing.
    :return: Perturbed knots and perturbed mesh.
    :raises NegativeCoefficient: A coefficient is negative or ``delta`` is not positive.
    """
    delta_value = _check_delta(delta)
    coeffs = coeffs or {}
    columns = _index_map(mesh, Orientation.VERTICAL)
    rows = _index_map(mesh, Orientation.HORIZONTAL)
    domain = _perturbed_domain(mesh, columns, rows)
    used: Dict[Tuple[str, int], Fraction] = {}
    xi = _perturbed_values(
        "xi", knots.xi, columns.backward, mesh.domain.m_lo, delta_value, coeffs, used
    )
    eta = _perturbed_values(
        "eta", knots.eta, rows.backward, mesh.domain.n_lo, delta_value, coeffs, used
    )
    perturbed_knots = PerturbedKnots(
        GlobalKnots(domain, tuple(xi), tuple(eta)),
        tuple(columns.backward),
        tuple(rows.backward),
        delta_value,
        used,
    )

    images: Dict[Point, Point] = {}
    provenance: Dict[Point, Tuple[Point, Tuple[int, int]]] = {}
    for vertex in mesh.vertices:
        image, ordinals = _vertex_image(mesh, columns, rows, vertex)
        images[vertex] = image
        provenance[image] = (vertex, ordinals)
    h_lines, v_lines = _image_spans(mesh, images)
    perturbed = build_tmesh(domain, h_lines, v_lines)
    logger.info(
        f"Perturbed {mesh.domain} into {domain} with delta {delta_value}, "
        f"{len(used)} zero spans opened"
    )
    return perturbed_knots, PerturbedMesh(perturbed, provenance)


def relative_perturb(
    t1: TMesh, t2: TMesh, delta: Real, coeffs: Optional[Coefficients] = None
) -> PerturbedMesh:
    """Perturb the coarse mesh the way the fine mesh is perturbed.

    The fine mesh is perturbed and only the images of its edges lying on the coarse
    skeleton are kept. The knots are irrelevant for the topology, so uniform ones are used.

    :param t1: Coarse mesh.
    :param t2: Fine mesh containing ``t1``.
    :param delta: Positive perturbation size.
    :param coeffs: Coefficient per zero span slot.
    :return: Perturbed coarse mesh over the perturbed domain of ``t2``.
    :raises NotASubmesh: ``t1`` is not contained in ``t2``.
    """
    if not t1.is_submesh_of(t2):
        raise NotASubmesh("The coarse mesh is not contained in the fine mesh")
    _check_delta(delta)
    columns = _index_map(t2, Orientation.VERTICAL)
    rows = _index_map(t2, Orientation.HORIZONTAL)
    domain = _perturbed_domain(t2, columns, rows)
    images: Dict[Point, Point] = {}
    provenance: Dict[Point, Tuple[Point, Tuple[int, int]]] = {}
    for vertex in t2.vertices:
        image, ordinals = _vertex_image(t2, columns, rows, vertex)
        images[vertex] = image
        provenance[image] = (vertex, ordinals)
    h_lines, v_lines = _image_spans(t2, images, keep=t1)
    perturbed = build_tmesh(domain, h_lines, v_lines)
    kept = {v: provenance[v] for v in perturbed.vertices if v in provenance}
    return PerturbedMesh(perturbed, kept)


def map_knots_holds(mesh: TMesh, knots: GlobalKnots, delta: Real) -> bool:
    """Check that the index maps commute with the local index vectors of every anchor."""
    perturbed_knots, perturbed = perturb(mesh, knots, delta)
    for anchor in anchors(perturbed.mesh):
        hv, vv = index_vectors(perturbed.mesh, anchor)
        original = perturbed.origin(anchor)
        hv_0, vv_0 = index_vectors(mesh, original)
        mapped_h = tuple(perturbed_knots.index_pi(Orientation.HORIZONTAL, i) for i in hv)
        mapped_v = tuple(perturbed_knots.index_pi(Orientation.VERTICAL, j) for j in vv)
        if mapped_h != hv_0 or mapped_v != vv_0:
            logger.info(f"Index vectors of {anchor} do not map onto those of {original}")
            return False
    return True


@dataclass
class ConvergenceExperiment:
    """Sup deviations of perturbed blending functions per anchor and delta."""

    deltas: List[Fraction]
    deviations: Dict[Point, List[float]] = field(default_factory=dict)
    tolerance: float = 1e-12

    def monotone(self) -> bool:
        """Deviations do not grow as delta shrinks."""
        return all(
            all(b <= a + self.tolerance for a, b in zip(values, values[1:]))
            for values in self.deviations.values()
        )

    def worst(self) -> List[float]:
        """Largest deviation per delta."""
        return [
            max((values[k] for values in self.deviations.values()), default=0.0)
            for k in range(len(self.deltas))
        ]

    def table(self) -> prettytable.PrettyTable:
        """Deviation table, one row per anchor."""
        table = prettytable.PrettyTable(["Anchor", *(f"delta={d}" for d in self.deltas)])
        table.align = "r"
        table.hrules = prettytable.HEADER
        table.vrules = prettytable.NONE
        for anchor in sorted(self.deviations, key=lambda p: (p[1], p[0])):
            table.add_row([str(anchor), *(f"{v:.3e}" for v in self.deviations[anchor])])
        return table


def convergence_experiment(
    mesh: TMesh,
    knots: GlobalKnots,
    deltas: Sequence[Real],
    samples: int = 60,
    coeffs: Optional[Coefficients] = None,
) -> ConvergenceExperiment:
    """Measure how perturbed blending functions approach the original ones.

    :param mesh: Analysis-suitable mesh.
    :param knots: Global knots, possibly with zero spans.
    :param deltas: Positive decreasing perturbation sizes.
    :param samples: Sample grid density per direction.
    :param coeffs: Coefficient per zero span slot.
    :return: Deviation table.
    """
    values = [_check_delta(delta) for delta in deltas]
    if any(b >= a for a, b in zip(values, values[1:])):
        raise ValueError("Deltas must be strictly decreasing")
    space = SplineSpace.create(mesh, knots)
    xs, ys = space.sample_grid(samples)
    reference = dict(zip(space.anchors, space.evaluate_all(xs, ys)))
    _, xi_hi, _, eta_hi = space.reduced_domain
    experiment = ConvergenceExperiment(values)
    for delta in values:
        perturbed_knots, perturbed = perturb(mesh, knots, delta, coeffs)
        perturbed_space = SplineSpace.create(perturbed.mesh, perturbed_knots.knots)
        for function in perturbed_space.functions:
            original = perturbed.origin(function.anchor)
            approx = bspline_eval_array(function.xi_local, xs, 0, xi_hi) * bspline_eval_array(
                function.eta_local, ys, 0, eta_hi
            )
            deviation = float(np.max(np.abs(approx - reference[original])))
            experiment.deviations.setdefault(original, []).append(deviation)
    return experiment
