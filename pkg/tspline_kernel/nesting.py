#!/usr/bin/env python
# -*- coding: utf-8 -*-
#
# Copyright 2025 NXP
#
# SPDX-License-Identifier: BSD-3-Clause

"""Nestedness certificates and exact refinement matrices."""

import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .dualproj import dual_point, univariate_weights
from .errors import (
    DimensionMismatch,
    InsufficientTrace,
    NotAnalysisSuitable,
    NotASubmesh,
    NotCertified,
)
from .extension import extend, is_analysis_suitable
from .perturb import perturb, relative_perturb
from .spline import GlobalKnots, SplineSpace, bspline_eval
from .tmesh import Orientation, Point, TMesh

logger = logging.getLogger(__name__)

DEFAULT_DELTA = Fraction(1, 1024)
DEFAULT_RECHECK_DELTA = Fraction(1, 4096)


class Verdict(str, Enum):
    """Outcome of the nesting certification."""

    NESTED = "nested"
    NOT_NESTED = "not-nested"
    INAPPLICABLE = "inapplicable"


@dataclass
class NestingCertificate:
    """Evidence for or against the inclusion of two spline spaces."""

    verdict: Verdict
    delta: Fraction
    witness: Optional[Tuple[Orientation, Point]] = None
    recheck_delta: Optional[Fraction] = None
    reason: str = ""

    @property
    def nested(self) -> bool:
        """True for a nested verdict."""
        return self.verdict is Verdict.NESTED

    def __str__(self) -> str:
        text = f"{self.verdict.value} (delta={self.delta}"
        if self.recheck_delta is not None:
            text += f", confirmed at {self.recheck_delta}"
        text += ")"
        if self.witness is not None:
            orientation, point = self.witness
            text += f", {orientation.value} edge at {point} missing from the fine extended mesh"
        if self.reason:
            text += f": {self.reason}"
        return text


def _first_missing(small: TMesh, large: TMesh) -> Optional[Tuple[Orientation, Point]]:
    for orientation, units, other in (
        (Orientation.HORIZONTAL, small.h_units, large.h_units),
        (Orientation.VERTICAL, small.v_units, large.v_units),
    ):
        missing = sorted(units - other, key=lambda p: (p[1], p[0]))
        if missing:
            return orientation, missing[0]
    return None


def _check_compatible(t1: TMesh, t2: TMesh, knots1: GlobalKnots, knots2: GlobalKnots) -> None:
    if not t1.is_submesh_of(t2):
        raise NotASubmesh("The coarse mesh is not contained in the fine mesh")
    if knots1.domain != knots2.domain:
        raise NotASubmesh("Coarse and fine knots belong to different index domains")
    for orientation in Orientation:
        for line in t1.domain.line_range(orientation.other):
            if not t1.segments_on(orientation.other, line):
                continue
            if knots1.at(orientation, line) != knots2.at(orientation, line):
                raise NotASubmesh(
                    f"Knot of {orientation.other.value} line {line} differs between the meshes"
                )


def _perturbed_inclusion(
    t1: TMesh, t2: TMesh, knots2: GlobalKnots, delta: Fraction
) -> Optional[Tuple[Orientation, Point]]:
    _, fine = perturb(t2, knots2, delta)
    coarse = relative_perturb(t1, t2, delta)
    return _first_missing(extend(coarse.mesh).ext_mesh, extend(fine.mesh).ext_mesh)


def certify_nested(
    t1: TMesh,
    t2: TMesh,
    knots1: GlobalKnots,
    knots2: GlobalKnots,
    delta: Fraction = DEFAULT_DELTA,
    recheck_delta: Optional[Fraction] = DEFAULT_RECHECK_DELTA,
) -> NestingCertificate:
    """Certify that the space of ``t1`` is contained in the space of ``t2``.

    The perturbed extended coarse mesh must be a submesh of the perturbed extended fine mesh.

    :param t1: Coarse mesh.
    :param t2: Fine mesh.
    :param knots1: Knots of the coarse mesh.
    :param knots2: Knots of the fine mesh.
    :param delta: Perturbation size.
    :param recheck_delta: Second perturbation size which must give the same verdict.
    :return: Certificate.
    :raises NotASubmesh: Meshes or knots are not compatible.
    :raises NotAnalysisSuitable: One of the meshes is not analysis-suitable.
    """
    _check_compatible(t1, t2, knots1, knots2)
    for name, mesh in (("coarse", t1), ("fine", t2)):
        verdict = is_analysis_suitable(mesh)
        if not verdict.suitable:
            raise NotAnalysisSuitable(
                f"The {name} mesh is not analysis-suitable: {verdict.witness}"
            )
    try:
        witness = _perturbed_inclusion(t1, t2, knots2, Fraction(delta))
        if recheck_delta is not None:
            if _perturbed_inclusion(t1, t2, knots2, Fraction(recheck_delta)) != witness:
                raise NotCertified(f"Verdicts for delta {delta} and {recheck_delta} differ")
    except InsufficientTrace as exc:
        return NestingCertificate(Verdict.INAPPLICABLE, Fraction(delta), reason=str(exc))
    verdict_value = Verdict.NESTED if witness is None else Verdict.NOT_NESTED
    certificate = NestingCertificate(verdict_value, Fraction(delta), witness, recheck_delta)
    logger.info(f"Nesting certificate: {certificate}")
    return certificate


def extended_inclusion(t1: TMesh, t2: TMesh) -> Tuple[bool, Optional[Tuple[Orientation, Point]]]:
    """Unperturbed test whether the extended coarse mesh is a submesh of the extended fine mesh.

    This is a different condition than the one :func:`certify_nested` checks.
    """
    witness = _first_missing(extend(t1).ext_mesh, extend(t2).ext_mesh)
    return witness is None, witness


@lru_cache(maxsize=None)
def _univariate_coefficient(
    fine_local: Tuple[Fraction, ...], tau: Fraction, coarse_local: Tuple[Fraction, ...]
) -> Fraction:
    weights = univariate_weights(fine_local, tau)
    terms = (w * bspline_eval(coarse_local, tau, order) for order, w in enumerate(weights) if w)
    return sum(terms, Fraction(0))


@dataclass
class RefinementMatrix:
    """Exact coefficients expressing coarse blending functions in the fine ones."""

    coarse_anchors: List[Point]
    fine_anchors: List[Point]
    entries: Dict[Tuple[Point, Point], Fraction] = field(default_factory=dict)

    def get(self, fine: Point, coarse: Point) -> Fraction:
        """Coefficient of fine function ``fine`` in coarse function ``coarse``."""
        return self.entries.get((fine, coarse), Fraction(0))

    def column(self, coarse: Point) -> Dict[Point, Fraction]:
        """Nonzero fine coefficients of one coarse function."""
        return {b: v for (b, a), v in self.entries.items() if a == coarse}

    def row(self, fine: Point) -> Dict[Point, Fraction]:
        """Nonzero coarse coefficients of one fine anchor."""
        return {a: v for (b, a), v in self.entries.items() if b == fine}

    def row_sums(self) -> Dict[Point, Fraction]:
        """Sum over coarse functions per fine anchor."""
        sums = {b: Fraction(0) for b in self.fine_anchors}
        for (b, _), value in self.entries.items():
            sums[b] += value
        return sums

    def to_array(self) -> np.ndarray:
        """Dense float array, rows fine, columns coarse."""
        rows = {b: n for n, b in enumerate(self.fine_anchors)}
        columns = {a: n for n, a in enumerate(self.coarse_anchors)}
        array = np.zeros((len(self.fine_anchors), len(self.coarse_anchors)))
        for (b, a), value in self.entries.items():
            array[rows[b], columns[a]] = float(value)
        return array

    def is_identity(self) -> bool:
        """True when coarse and fine anchors agree and the matrix is the identity."""
        if self.coarse_anchors != self.fine_anchors:
            return False
        return all(
            self.get(b, a) == (1 if a == b else 0)
            for a in self.coarse_anchors
            for b in self.fine_anchors
        )


def refinement_matrix(
    coarse: SplineSpace, fine: SplineSpace, certificate: Optional[NestingCertificate] = None
) -> RefinementMatrix:
    """Coefficients ``lambda_B(N_A)`` for coarse anchors ``A`` and fine anchors ``B``.

    :param coarse: Coarse space.
    :param fine: Fine space.
    :param certificate: Certificate of the pair, computed when omitted.
    :return: Refinement matrix.
    :raises NotCertified: The pair is not certified as nested.
    """
    if certificate is None:
        certificate = certify_nested(coarse.mesh, fine.mesh, coarse.knots, fine.knots)
    if not certificate.nested:
        raise NotCertified(f"Spaces are not certified as nested: {certificate}")
    xi_lo, xi_hi, eta_lo, eta_hi = fine.reduced_domain
    matrix = RefinementMatrix(coarse.anchors, fine.anchors)
    for fine_function in fine.functions:
        tau_xi = dual_point(fine_function.xi_local, xi_lo, xi_hi)
        tau_eta = dual_point(fine_function.eta_local, eta_lo, eta_hi)
        for coarse_function in coarse.functions:
            if not coarse_function.support_meets(*fine_function.support):
                continue
            value = _univariate_coefficient(
                fine_function.xi_local, tau_xi, coarse_function.xi_local
            ) * _univariate_coefficient(fine_function.eta_local, tau_eta, coarse_function.eta_local)
            if value:
                matrix.entries[(fine_function.anchor, coarse_function.anchor)] = value
    shape = f"{len(fine.functions)}x{len(coarse.functions)}"
    logger.info(f"Refinement matrix {shape} with {len(matrix.entries)} entries")
    return matrix


def refine_geometry(
    control_points: Mapping[Point, Sequence[float]], matrix: RefinementMatrix
) -> Dict[Point, np.ndarray]:
    """Control points over the fine anchors describing the same surface.

    :raises DimensionMismatch: Control points do not match the coarse anchors.
    """
    if set(control_points) != set(matrix.coarse_anchors):
        raise DimensionMismatch(
            f"{len(control_points)} control points given"
            f" for {len(matrix.coarse_anchors)} coarse anchors"
        )
    points = {a: np.asarray(p, dtype=float) for a, p in control_points.items()}
    sizes = {p.shape for p in points.values()}
    if len(sizes) != 1:
        raise DimensionMismatch(f"Control points have mixed dimensions {sorted(sizes)}")
    (shape,) = sizes
    refined = {b: np.zeros(shape) for b in matrix.fine_anchors}
    for (b, a), value in matrix.entries.items():
        refined[b] += float(value) * points[a]
    return refined


def compose(m12: RefinementMatrix, m23: RefinementMatrix) -> RefinementMatrix:
    """Refinement matrix of a chain of nested spaces."""
    if m12.fine_anchors != m23.coarse_anchors:
        raise DimensionMismatch("The middle spaces of the two matrices differ")
    result = RefinementMatrix(m12.coarse_anchors, m23.fine_anchors)
    for (c, b), outer in m23.entries.items():
        for a, inner in m12.row(b).items():
            key = (c, a)
            result.entries[key] = result.entries.get(key, Fraction(0)) + outer * inner
    result.entries = {k: v for k, v in result.entries.items() if v}
    return result


def knot_insertion_matrix(
    coarse: Sequence[Fraction], fine: Sequence[Fraction]
) -> List[List[Fraction]]:
    """Univariate cubic knot insertion matrix, rows fine B-splines, columns coarse ones.

    :param coarse: Coarse knot vector.
    :param fine: Fine knot vector containing the coarse knots.
    :raises NotASubmesh: ``fine`` does not contain ``coarse``.
    """
    knots = [Fraction(k) for k in coarse]
    remaining = [Fraction(k) for k in fine]
    for value in knots:
        if value not in remaining:
            raise NotASubmesh(f"Knot {value} of the coarse vector is missing from the fine vector")
        remaining.remove(value)
    count = len(knots) - 4
    total = [[Fraction(int(r == c)) for c in range(count)] for r in range(count)]
    for x in remaining:
        k = max(n for n, t in enumerate(knots) if t <= x)
        if k >= len(knots) - 1:
            raise NotASubmesh(f"Knot {x} lies outside of the coarse knot vector")
        alpha = []
        for i in range(count + 1):
            if i <= k - 3:
                alpha.append(Fraction(1))
            elif i <= k:
                alpha.append((x - knots[i]) / (knots[i + 3] - knots[i]))
            else:
                alpha.append(Fraction(0))
        step = [[Fraction(0)] * count for _ in range(count + 1)]
        for i in range(count):
            step[i][i] = alpha[i]
            step[i + 1][i] = 1 - alpha[i + 1]
        columns = range(len(total[0]))
        total = [
            [sum((step[r][m] * total[m][c] for m in range(count)), Fraction(0)) for c in columns]
            for r in range(count + 1)
        ]
        knots.insert(k + 1, x)
        count += 1
    return total
