#!/usr/bin/env python
# -*- coding: utf-8 -*-
#
# Copyright 2025 NXP
#
# SPDX-License-Identifier: BSD-3-Clause

"""Global knots, anchor functions, cubic B-spline and blending function evaluation."""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from typing_extensions import Self

from .errors import (
    DegenerateKnotVector,
    InsufficientTrace,
    InvalidKnots,
    NotAnAnchor,
    OutsideReducedDomain,
)
from .extension import ExtendedTMesh, extend
from .tmesh import IndexDomain, IndexRect, Orientation, Point, TMesh, anchors, trace_indices

logger = logging.getLogger(__name__)

Real = Union[float, Fraction]
Knots5 = Tuple[Fraction, Fraction, Fraction, Fraction, Fraction]

DEGREE = 3
MAX_INTERIOR_MULTIPLICITY = 3
MAX_END_MULTIPLICITY = 4


def _as_fraction(value: Any) -> Fraction:
    try:
        return Fraction(value)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise InvalidKnots(f"Knot value {value!r} is not a rational number ({exc})") from exc


def _check_knot_vector(name: str, values: Sequence[Fraction]) -> None:
    for number, (left, right) in enumerate(zip(values, values[1:])):
        if right < left:
            raise InvalidKnots(f"Knot vector {name} decreases at position {number + 1}")
    runs: List[Tuple[int, int]] = []
    start = 0
    for number in range(1, len(values) + 1):
        if number == len(values) or values[number] != values[start]:
            runs.append((start, number - start))
            start = number
    for start, length in runs:
        at_end = start == 0 or start + length == len(values)
        limit = MAX_END_MULTIPLICITY if at_end else MAX_INTERIOR_MULTIPLICITY
        if length > limit:
            raise InvalidKnots(
                f"Knot {values[start]} of {name} has multiplicity {length}, at most {limit} allowed"
            )


@dataclass(frozen=True)
class GlobalKnots:
    """Global knot vectors indexed by the columns and rows of an index domain."""

    domain: IndexDomain
    xi: Tuple[Fraction, ...]
    eta: Tuple[Fraction, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "xi", tuple(_as_fraction(v) for v in self.xi))
        object.__setattr__(self, "eta", tuple(_as_fraction(v) for v in self.eta))
        columns = self.domain.m_hi - self.domain.m_lo + 1
        rows = self.domain.n_hi - self.domain.n_lo + 1
        if len(self.xi) != columns:
            raise InvalidKnots(f"Knot vector xi has {len(self.xi)} entries, {columns} expected")
        if len(self.eta) != rows:
            raise InvalidKnots(f"Knot vector eta has {len(self.eta)} entries, {rows} expected")
        _check_knot_vector("xi", self.xi)
        _check_knot_vector("eta", self.eta)

    @classmethod
    def uniform(cls, domain: IndexDomain) -> Self:
        """Distinct integer knots with the reduced domain starting at zero."""
        xi = [i - domain.m_lo - DEGREE for i in range(domain.m_lo, domain.m_hi + 1)]
        eta = [j - domain.n_lo - DEGREE for j in range(domain.n_lo, domain.n_hi + 1)]
        return cls(domain, tuple(Fraction(v) for v in xi), tuple(Fraction(v) for v in eta))

    @classmethod
    def open_uniform(cls, domain: IndexDomain) -> Self:
        """Integer knots with four-fold end knots, e.g. ``(0,0,0,0,1,2,3,3,3,3)``."""

        def clamped(count: int) -> Tuple[Fraction, ...]:
            top = count - 1 - 2 * DEGREE
            return tuple(Fraction(min(max(k - DEGREE, 0), top)) for k in range(count))

        return cls(
            domain,
            clamped(domain.m_hi - domain.m_lo + 1),
            clamped(domain.n_hi - domain.n_lo + 1),
        )

    def xi_at(self, i: int) -> Fraction:
        """Knot of column ``i``."""
        return self.xi[i - self.domain.m_lo]

    def eta_at(self, j: int) -> Fraction:
        """Knot of row ``j``."""
        return self.eta[j - self.domain.n_lo]

    def at(self, orientation: Orientation, index: int) -> Fraction:
        """Knot of a column (horizontal direction) or a row (vertical direction)."""
        if orientation is Orientation.HORIZONTAL:
            return self.xi_at(index)
        return self.eta_at(index)

    def values(self, orientation: Orientation) -> Tuple[Fraction, ...]:
        """Whole knot vector along the direction."""
        return self.xi if orientation is Orientation.HORIZONTAL else self.eta

    @property
    def parametric_domain(self) -> Tuple[Fraction, Fraction, Fraction, Fraction]:
        """Full parametric domain ``(xi_lo, xi_hi, eta_lo, eta_hi)``."""
        return (self.xi[0], self.xi[-1], self.eta[0], self.eta[-1])

    @property
    def reduced_domain(self) -> Tuple[Fraction, Fraction, Fraction, Fraction]:
        """Evaluation domain spanned by the knots three indices inside the domain."""
        d = self.domain
        return (
            self.xi_at(d.m_lo + DEGREE),
            self.xi_at(d.m_hi - DEGREE),
            self.eta_at(d.n_lo + DEGREE),
            self.eta_at(d.n_hi - DEGREE),
        )

    def has_multiplicities(self) -> bool:
        """True when any two neighbouring knots coincide."""
        return any(a == b for values in (self.xi, self.eta) for a, b in zip(values, values[1:]))

    def export(self) -> Dict[str, List[str]]:
        """Knots as strings, ``"p/q"`` for non-integers."""
        return {"xi": [str(v) for v in self.xi], "eta": [str(v) for v in self.eta]}


def _validate_local(knots: Sequence[Real]) -> None:
    if len(knots) != 5:
        raise InvalidKnots(f"A cubic B-spline needs five knots, got {len(knots)}")
    if any(b < a for a, b in zip(knots, knots[1:])):
        raise InvalidKnots(f"Local knots {tuple(str(k) for k in knots)} are not non-decreasing")
    if knots[0] == knots[-1]:
        raise DegenerateKnotVector(f"All five knots equal {knots[0]}")


def _basis(knots: Sequence[Real], x: Real, deriv: int, from_left: bool) -> Real:
    degree = len(knots) - 2
    if deriv == 0 and degree == 0:
        inside = knots[0] < x <= knots[1] if from_left else knots[0] <= x < knots[1]
        return 1 if inside else 0
    if deriv > degree:
        return 0
    left_span = knots[degree] - knots[0]
    right_span = knots[degree + 1] - knots[1]
    if deriv == 0:
        value: Real = 0
        if left_span:
            value += (x - knots[0]) / left_span * _basis(knots[:-1], x, 0, from_left)
        if right_span:
            value += (knots[degree + 1] - x) / right_span * _basis(knots[1:], x, 0, from_left)
        return value
    value = 0
    if left_span:
        value += _basis(knots[:-1], x, deriv - 1, from_left) / left_span
    if right_span:
        value -= _basis(knots[1:], x, deriv - 1, from_left) / right_span
    return degree * value


def bspline_eval(knots5: Sequence[Real], x: Real, deriv: int = 0, from_left: bool = False) -> Real:
    """Evaluate a cubic B-spline or one of its derivatives.

    The basis is right-continuous; ``from_left`` selects the left limit instead,
    which is used on the right end of the evaluation domain. With rational knots
    and a rational ``x`` the result is exact.

    :param knots5: Five non-decreasing local knots.
    :param x: Evaluation point.
    :param deriv: Derivative order, 0 to 3.
    :param from_left: Evaluate the left limit.
    :return: Value, a ``Fraction`` when ``x`` is rational.
    :raises DegenerateKnotVector: All five knots coincide.
    """
    _validate_local(knots5)
    if not 0 <= deriv <= DEGREE:
        raise ValueError(f"Derivative order {deriv} is out of range 0..{DEGREE}")
    if isinstance(x, (Fraction, int)) and all(isinstance(k, (Fraction, int)) for k in knots5):
        exact = _basis(tuple(Fraction(k) for k in knots5), Fraction(x), deriv, from_left)
        return Fraction(exact)
    return float(_basis(tuple(knots5), x, deriv, from_left))


def _basis_array(
    knots: Sequence[float], x: np.ndarray, deriv: int, from_left: np.ndarray
) -> np.ndarray:
    degree = len(knots) - 2
    if deriv == 0 and degree == 0:
        right_cont = (knots[0] <= x) & (x < knots[1])
        left_cont = (knots[0] < x) & (x <= knots[1])
        return np.where(from_left, left_cont, right_cont).astype(float)
    if deriv > degree:
        return np.zeros_like(x, dtype=float)
    left_span = knots[degree] - knots[0]
    right_span = knots[degree + 1] - knots[1]
    value = np.zeros_like(x, dtype=float)
    if deriv == 0:
        if left_span:
            value += (x - knots[0]) / left_span * _basis_array(knots[:-1], x, 0, from_left)
        if right_span:
            value += (knots[degree + 1] - x) / right_span * _basis_array(knots[1:], x, 0, from_left)
        return value
    if left_span:
        value += _basis_array(knots[:-1], x, deriv - 1, from_left) / left_span
    if right_span:
        value -= _basis_array(knots[1:], x, deriv - 1, from_left) / right_span
    return degree * value


def bspline_eval_array(
    knots5: Sequence[Real], x: Any, deriv: int = 0, right_end: Optional[Real] = None
) -> np.ndarray:
    """Vectorised floating-point variant of :func:`bspline_eval`.

    :param knots5: Five non-decreasing local knots.
    :param x: Array of evaluation points.
    :param deriv: Derivative order.
    :param right_end: Points equal to this value are evaluated as left limits.
    :return: Array of values with the shape of ``x``.
    """
    _validate_local(knots5)
    points = np.asarray(x, dtype=float)
    if right_end is None:
        from_left = np.zeros(points.shape, dtype=bool)
    else:
        from_left = points == float(right_end)
    return _basis_array(tuple(float(k) for k in knots5), points, deriv, from_left)


@dataclass(frozen=True)
class AnchorFunction:
    """Blending function of one anchor."""

    anchor: Point
    hv: Tuple[int, ...]
    vv: Tuple[int, ...]
    xi_local: Knots5
    eta_local: Knots5

    @property
    def support(self) -> Tuple[Fraction, Fraction, Fraction, Fraction]:
        """Closed support rectangle ``(xi_lo, xi_hi, eta_lo, eta_hi)``."""
        return (self.xi_local[0], self.xi_local[-1], self.eta_local[0], self.eta_local[-1])

    def support_meets(self, xi_lo: Real, xi_hi: Real, eta_lo: Real, eta_hi: Real) -> bool:
        """Does the open support intersect the open rectangle."""
        s_xi_lo, s_xi_hi, s_eta_lo, s_eta_hi = self.support
        return s_xi_lo < xi_hi and xi_lo < s_xi_hi and s_eta_lo < eta_hi and eta_lo < s_eta_hi

    def covers(self, xi: Real, eta: Real) -> bool:
        """Is the point in the closed support."""
        xi_lo, xi_hi, eta_lo, eta_hi = self.support
        return xi_lo <= xi <= xi_hi and eta_lo <= eta <= eta_hi


def index_vectors(mesh: TMesh, anchor: Point) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
    """Local index vectors of an anchor.

    :param mesh: Admissible mesh.
    :param anchor: Anchor of the mesh.
    :return: Five consecutive trace indices per direction centred on the anchor.
    :raises NotAnAnchor: Vertex is not an anchor.
    :raises InsufficientTrace: Trace offers fewer than two indices on a side.
    """
    if not mesh.is_vertex(anchor) or not mesh.domain.in_active_region(anchor):
        raise NotAnAnchor(f"{anchor} is not an anchor")
    vectors = []
    for direction, own in ((Orientation.HORIZONTAL, anchor[0]), (Orientation.VERTICAL, anchor[1])):
        trace = trace_indices(mesh, anchor, direction)
        position = trace.index(own)
        if position < 2 or position + 2 >= len(trace):
            raise InsufficientTrace(f"{direction.value} trace through {anchor} is too short")
        vectors.append(tuple(trace[position - 2 : position + 3]))
    return vectors[0], vectors[1]


@dataclass(frozen=True)
class Element:
    """Non-empty parametric element with its index-space preimage."""

    cell: IndexRect
    xi_lo: Fraction
    xi_hi: Fraction
    eta_lo: Fraction
    eta_hi: Fraction

    @property
    def diameter(self) -> float:
        """Euclidean diameter of the element."""
        return float(np.hypot(float(self.xi_hi - self.xi_lo), float(self.eta_hi - self.eta_lo)))

    def midpoint(self) -> Tuple[Fraction, Fraction]:
        """Centre of the element."""
        return (self.xi_lo + self.xi_hi) / 2, (self.eta_lo + self.eta_hi) / 2


@dataclass
class SplineSpace:
    """T-spline space spanned by the blending functions of all anchors."""

    mesh: TMesh
    knots: GlobalKnots
    functions: List[AnchorFunction] = field(default_factory=list)

    @classmethod
    def create(cls, mesh: TMesh, knots: GlobalKnots) -> Self:
        """Build the space of a mesh with global knots.

        :raises InvalidKnots: Knots belong to another index domain.
        """
        if knots.domain != mesh.domain:
            raise InvalidKnots(
                f"Knots are given for {knots.domain}, the mesh lives on {mesh.domain}"
            )
        functions = []
        for anchor in anchors(mesh):
            hv, vv = index_vectors(mesh, anchor)
            xi_local = tuple(knots.xi_at(i) for i in hv)
            eta_local = tuple(knots.eta_at(j) for j in vv)
            function = AnchorFunction(anchor, hv, vv, xi_local, eta_local)  # type: ignore[arg-type]
            functions.append(function)
        space = cls(mesh, knots, functions)
        logger.info(f"Spline space with {len(functions)} blending functions on {mesh.domain}")
        return space

    @cached_property
    def extended(self) -> ExtendedTMesh:
        """Extended mesh of the underlying T-mesh."""
        return extend(self.mesh)

    @cached_property
    def _by_anchor(self) -> Dict[Point, AnchorFunction]:
        return {function.anchor: function for function in self.functions}

    def function(self, anchor: Point) -> AnchorFunction:
        """Blending function of an anchor."""
        try:
            return self._by_anchor[anchor]
        except KeyError as exc:
            raise NotAnAnchor(f"{anchor} is not an anchor of the space") from exc

    @property
    def anchors(self) -> List[Point]:
        """Anchors in the order of the functions."""
        return [function.anchor for function in self.functions]

    @property
    def reduced_domain(self) -> Tuple[Fraction, Fraction, Fraction, Fraction]:
        """Evaluation domain."""
        return self.knots.reduced_domain

    def contains(self, xi: Real, eta: Real) -> bool:
        """Is the point inside the closed evaluation domain."""
        xi_lo, xi_hi, eta_lo, eta_hi = self.reduced_domain
        return xi_lo <= xi <= xi_hi and eta_lo <= eta <= eta_hi

    def sample_grid(self, count: int) -> Tuple[np.ndarray, np.ndarray]:
        """Points of a ``count x count`` grid in the evaluation domain avoiding knot lines.

        :return: Flattened ``xi`` and ``eta`` coordinates.
        """
        xi_lo, xi_hi, eta_lo, eta_hi = (float(v) for v in self.reduced_domain)
        steps = np.arange(count)
        offsets = 0.5 + 0.25 * (np.modf(steps * 0.6180339887498949)[0] - 0.5)
        ticks = (steps + offsets) / count
        xs, ys = np.meshgrid(xi_lo + ticks * (xi_hi - xi_lo), eta_lo + ticks * (eta_hi - eta_lo))
        return xs.ravel(), ys.ravel()

    def evaluate_all(self, xi: Any, eta: Any, dxi: int = 0, deta: int = 0) -> np.ndarray:
        """Evaluate every blending function at paired points.

        :return: Array of shape ``(number of anchors, number of points)``.
        """
        xs = np.asarray(xi, dtype=float).ravel()
        ys = np.asarray(eta, dtype=float).ravel()
        _, xi_hi, _, eta_hi = self.reduced_domain
        values = np.empty((len(self.functions), xs.size))
        for row, function in enumerate(self.functions):
            xi_values = bspline_eval_array(function.xi_local, xs, dxi, xi_hi)
            values[row] = xi_values * bspline_eval_array(function.eta_local, ys, deta, eta_hi)
        return values

    def collocation_rank(self, count: Optional[int] = None, tolerance: float = 1e-8) -> int:
        """Numerical rank of the collocation matrix on a sample grid.

        :param count: Grid density, enough points for all anchors when omitted.
        :param tolerance: Relative singular value cutoff.
        """
        if count is None:
            count = 2 * int(np.ceil(np.sqrt(len(self.functions)))) + 4
        xs, ys = self.sample_grid(count)
        singular = np.linalg.svd(self.evaluate_all(xs, ys), compute_uv=False)
        if singular.size == 0:
            return 0
        cutoff = tolerance * singular[0]
        close = singular[(singular > cutoff / 100) & (singular < cutoff * 100)]
        if close.size:
            logger.warning(
                f"Collocation rank is uncertain, {close.size} singular values near the cutoff"
            )
        return int(np.sum(singular > cutoff))


def blending_eval(
    space: SplineSpace, anchor: Point, xi: Real, eta: Real, dxi: int = 0, deta: int = 0
) -> Real:
    """Evaluate the blending function of an anchor, or a partial derivative of it.

    :param space: Spline space.
    :param anchor: Anchor of the space.
    :param xi: First parameter.
    :param eta: Second parameter.
    :param dxi: Derivative order in ``xi``.
    :param deta: Derivative order in ``eta``.
    :return: Value, exact when the parameters are rational.
    :raises OutsideReducedDomain: Point is outside the evaluation domain.
    """
    if not space.contains(xi, eta):
        raise OutsideReducedDomain(f"({xi}, {eta}) is outside the evaluation domain")
    function = space.function(anchor)
    _, xi_hi, _, eta_hi = space.reduced_domain
    return bspline_eval(function.xi_local, xi, dxi, xi == xi_hi) * bspline_eval(
        function.eta_local, eta, deta, eta == eta_hi
    )


def elements(space: SplineSpace) -> List[Element]:
    """Non-empty elements of the extended mesh inside the evaluation domain."""
    domain = space.mesh.domain
    knots = space.knots
    result = []
    for face in space.extended.ext_mesh.faces:
        if face.i_lo < domain.m_lo + DEGREE or face.i_hi > domain.m_hi - DEGREE:
            continue
        if face.j_lo < domain.n_lo + DEGREE or face.j_hi > domain.n_hi - DEGREE:
            continue
        xi_lo, xi_hi = knots.xi_at(face.i_lo), knots.xi_at(face.i_hi)
        eta_lo, eta_hi = knots.eta_at(face.j_lo), knots.eta_at(face.j_hi)
        if xi_lo < xi_hi and eta_lo < eta_hi:
            result.append(Element(face, xi_lo, xi_hi, eta_lo, eta_hi))
    return result


def surface_eval(
    space: SplineSpace, control_points: Mapping[Point, Sequence[float]], xi: Real, eta: Real
) -> np.ndarray:
    """Evaluate the geometry ``sum_A P_A N_A(xi, eta)``.

    :param space: Spline space.
    :param control_points: Control point per anchor.
    :param xi: First parameter.
    :param eta: Second parameter.
    :return: Point of the surface.
    """
    result: Optional[np.ndarray] = None
    for function in space.functions:
        weight = float(blending_eval(space, function.anchor, xi, eta))
        term = weight * np.asarray(control_points[function.anchor], dtype=float)
        result = term if result is None else result + term
    if result is None:
        raise NotAnAnchor("Space has no blending functions")
    return result
