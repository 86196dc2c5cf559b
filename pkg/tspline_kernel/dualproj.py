#!/usr/bin/env python
# -*- coding: utf-8 -*-
#
# Copyright 2025 NXP
#
# SPDX-License-Identifier: BSD-3-Clause

"""Dual functionals, the spline projector and approximation experiments."""

import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import DerivativesUnavailable, NotAnalysisSuitable
from .extension import is_analysis_suitable
from .spline import (
    DEGREE,
    Element,
    GlobalKnots,
    Real,
    SplineSpace,
    bspline_eval,
    elements,
)
from .tmesh import IndexDomain, Point, tensor_mesh

logger = logging.getLogger(__name__)

DEFAULT_QUADRATURE_ORDER = 5
DEFAULT_FD_STEP = 1e-6


def _unwrap(value: np.ndarray) -> Any:
    """Plain float for zero-dimensional results."""
    return float(value) if value.ndim == 0 else value


class FunctionWithDerivatives(ABC):
    """Bivariate function with partial derivatives up to ``max_order`` per variable.

    Implementations accept floats, numpy arrays and, where possible, fractions.
    """

    name = "function"
    max_order = DEGREE

    @abstractmethod
    def evaluate(self, xi: Any, eta: Any, dxi: int = 0, deta: int = 0) -> Any:
        """Evaluate the function or a partial derivative."""

    def __call__(self, xi: Any, eta: Any, dxi: int = 0, deta: int = 0) -> Any:
        if dxi > self.max_order or deta > self.max_order:
            raise DerivativesUnavailable(
                f"{self.name} provides derivatives up to order {self.max_order}, "
                f"({dxi}, {deta}) requested"
            )
        return self.evaluate(xi, eta, dxi, deta)

    def __str__(self) -> str:
        return self.name


class Constant(FunctionWithDerivatives):
    """Constant function."""

    def __init__(self, value: Real = 1) -> None:
        self.value = value
        self.name = f"constant {value}"

    def evaluate(self, xi: Any, eta: Any, dxi: int = 0, deta: int = 0) -> Any:
        if dxi or deta:
            return 0 * xi * eta
        return self.value + 0 * xi * eta


def _monomial_derivative(x: Any, power: int, order: int) -> Any:
    if order > power:
        return 0 * x
    factor = math.perm(power, order)
    return factor * x ** (power - order)


class Monomial(FunctionWithDerivatives):
    """Monomial ``xi**a * eta**b``."""

    max_order = 3

    def __init__(self, a: int, b: int) -> None:
        if a < 0 or b < 0:
            raise ValueError(f"Monomial powers must be non-negative, got ({a}, {b})")
        self.a = a
        self.b = b
        self.name = f"monomial {a} {b}"

    def evaluate(self, xi: Any, eta: Any, dxi: int = 0, deta: int = 0) -> Any:
        return _monomial_derivative(xi, self.a, dxi) * _monomial_derivative(eta, self.b, deta)


class SinCos(FunctionWithDerivatives):
    """``sin(xi) * cos(eta)``."""

    name = "sin-cos"

    def evaluate(self, xi: Any, eta: Any, dxi: int = 0, deta: int = 0) -> Any:
        xi_f = np.asarray(xi, dtype=float)
        eta_f = np.asarray(eta, dtype=float)
        return _unwrap(np.sin(xi_f + dxi * np.pi / 2) * np.cos(eta_f + deta * np.pi / 2))


class BlendingFunction(FunctionWithDerivatives):
    """One blending function of a space, right-continuous at knot lines."""

    def __init__(self, space: SplineSpace, anchor: Point) -> None:
        self.function = space.function(anchor)
        self.name = f"N{anchor}"

    def evaluate(self, xi: Any, eta: Any, dxi: int = 0, deta: int = 0) -> Any:
        return bspline_eval(self.function.xi_local, xi, dxi) * bspline_eval(
            self.function.eta_local, eta, deta
        )


class FiniteDifference(FunctionWithDerivatives):
    """Central finite-difference derivatives of a plain callable ``f(xi, eta)``.

    The step grows with the total derivative order. For well scaled functions derivatives of
    total order three are accurate to about ``1e-5`` and those of order six to about ``1e-3``.
    """

    def __init__(
        self, func: Callable[[Any, Any], Any], step: float = DEFAULT_FD_STEP, name: str = ""
    ) -> None:
        self.func = func
        self.step = step
        self.name = name or getattr(func, "__name__", "callable")

    def _step(self, order: int) -> float:
        return self.step ** (2 / (order + 2))

    def evaluate(self, xi: Any, eta: Any, dxi: int = 0, deta: int = 0) -> Any:
        h_xi = h_eta = self._step(dxi + deta)
        total: Any = 0.0
        for k in range(dxi + 1):
            for m in range(deta + 1):
                weight = (-1) ** (k + m) * math.comb(dxi, k) * math.comb(deta, m)
                total = total + weight * self.func(
                    np.asarray(xi, dtype=float) + (dxi / 2 - k) * h_xi,
                    np.asarray(eta, dtype=float) + (deta / 2 - m) * h_eta,
                )
        return _unwrap(np.asarray(total / (h_xi**dxi * h_eta**deta)))


BUILTIN_FUNCTIONS = ("one", "monomial", "sin-cos")


def get_function(name: str, *args: int) -> FunctionWithDerivatives:
    """Built-in test function by name.

    :param name: One of ``one``, ``monomial``, ``sin-cos``.
    :param args: Powers of the monomial.
    """
    if name == "one":
        return Constant(1)
    if name == "monomial":
        if len(args) != 2:
            raise ValueError("monomial needs two powers")
        return Monomial(*args)
    if name == "sin-cos":
        return SinCos()
    raise ValueError(f"Unknown test function '{name}', use one of {', '.join(BUILTIN_FUNCTIONS)}")


def dual_point(local: Sequence[Fraction], lo: Fraction, hi: Fraction) -> Fraction:
    """Midpoint of the longest nonzero span of a local knot vector inside ``[lo, hi]``."""
    spans = [
        (right - left, left, right)
        for left, right in zip(local, local[1:])
        if right > left and left < hi and lo < right
    ]
    if not spans:
        spans = [(b - a, a, b) for a, b in zip(local, local[1:]) if b > a]
    longest = max(length for length, _, _ in spans)
    _, left, right = next(span for span in spans if span[0] == longest)
    return (left + right) / 2


def univariate_weights(local: Sequence[Fraction], tau: Fraction) -> Tuple[Fraction, ...]:
    """Weights of ``f, f', f'', f'''`` at ``tau`` in the cubic dual functional.

    The functional is built on ``psi(t) = (t - t2)(t - t3)(t - t4)`` with the three
    interior knots of the local knot vector.
    """
    t2, t3, t4 = local[1], local[2], local[3]
    s1 = t2 + t3 + t4
    s2 = t2 * t3 + t2 * t4 + t3 * t4
    s3 = t2 * t3 * t4
    psi = tau**3 - s1 * tau**2 + s2 * tau - s3
    psi_1 = 3 * tau**2 - 2 * s1 * tau + s2
    psi_2 = 6 * tau - 2 * s1
    return (Fraction(1), -psi_2 / 6, psi_1 / 6, -psi / 6)


@dataclass(frozen=True)
class DualFunctional:
    """Tensor-product dual functional of one anchor."""

    anchor: Point
    xi_local: Tuple[Fraction, ...]
    eta_local: Tuple[Fraction, ...]
    tau_xi: Fraction
    tau_eta: Fraction

    @property
    def xi_weights(self) -> Tuple[Fraction, ...]:
        """Weights of the ``xi`` derivatives."""
        return univariate_weights(self.xi_local, self.tau_xi)

    @property
    def eta_weights(self) -> Tuple[Fraction, ...]:
        """Weights of the ``eta`` derivatives."""
        return univariate_weights(self.eta_local, self.tau_eta)


def dual_functional(space: SplineSpace, anchor: Point) -> DualFunctional:
    """Dual functional of an anchor of the space."""
    function = space.function(anchor)
    xi_lo, xi_hi, eta_lo, eta_hi = space.reduced_domain
    return DualFunctional(
        anchor,
        function.xi_local,
        function.eta_local,
        dual_point(function.xi_local, xi_lo, xi_hi),
        dual_point(function.eta_local, eta_lo, eta_hi),
    )


def dual_apply(functional: DualFunctional, f: FunctionWithDerivatives) -> Real:
    """Apply a dual functional to a function.

    :param functional: Dual functional.
    :param f: Function with derivatives up to order three.
    :return: Value, exact when ``f`` is exact on fractions.
    :raises DerivativesUnavailable: ``f`` does not provide the derivatives.
    """
    if not isinstance(f, FunctionWithDerivatives):
        raise DerivativesUnavailable(
            f"{f!r} provides no derivatives, wrap it with FiniteDifference"
        )
    total: Any = 0
    for dxi, w_xi in enumerate(functional.xi_weights):
        for deta, w_eta in enumerate(functional.eta_weights):
            weight = w_xi * w_eta
            if weight:
                total = total + weight * f(functional.tau_xi, functional.tau_eta, dxi, deta)
    if isinstance(total, np.ndarray):
        return float(total)
    return total


def project(
    space: SplineSpace, f: FunctionWithDerivatives, require_suitable: bool = True
) -> Dict[Point, Real]:
    """Coefficients of the projection of ``f`` onto the space.

    :param space: Analysis-suitable spline space.
    :param f: Function with derivatives.
    :param require_suitable: Refuse spaces which are not analysis-suitable.
    :return: Coefficient per anchor.
    :raises NotAnalysisSuitable: Space is not analysis-suitable.
    """
    if require_suitable:
        verdict = is_analysis_suitable(space.mesh)
        if not verdict.suitable:
            raise NotAnalysisSuitable(
                f"Projection needs an analysis-suitable mesh: {verdict.witness}"
            )
    coefficients = {a: dual_apply(dual_functional(space, a), f) for a in space.anchors}
    logger.debug(f"Projected {f} onto {len(coefficients)} blending functions")
    return coefficients


def projection_eval(
    space: SplineSpace, coefficients: Dict[Point, Real], xi: Any, eta: Any
) -> np.ndarray:
    """Evaluate ``sum_A c_A N_A`` at paired points."""
    vector = np.array([float(coefficients[a]) for a in space.anchors])
    return vector @ space.evaluate_all(xi, eta)


@dataclass
class ExtendedSupport:
    """Anchors acting on an element and the region they cover."""

    element: Element
    anchors: List[Point]
    region: List[Tuple[Fraction, Fraction, Fraction, Fraction]]

    @property
    def bounding_rectangle(self) -> Tuple[Fraction, Fraction, Fraction, Fraction]:
        """Axis-aligned bounding rectangle of the region."""
        return (
            min(r[0] for r in self.region),
            max(r[1] for r in self.region),
            min(r[2] for r in self.region),
            max(r[3] for r in self.region),
        )

    @property
    def diameter(self) -> float:
        """Diameter of the bounding rectangle."""
        xi_lo, xi_hi, eta_lo, eta_hi = self.bounding_rectangle
        return float(np.hypot(float(xi_hi - xi_lo), float(eta_hi - eta_lo)))

    def covers(self, xi: Real, eta: Real) -> bool:
        """Is the point inside the open region."""
        return any(r[0] < xi < r[1] and r[2] < eta < r[3] for r in self.region)


def extended_support(space: SplineSpace, element: Element) -> ExtendedSupport:
    """Extended support of an element."""
    acting = [
        function
        for function in space.functions
        if function.support_meets(element.xi_lo, element.xi_hi, element.eta_lo, element.eta_hi)
    ]
    return ExtendedSupport(
        element, [function.anchor for function in acting], [function.support for function in acting]
    )


def gauss_points(
    element: Element, order: int = DEFAULT_QUADRATURE_ORDER
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Tensor Gauss-Legendre nodes and weights mapped onto an element."""
    nodes, weights = np.polynomial.legendre.leggauss(order)
    xi_lo, xi_hi = float(element.xi_lo), float(element.xi_hi)
    eta_lo, eta_hi = float(element.eta_lo), float(element.eta_hi)
    xs = xi_lo + (nodes + 1) * (xi_hi - xi_lo) / 2
    ys = eta_lo + (nodes + 1) * (eta_hi - eta_lo) / 2
    grid_x, grid_y = np.meshgrid(xs, ys)
    grid_w = np.outer(weights, weights) * (xi_hi - xi_lo) * (eta_hi - eta_lo) / 4
    return grid_x.ravel(), grid_y.ravel(), grid_w.ravel()


def _squared_norms(
    space: SplineSpace,
    coefficients: Dict[Point, Real],
    f: FunctionWithDerivatives,
    items: Sequence[Element],
    order: int,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per element squared L2 norms of ``P f``, ``f`` and ``f - P f``."""
    points = [gauss_points(element, order) for element in items]
    xs = np.concatenate([p[0] for p in points])
    ys = np.concatenate([p[1] for p in points])
    ws = np.concatenate([p[2] for p in points])
    p_values = projection_eval(space, coefficients, xs, ys)
    f_values = np.asarray(f(xs, ys), dtype=float) * np.ones_like(xs)
    shape = (len(items), order * order)
    proj = np.sum((ws * p_values**2).reshape(shape), axis=1)
    func = np.sum((ws * f_values**2).reshape(shape), axis=1)
    diff = np.sum((ws * (f_values - p_values) ** 2).reshape(shape), axis=1)
    return proj, func, diff


def l2_error(
    space: SplineSpace, f: FunctionWithDerivatives, order: int = DEFAULT_QUADRATURE_ORDER
) -> float:
    """Global L2 norm of ``f - P f`` over the evaluation domain."""
    coefficients = project(space, f)
    _, _, diff = _squared_norms(space, coefficients, f, elements(space), order)
    return float(np.sqrt(np.sum(diff)))


@dataclass
class ConvergenceTable:
    """Errors of the projector over a refinement family."""

    function: str
    rows: List[Tuple[float, float]] = field(default_factory=list)
    exact_tolerance: float = 1e-11

    @property
    def exact(self) -> bool:
        """True when all errors are at round-off level."""
        return all(error <= self.exact_tolerance for _, error in self.rows)

    @property
    def slope(self) -> Optional[float]:
        """Least-squares slope of ``log(error)`` over ``log(h)``, ``None`` when exact."""
        if self.exact or len(self.rows) < 2:
            return None
        h = np.log([row[0] for row in self.rows])
        errors = np.log([row[1] for row in self.rows])
        slope, _ = np.polyfit(h, errors, 1)
        return float(slope)


def convergence_study(
    spaces: Sequence[SplineSpace], f: FunctionWithDerivatives, order: int = DEFAULT_QUADRATURE_ORDER
) -> ConvergenceTable:
    """Global L2 projection error per refinement level.

    :param spaces: Analysis-suitable spaces, coarse to fine.
    :param f: Function to approximate.
    :param order: Gauss-Legendre points per direction.
    :return: Table of ``(h, error)`` rows with the fitted rate.
    """
    if len(spaces) < 3:
        raise ValueError(f"A convergence study needs at least three levels, got {len(spaces)}")
    table = ConvergenceTable(str(f))
    for space in spaces:
        items = elements(space)
        h = max(element.diameter for element in items)
        error = l2_error(space, f, order)
        logger.info(f"h={h:.5g} error={error:.5g}")
        table.rows.append((h, error))
    return table


def local_continuity_constant(
    space: SplineSpace, f: FunctionWithDerivatives, order: int = DEFAULT_QUADRATURE_ORDER
) -> float:
    """Largest ratio ``||P f||_{L2(Q)} / ||f||_{L2(extended support of Q)}`` over all elements."""
    coefficients = project(space, f)
    items = elements(space)
    proj, func, _ = _squared_norms(space, coefficients, f, items, order)
    ratio = 0.0
    for number, element in enumerate(items):
        support = extended_support(space, element)
        covered = [
            index
            for index, other in enumerate(items)
            if support.covers(*other.midpoint())
        ]
        denominator = float(np.sqrt(np.sum(func[covered])))
        if denominator > 0:
            ratio = max(ratio, float(np.sqrt(proj[number])) / denominator)
    return ratio


def dyadic_tensor_family(levels: int = 3, base_spans: int = 8) -> List[SplineSpace]:
    """Tensor spaces on the unit square with ``base_spans * 2**level`` spans per direction."""
    family = []
    for level in range(levels):
        spans = base_spans * 2**level
        side = spans + 2 * DEGREE
        domain = IndexDomain(0, side, 0, side)
        knots = GlobalKnots.open_uniform(domain)
        scaled = GlobalKnots(
            domain,
            tuple(k / spans for k in knots.xi),
            tuple(k / spans for k in knots.eta),
        )
        family.append(SplineSpace.create(tensor_mesh(domain), scaled))
    return family
