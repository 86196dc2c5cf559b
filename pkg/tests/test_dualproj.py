#!/usr/bin/env python
# -*- coding: UTF-8 -*-
#
# Copyright 2025 NXP
#
# SPDX-License-Identifier: BSD-3-Clause
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from tspline_kernel.dualproj import (
    BlendingFunction,
    FiniteDifference,
    Monomial,
    convergence_study,
    dual_apply,
    dual_functional,
    dual_point,
    dyadic_tensor_family,
    extended_support,
    get_function,
    l2_error,
    local_continuity_constant,
    project,
    projection_eval,
    univariate_weights,
)
from tspline_kernel.errors import DerivativesUnavailable, NotAnalysisSuitable
from tspline_kernel.meshio import load_mesh
from tspline_kernel.spline import SplineSpace, blending_eval, elements

THIS_DIR = Path(__file__).parent
DATA_DIR = THIS_DIR.joinpath("data")


def space_from(name):
    document = load_mesh(DATA_DIR.joinpath(name))
    return SplineSpace.create(document.mesh, document.knots)


def test_univariate_weights_uniform():
    local = tuple(Fraction(v) for v in range(5))
    assert univariate_weights(local, Fraction(2)) == (1, 0, Fraction(-1, 6), 0)


def test_dual_point():
    local = tuple(Fraction(v) for v in range(5))
    assert dual_point(local, Fraction(0), Fraction(10)) == Fraction(1, 2)
    assert dual_point(local, Fraction(2), Fraction(3)) == Fraction(5, 2)
    clamped = tuple(Fraction(v) for v in (0, 0, 0, 1, 3))
    assert dual_point(clamped, Fraction(0), Fraction(3)) == 2


@pytest.mark.parametrize("name", ["bezier.tmesh", "tensor.tmesh", "single_tj.tmesh"])
def test_biorthogonality(name):
    space = space_from(name)
    for anchor in space.anchors:
        functional = dual_functional(space, anchor)
        for function in space.functions:
            xi_lo, xi_hi, eta_lo, eta_hi = function.support
            if not (xi_lo <= functional.tau_xi <= xi_hi and eta_lo <= functional.tau_eta <= eta_hi):
                continue
            value = dual_apply(functional, BlendingFunction(space, function.anchor))
            assert value == (1 if function.anchor == anchor else 0), (anchor, function.anchor)


@pytest.mark.parametrize("powers", [(0, 0), (1, 0), (2, 3), (3, 3)])
def test_exact_monomial_reproduction(powers):
    space = space_from("single_tj.tmesh")
    monomial = Monomial(*powers)
    coefficients = project(space, monomial)
    points = (
        (Fraction(1, 3), Fraction(5, 2)),
        (Fraction(7, 2), Fraction(1, 7)),
        (Fraction(4), Fraction(3)),
    )
    for point in points:
        value = sum(c * blending_eval(space, anchor, *point) for anchor, c in coefficients.items())
        assert value == monomial(*point)


def test_floating_point_reproduction():
    space = space_from("tensor.tmesh")
    coefficients = project(space, get_function("monomial", 3, 2))
    xs, ys = space.sample_grid(15)
    values = projection_eval(space, coefficients, xs, ys)
    np.testing.assert_allclose(values, xs**3 * ys**2, atol=1e-10)
    assert l2_error(space, get_function("monomial", 3, 2)) < 1e-10


def test_derivatives_unavailable():
    space = space_from("bezier.tmesh")
    functional = dual_functional(space, (3, 3))
    with pytest.raises(DerivativesUnavailable):
        dual_apply(functional, lambda xi, eta: xi * eta)
    with pytest.raises(DerivativesUnavailable):
        Monomial(1, 1)(1.0, 1.0, 4, 0)


def test_finite_difference_wrapper():
    def f(xi, eta):
        return xi**2 * eta

    wrapped = FiniteDifference(f, name="square")
    assert wrapped(1.0, 2.0) == pytest.approx(2.0)
    assert wrapped(1.0, 2.0, 1, 0) == pytest.approx(4.0, abs=1e-5)
    assert wrapped(1.0, 2.0, 0, 1) == pytest.approx(1.0, abs=1e-5)
    assert str(wrapped) == "square"


@pytest.mark.parametrize(
    "dxi,deta,tolerance", [(1, 1, 1e-6), (3, 0, 1e-5), (2, 3, 1e-3), (3, 3, 1e-3)]
)
def test_finite_difference_mixed_orders(dxi, deta, tolerance):
    exact = get_function("sin-cos")
    wrapped = FiniteDifference(lambda xi, eta: exact(xi, eta), name="sampled")
    assert wrapped(0.3, 0.7, dxi, deta) == pytest.approx(exact(0.3, 0.7, dxi, deta), abs=tolerance)


def test_get_function():
    assert str(get_function("one")) == "constant 1"
    assert str(get_function("monomial", 2, 1)) == "monomial 2 1"
    with pytest.raises(ValueError):
        get_function("monomial", 2)
    with pytest.raises(ValueError):
        get_function("cosh")


def test_projection_needs_suitable_mesh():
    space = space_from("crossing.tmesh")
    with pytest.raises(NotAnalysisSuitable):
        project(space, get_function("one"))


def test_convergence_rate():
    table = convergence_study(dyadic_tensor_family(3), get_function("sin-cos"))
    assert len(table.rows) == 3
    assert not table.exact
    assert 3.7 <= table.slope <= 4.3
    assert table.rows[0][1] > table.rows[1][1] > table.rows[2][1]


def test_convergence_of_reproduced_function():
    table = convergence_study(dyadic_tensor_family(3, base_spans=4), get_function("monomial", 2, 2))
    assert table.exact
    assert table.slope is None
    with pytest.raises(ValueError):
        convergence_study(dyadic_tensor_family(2), get_function("one"))


def test_local_continuity():
    space = space_from("single_tj.tmesh")
    ratio = local_continuity_constant(space, get_function("sin-cos"))
    assert 0 < ratio < 10


def test_extended_support():
    space = space_from("bezier.tmesh")
    (element,) = elements(space)
    support = extended_support(space, element)
    assert len(support.anchors) == 16
    assert support.bounding_rectangle == (0, 7, 0, 7)
    assert support.covers(Fraction(1, 2), Fraction(13, 2))
