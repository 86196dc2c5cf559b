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

from tspline_kernel.errors import (
    DegenerateKnotVector,
    InvalidKnots,
    NotAnAnchor,
    OutsideReducedDomain,
)
from tspline_kernel.meshio import load_mesh
from tspline_kernel.spline import (
    GlobalKnots,
    SplineSpace,
    blending_eval,
    bspline_eval,
    bspline_eval_array,
    elements,
    index_vectors,
    surface_eval,
)
from tspline_kernel.tmesh import IndexDomain

THIS_DIR = Path(__file__).parent
DATA_DIR = THIS_DIR.joinpath("data")


def space_from(name):
    document = load_mesh(DATA_DIR.joinpath(name))
    return SplineSpace.create(document.mesh, document.knots)


def test_uniform_knots():
    knots = GlobalKnots.uniform(IndexDomain(0, 7, 0, 7))
    assert knots.xi == tuple(Fraction(v) for v in range(-3, 5))
    assert knots.reduced_domain == (0, 1, 0, 1)
    assert not knots.has_multiplicities()


def test_open_uniform_knots():
    knots = GlobalKnots.open_uniform(IndexDomain(0, 9, 0, 9))
    assert knots.xi == tuple(Fraction(v) for v in (0, 0, 0, 0, 1, 2, 3, 3, 3, 3))
    assert knots.reduced_domain == (0, 3, 0, 3)
    assert knots.has_multiplicities()
    assert knots.export()["eta"][4] == "1"


@pytest.mark.parametrize(
    "xi",
    [
        (0, 1, 2, 3, 4, 5, 6),
        (0, 1, 2, 3, 4, 5, 4, 7),
        (0, 0, 0, 0, 0, 1, 2, 3),
        (0, 1, 2, 2, 2, 2, 3, 4),
        ("a", 1, 2, 3, 4, 5, 6, 7),
    ],
)
def test_invalid_knots(xi):
    with pytest.raises(InvalidKnots):
        GlobalKnots(IndexDomain(0, 7, 0, 7), xi, tuple(range(8)))


@pytest.mark.parametrize(
    "x,deriv,expected",
    [
        (0, 0, Fraction(0)),
        (1, 0, Fraction(1, 6)),
        (2, 0, Fraction(2, 3)),
        (3, 0, Fraction(1, 6)),
        (Fraction(1, 2), 0, Fraction(1, 48)),
        (1, 1, Fraction(1, 2)),
        (2, 1, Fraction(0)),
        (3, 1, Fraction(-1, 2)),
        (2, 2, Fraction(-2)),
        (4, 0, Fraction(0)),
    ],
)
def test_uniform_bspline_values(x, deriv, expected):
    value = bspline_eval((0, 1, 2, 3, 4), x, deriv)
    assert isinstance(value, Fraction)
    assert value == expected


def test_bspline_float_matches_exact():
    knots = (Fraction(0), Fraction(1, 3), Fraction(1), Fraction(2), Fraction(7, 2))
    for x in (Fraction(1, 5), Fraction(4, 5), Fraction(3, 2), Fraction(3)):
        exact = bspline_eval(knots, x)
        approx = bspline_eval(tuple(float(k) for k in knots), float(x))
        assert approx == pytest.approx(float(exact), abs=1e-14)
    array = bspline_eval_array(knots, np.array([0.2, 0.8, 1.5, 3.0]))
    assert array.shape == (4,)
    assert array[2] == pytest.approx(float(bspline_eval(knots, Fraction(3, 2))))


def test_bspline_left_limit_at_right_end():
    knots = (2, 3, 3, 3, 3)
    assert bspline_eval(knots, 3) == 0
    assert bspline_eval(knots, 3, from_left=True) == 1
    assert bspline_eval_array(knots, [3.0], right_end=3)[0] == 1.0


def test_degenerate_local_knots():
    with pytest.raises(DegenerateKnotVector):
        bspline_eval((1, 1, 1, 1, 1), 1)
    with pytest.raises(InvalidKnots):
        bspline_eval((0, 1, 2), 1)
    with pytest.raises(ValueError):
        bspline_eval((0, 1, 2, 3, 4), 1, deriv=4)


def test_index_vectors():
    mesh = load_mesh(DATA_DIR.joinpath("single_tj.tmesh")).mesh
    assert index_vectors(mesh, (4, 3)) == ((2, 3, 4, 6, 7), (1, 2, 3, 4, 5))
    assert index_vectors(mesh, (5, 6)) == ((3, 4, 5, 6, 7), (4, 5, 6, 7, 8))
    with pytest.raises(NotAnAnchor):
        index_vectors(mesh, (1, 1))
    with pytest.raises(NotAnAnchor):
        index_vectors(mesh, (5, 3))


def test_anchor_function_support():
    space = space_from("single_tj.tmesh")
    function = space.function((4, 3))
    assert function.xi_local == (-1, 0, 1, 3, 4)
    assert function.eta_local == (-2, -1, 0, 1, 2)
    assert function.support == (-1, 4, -2, 2)
    assert function.support_meets(0, 1, 0, 1)
    assert not function.support_meets(4, 5, 0, 1)
    with pytest.raises(NotAnAnchor):
        space.function((0, 0))


@pytest.mark.parametrize(
    "name,count",
    [("bezier.tmesh", 16), ("tensor.tmesh", 36), ("single_tj.tmesh", 40), ("coarse.tmesh", 36)],
)
def test_space_size(name, count):
    space = space_from(name)
    assert len(space.functions) == count
    assert space.collocation_rank() == count


@pytest.mark.parametrize(
    "name,point",
    [
        ("bezier.tmesh", (Fraction(7, 2), Fraction(10, 3))),
        ("tensor.tmesh", (Fraction(3), Fraction(3))),
        ("tensor.tmesh", (Fraction(0), Fraction(5, 4))),
        ("single_tj.tmesh", (Fraction(1, 3), Fraction(5, 2))),
        ("single_tj.tmesh", (Fraction(4), Fraction(3))),
    ],
)
def test_exact_partition_of_unity(name, point):
    space = space_from(name)
    total = sum(blending_eval(space, anchor, *point) for anchor in space.anchors)
    assert total == 1


def test_vectorised_partition_of_unity():
    space = space_from("single_tj.tmesh")
    xs, ys = space.sample_grid(20)
    sums = space.evaluate_all(xs, ys).sum(axis=0)
    np.testing.assert_allclose(sums, 1.0, atol=1e-12)
    derivative = space.evaluate_all(xs, ys, dxi=1).sum(axis=0)
    np.testing.assert_allclose(derivative, 0.0, atol=1e-10)


def test_outside_reduced_domain():
    space = space_from("bezier.tmesh")
    with pytest.raises(OutsideReducedDomain):
        blending_eval(space, (3, 3), Fraction(5), Fraction(3))
    assert not space.contains(2, 3)


def test_elements():
    assert len(elements(space_from("bezier.tmesh"))) == 1
    single = elements(space_from("single_tj.tmesh"))
    assert len(single) == 12
    assert single[0].diameter == pytest.approx(np.sqrt(2))
    tensor = elements(space_from("tensor.tmesh"))
    assert len(tensor) == 9


def test_surface_reproduces_parameters():
    space = space_from("tensor.tmesh")
    greville = {}
    for function in space.functions:
        greville[function.anchor] = (
            float(sum(function.xi_local[1:4]) / 3),
            float(sum(function.eta_local[1:4]) / 3),
        )
    point = surface_eval(space, greville, Fraction(5, 4), Fraction(1, 2))
    np.testing.assert_allclose(point, [1.25, 0.5], atol=1e-12)
