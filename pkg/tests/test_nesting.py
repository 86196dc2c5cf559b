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
    DimensionMismatch,
    NotAnalysisSuitable,
    NotASubmesh,
    NotCertified,
)
from tspline_kernel.meshio import load_mesh
from tspline_kernel.nesting import (
    Verdict,
    certify_nested,
    compose,
    extended_inclusion,
    knot_insertion_matrix,
    refine_geometry,
    refinement_matrix,
)
from tspline_kernel.spline import GlobalKnots, SplineSpace, bspline_eval, surface_eval
from tspline_kernel.tmesh import IndexDomain, Orientation, build_tmesh

THIS_DIR = Path(__file__).parent
DATA_DIR = THIS_DIR.joinpath("data")


def document(name):
    return load_mesh(DATA_DIR.joinpath(name))


def space_from(name):
    doc = document(name)
    return SplineSpace.create(doc.mesh, doc.knots)


def shortened_extension_pair():
    """Without row 5 the extension of the T-junction at (5, 7) reaches row 4."""
    domain = IndexDomain(0, 10, 0, 12)
    v_lines = [(i, 0, 12) for i in range(11) if i != 5] + [(5, 7, 12)]
    coarse = build_tmesh(domain, [(j, 0, 10) for j in range(13) if j != 5], v_lines)
    fine = build_tmesh(domain, [(j, 0, 10) for j in range(13)], v_lines)
    return coarse, fine, GlobalKnots.uniform(domain)


def test_inserted_line_is_nested():
    coarse, fine = document("coarse.tmesh"), document("single_tj.tmesh")
    certificate = certify_nested(coarse.mesh, fine.mesh, coarse.knots, fine.knots)
    assert certificate.verdict is Verdict.NESTED
    assert certificate.nested
    assert certificate.witness is None
    assert str(certificate) == "nested (delta=1/1024, confirmed at 1/4096)"


def test_shortened_extension_is_not_nested():
    coarse, fine, knots = shortened_extension_pair()
    certificate = certify_nested(coarse, fine, knots, knots)
    assert certificate.verdict is Verdict.NOT_NESTED
    assert certificate.witness == (Orientation.VERTICAL, (5, 4))
    assert "missing from the fine extended mesh" in str(certificate)
    assert extended_inclusion(coarse, fine) == (False, (Orientation.VERTICAL, (5, 4)))
    coarse_space, fine_space = SplineSpace.create(coarse, knots), SplineSpace.create(fine, knots)
    with pytest.raises(NotCertified):
        refinement_matrix(coarse_space, fine_space, certificate)


def test_incompatible_pairs():
    coarse, fine = document("coarse.tmesh"), document("single_tj.tmesh")
    with pytest.raises(NotASubmesh):
        certify_nested(fine.mesh, coarse.mesh, fine.knots, coarse.knots)
    shifted = GlobalKnots(fine.knots.domain, tuple(k * 2 for k in fine.knots.xi), fine.knots.eta)
    with pytest.raises(NotASubmesh):
        certify_nested(coarse.mesh, fine.mesh, coarse.knots, shifted)
    crossing = document("crossing.tmesh")
    with pytest.raises(NotAnalysisSuitable):
        certify_nested(crossing.mesh, crossing.mesh, crossing.knots, crossing.knots)


def test_same_space_gives_identity():
    space = space_from("single_tj.tmesh")
    matrix = refinement_matrix(space, space)
    assert matrix.is_identity()
    assert np.array_equal(matrix.to_array(), np.eye(40))


def test_refinement_preserves_the_surface():
    coarse, fine = space_from("coarse.tmesh"), space_from("single_tj.tmesh")
    matrix = refinement_matrix(coarse, fine)
    assert matrix.to_array().shape == (40, 36)
    assert all(value == 1 for value in matrix.row_sums().values())
    points = {a: (float(a[0] * a[1]), float(a[0] - 2 * a[1]), 1.0) for a in coarse.anchors}
    refined = refine_geometry(points, matrix)
    assert len(refined) == 40
    points_in_domain = (
        (Fraction(1, 3), Fraction(5, 2)),
        (Fraction(2), Fraction(1)),
        (Fraction(7, 2), Fraction(3)),
    )
    for xi, eta in points_in_domain:
        np.testing.assert_allclose(
            surface_eval(fine, refined, xi, eta), surface_eval(coarse, points, xi, eta), atol=1e-12
        )


def test_compose_with_identity():
    coarse, fine = space_from("coarse.tmesh"), space_from("single_tj.tmesh")
    matrix = refinement_matrix(coarse, fine)
    composed = compose(matrix, refinement_matrix(fine, fine))
    assert composed.entries == matrix.entries
    with pytest.raises(DimensionMismatch):
        compose(matrix, matrix)


def test_composed_chain_matches_direct_matrix():
    coarse, middle = document("coarse.tmesh").mesh, document("single_tj.tmesh").mesh
    domain = middle.domain
    fine = build_tmesh(domain, [(j, 0, 10) for j in range(10)], [(i, 0, 9) for i in range(11)])
    knots = GlobalKnots.open_uniform(domain)
    spaces = [SplineSpace.create(mesh, knots) for mesh in (coarse, middle, fine)]
    first = refinement_matrix(spaces[0], spaces[1])
    second = refinement_matrix(spaces[1], spaces[2])
    direct = refinement_matrix(spaces[0], spaces[2])
    composed = compose(first, second)
    assert composed.coarse_anchors == direct.coarse_anchors
    assert composed.fine_anchors == direct.fine_anchors
    assert composed.entries == direct.entries
    assert not direct.is_identity()


def test_refine_geometry_checks_points():
    coarse, fine = space_from("coarse.tmesh"), space_from("single_tj.tmesh")
    matrix = refinement_matrix(coarse, fine)
    with pytest.raises(DimensionMismatch):
        refine_geometry({(2, 2): (0.0, 0.0)}, matrix)
    mixed = {a: (0.0, 0.0) for a in coarse.anchors}
    mixed[(2, 2)] = (0.0, 0.0, 0.0)
    with pytest.raises(DimensionMismatch):
        refine_geometry(mixed, matrix)


@pytest.mark.parametrize(
    "inserted",
    [
        (Fraction(7, 2),),
        (Fraction(4),),
        (Fraction(3), Fraction(13, 3)),
        (Fraction(9, 2), Fraction(9, 2)),
    ],
)
def test_knot_insertion_matrix(inserted):
    coarse = [Fraction(k) for k in range(9)]
    fine = sorted(coarse + list(inserted))
    matrix = knot_insertion_matrix(coarse, fine)
    assert len(matrix) == len(fine) - 4
    assert len(matrix[0]) == len(coarse) - 4
    for x in (Fraction(3), Fraction(10, 3), Fraction(4), Fraction(19, 4)):
        for c in range(len(coarse) - 4):
            expected = bspline_eval(coarse[c : c + 5], x)
            value = sum(
                (matrix[r][c] * bspline_eval(fine[r : r + 5], x) for r in range(len(fine) - 4)),
                Fraction(0),
            )
            assert value == expected


def test_knot_insertion_needs_superset():
    with pytest.raises(NotASubmesh):
        knot_insertion_matrix([0, 1, 2, 3, 4, 5], [0, 1, 2, 4, 5, 6])
