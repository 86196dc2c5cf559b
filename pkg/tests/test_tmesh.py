#!/usr/bin/env python
# -*- coding: UTF-8 -*-
#
# Copyright 2025 NXP
#
# SPDX-License-Identifier: BSD-3-Clause
from pathlib import Path

import pytest

from tspline_kernel.errors import (
    DanglingEdge,
    InvalidDomain,
    SpanOutOfDomain,
    VertexNotOnSkeleton,
)
from tspline_kernel.meshio import load_mesh
from tspline_kernel.tmesh import (
    IndexDomain,
    LineRef,
    Orientation,
    Symbol,
    SymbolicMesh,
    TJunction,
    anchors,
    build_tmesh,
    from_symbolic,
    segment_counts,
    symbolic,
    t_junctions,
    tensor_mesh,
    trace_indices,
    validate_admissible,
)

THIS_DIR = Path(__file__).parent
DATA_DIR = THIS_DIR.joinpath("data")


def full_lines(domain: IndexDomain, skip_rows=(), skip_columns=()):
    rows = range(domain.n_lo, domain.n_hi + 1)
    columns = range(domain.m_lo, domain.m_hi + 1)
    h_lines = [(j, domain.m_lo, domain.m_hi) for j in rows if j not in skip_rows]
    v_lines = [(i, domain.n_lo, domain.n_hi) for i in columns if i not in skip_columns]
    return h_lines, v_lines


@pytest.mark.parametrize(
    "side,vertices",
    [(7, 64), (9, 100)],
)
def test_tensor_grid(side, vertices):
    mesh = tensor_mesh(IndexDomain(0, side, 0, side))
    assert len(mesh.vertices) == vertices
    assert t_junctions(mesh) == []
    assert segment_counts(mesh) == (side + 1, side + 1)
    assert len(mesh.faces) == side * side
    assert validate_admissible(mesh).admissible


def test_build_matches_tensor_mesh():
    domain = IndexDomain(0, 7, 0, 7)
    assert build_tmesh(domain, *full_lines(domain)) == tensor_mesh(domain)


def test_single_tjunction():
    mesh = load_mesh(DATA_DIR.joinpath("single_tj.tmesh")).mesh
    assert t_junctions(mesh) == [TJunction((5, 4), Symbol.BOT)]
    assert len(mesh.vertices) == 106
    assert len(anchors(mesh)) == 40
    assert segment_counts(mesh) == (10, 11)
    report = validate_admissible(mesh)
    assert [condition.passed for condition in report.conditions] == [True, True, True]


def test_inputs_are_unioned():
    domain = IndexDomain(0, 7, 0, 7)
    h_lines, v_lines = full_lines(domain)
    mesh = build_tmesh(domain, h_lines + [(3, 0, 4), (3, 2, 7)], v_lines)
    assert mesh == tensor_mesh(domain)


def test_missing_frame_line():
    domain = IndexDomain(0, 10, 0, 9)
    mesh = build_tmesh(domain, *full_lines(domain, skip_rows=(1,)))
    report = validate_admissible(mesh)
    assert not report.admissible
    assert not report.frame_lines.passed
    assert report.frame_lines.witnesses == [LineRef(Orientation.HORIZONTAL, 1)]
    assert report.active_lines.passed
    assert report.element_boundaries.passed


def test_missing_active_line():
    domain = IndexDomain(0, 10, 0, 9)
    mesh = build_tmesh(domain, *full_lines(domain, skip_columns=(7,)))
    report = validate_admissible(mesh)
    assert report.frame_lines.passed
    assert report.active_lines.witnesses == [LineRef(Orientation.VERTICAL, 7)]


def test_dangling_edge():
    domain = IndexDomain(0, 9, 0, 9)
    with pytest.raises(DanglingEdge):
        build_tmesh(domain, [(2, 0, 4)], [])


def test_span_out_of_domain():
    domain = IndexDomain(0, 9, 0, 9)
    with pytest.raises(SpanOutOfDomain):
        build_tmesh(domain, [(3, 0, 12)], [])


def test_domain_too_small():
    with pytest.raises(InvalidDomain):
        IndexDomain(0, 6, 0, 9)
    with pytest.raises(InvalidDomain):
        IndexDomain.parse([0, 9, 0])


def test_trace_indices():
    mesh = load_mesh(DATA_DIR.joinpath("single_tj.tmesh")).mesh
    assert trace_indices(mesh, (4, 3), Orientation.HORIZONTAL) == [0, 1, 2, 3, 4, 6, 7, 8, 9, 10]
    assert trace_indices(mesh, (4, 6), Orientation.HORIZONTAL) == list(range(11))
    assert trace_indices(mesh, (5, 6), Orientation.VERTICAL) == list(range(10))


def test_trace_off_skeleton():
    mesh = load_mesh(DATA_DIR.joinpath("crossing.tmesh")).mesh
    with pytest.raises(VertexNotOnSkeleton):
        trace_indices(mesh, (6, 6), Orientation.HORIZONTAL)


@pytest.mark.parametrize("name", ["single_tj.tmesh", "crossing.tmesh", "coarse.tmesh"])
def test_symbolic_round_trip(name):
    mesh = load_mesh(DATA_DIR.joinpath(name)).mesh
    sym = symbolic(mesh)
    assert from_symbolic(sym) == mesh
    parsed = SymbolicMesh.parse(mesh.domain, str(sym))
    assert from_symbolic(parsed) == mesh


def test_symbols():
    mesh = load_mesh(DATA_DIR.joinpath("crossing.tmesh")).mesh
    sym = symbolic(mesh)
    assert sym[(6, 7)] is Symbol.BOT
    assert sym[(7, 6)] is Symbol.VDASH
    assert sym[(6, 6)] is Symbol.EMPTY
    assert sym[(6, 3)] is Symbol.HORIZONTAL_EDGE
    assert sym[(0, 6)] is Symbol.VERTICAL_EDGE
    assert sym[(0, 0)] is Symbol.PLUS
    assert len(sym.rows()) == 13
    assert sym.rows()[0] == "+" * 13


def test_submesh():
    coarse = load_mesh(DATA_DIR.joinpath("coarse.tmesh")).mesh
    fine = load_mesh(DATA_DIR.joinpath("single_tj.tmesh")).mesh
    assert coarse.is_submesh_of(fine)
    assert not fine.is_submesh_of(coarse)
    assert fine.is_submesh_of(fine)


def test_segments_on_partial_line():
    mesh = load_mesh(DATA_DIR.joinpath("single_tj.tmesh")).mesh
    (segment,) = mesh.segments_on(Orientation.VERTICAL, 5)
    assert (segment.lo, segment.hi) == (4, 9)
    assert segment.vertices[0] == (5, 4)
    assert mesh.segment_of((5, 4), Orientation.VERTICAL) == segment
    assert mesh.segment_ordinal((5, 6), Orientation.VERTICAL) == 0
