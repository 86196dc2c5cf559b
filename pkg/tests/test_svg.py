#!/usr/bin/env python
# -*- coding: UTF-8 -*-
#
# Copyright 2025 NXP
#
# SPDX-License-Identifier: BSD-3-Clause
from collections import Counter
from pathlib import Path

from defusedxml.ElementTree import fromstring

from tspline_kernel.extension import extend
from tspline_kernel.meshio import load_mesh
from tspline_kernel.spline import SplineSpace
from tspline_kernel.svg import SVG_NAMESPACE, render_mesh, render_parametric

THIS_DIR = Path(__file__).parent
DATA_DIR = THIS_DIR.joinpath("data")
NS = {"svg": SVG_NAMESPACE}


def group(root, name):
    return root.find(f"svg:g[@class='{name}']", NS)


def marker_kinds(root):
    return Counter(element.get("class").split()[1] for element in group(root, "vertices"))


def test_plain_mesh():
    mesh = load_mesh(DATA_DIR.joinpath("single_tj.tmesh")).mesh
    root = fromstring(render_mesh(mesh))
    assert root.tag == f"{{{SVG_NAMESPACE}}}svg"
    assert len(group(root, "edges")) == len(mesh.edges)
    assert len(group(root, "vertices")) == 106
    assert group(root, "extensions") is None


def test_one_marker_per_classified_vertex():
    mesh = load_mesh(DATA_DIR.joinpath("single_tj.tmesh")).mesh
    extended = extend(mesh)
    root = fromstring(render_mesh(mesh, extended))
    markers = list(group(root, "vertices"))
    assert len(markers) == len(extended.classification) == 108
    kinds = marker_kinds(root)
    assert kinds["tjunction"] == 1
    assert kinds["active"] == 39
    assert kinds["crossing"] == kinds["overlap"] == 0
    assert kinds["extended"] == 2
    assert kinds["inactive"] == 66
    assert len(group(root, "extensions")) == 2
    tagged = {element.get("data-vertex"): element for element in markers}
    assert tagged["5,4"].get("class") == "vertex tjunction"
    assert tagged["5,3"].tag == f"{{{SVG_NAMESPACE}}}rect"


def test_crossing_marker():
    mesh = load_mesh(DATA_DIR.joinpath("crossing.tmesh")).mesh
    root = fromstring(render_mesh(mesh, extend(mesh)))
    (star,) = [e for e in group(root, "vertices") if e.get("class") == "vertex crossing"]
    assert star.get("data-vertex") == "6,6"
    assert star.tag == f"{{{SVG_NAMESPACE}}}polygon"
    assert len(star.get("points").split()) == 10


def test_parametric_picture():
    doc = load_mesh(DATA_DIR.joinpath("bezier.tmesh"))
    space = SplineSpace.create(doc.mesh, doc.knots)
    root = fromstring(
        render_parametric(space, lambda xi, eta: space.evaluate_all(xi, eta)[0], resolution=16)
    )
    assert len(group(root, "raster")) == 256
    assert len(group(root, "elements")) == 4
    assert group(fromstring(render_parametric(space)), "raster") is None
