#!/usr/bin/env python
# -*- coding: utf-8 -*-
#
# Copyright 2025 NXP
#
# SPDX-License-Identifier: BSD-3-Clause

"""SVG pictures of index meshes, extended meshes and blending functions."""

import logging
import xml.etree.ElementTree as ET
from typing import Callable, Optional, Tuple

import numpy as np

from .extension import ExtendedTMesh, VertexClass
from .spline import SplineSpace
from .tmesh import Orientation, Point, TMesh

logger = logging.getLogger(__name__)

SVG_NAMESPACE = "http://www.w3.org/2000/svg"
SCALE = 40.0
MARGIN = 20.0
MARKER_SIZE = 5.0

# colour code of the vertex classes
STYLES = {
    "active": {"fill": "none", "stroke": "black"},
    "tjunction": {"fill": "red", "stroke": "red"},
    "crossing": {"fill": "red", "stroke": "red"},
    "overlap": {"fill": "green", "stroke": "green"},
    "extended": {"fill": "black", "stroke": "black"},
    "inactive": {"fill": "grey", "stroke": "grey"},
}


def _root(width: float, height: float) -> ET.Element:
    return ET.Element(
        "svg",
        xmlns=SVG_NAMESPACE,
        version="1.1",
        width=f"{width:.1f}",
        height=f"{height:.1f}",
        viewBox=f"0 0 {width:.1f} {height:.1f}",
    )


class _Canvas:
    """Maps mesh coordinates onto picture coordinates."""

    def __init__(self, x_lo: float, x_hi: float, y_lo: float, y_hi: float, scale: float) -> None:
        self.x_lo = x_lo
        self.y_hi = y_hi
        self.scale = scale
        self.width = (x_hi - x_lo) * scale + 2 * MARGIN
        self.height = (y_hi - y_lo) * scale + 2 * MARGIN
        self.svg = _root(self.width, self.height)

    def point(self, x: float, y: float) -> Tuple[float, float]:
        """Picture coordinates, y axis pointing up."""
        return MARGIN + (x - self.x_lo) * self.scale, MARGIN + (self.y_hi - y) * self.scale

    def group(self, name: str) -> ET.Element:
        """New group with a class name."""
        return ET.SubElement(self.svg, "g", {"class": name})

    def line(
        self,
        parent: ET.Element,
        start: Tuple[float, float],
        end: Tuple[float, float],
        **style: str,
    ) -> None:
        """Add a line segment."""
        x1, y1 = self.point(*start)
        x2, y2 = self.point(*end)
        ET.SubElement(
            parent, "line", x1=f"{x1:.2f}", y1=f"{y1:.2f}", x2=f"{x2:.2f}", y2=f"{y2:.2f}", **style
        )

    def text(self) -> str:
        """Serialized document."""
        return ET.tostring(self.svg, encoding="unicode")


def _marker(parent: ET.Element, kind: str, x: float, y: float, vertex: Point) -> None:
    style = dict(STYLES[kind])
    attributes = {"class": f"vertex {kind}", "data-vertex": f"{vertex[0]},{vertex[1]}", **style}
    r = MARKER_SIZE
    if kind == "crossing":
        corners = []
        for k in range(10):
            radius = r * 1.4 if k % 2 == 0 else r * 0.6
            angle = np.pi / 2 + k * np.pi / 5
            corners.append(f"{x + radius * np.cos(angle):.2f},{y - radius * np.sin(angle):.2f}")
        ET.SubElement(parent, "polygon", points=" ".join(corners), **attributes)
    elif kind == "overlap":
        triangle = [(x, y - r * 1.2), (x - r * 1.1, y + r * 0.8), (x + r * 1.1, y + r * 0.8)]
        points = " ".join(f"{a:.2f},{b:.2f}" for a, b in triangle)
        ET.SubElement(parent, "polygon", points=points, **attributes)
    elif kind == "extended":
        side = f"{2 * r:.2f}"
        corner = {"x": f"{x - r:.2f}", "y": f"{y - r:.2f}", "width": side, "height": side}
        ET.SubElement(parent, "rect", **corner, **attributes)
    else:
        ET.SubElement(parent, "circle", cx=f"{x:.2f}", cy=f"{y:.2f}", r=f"{r:.2f}", **attributes)


def _marker_kind(extended: ExtendedTMesh, vertex: Point) -> str:
    vertex_class = extended.classification[vertex]
    if vertex_class is VertexClass.ACTIVE:
        return "tjunction" if vertex in extended.tjunction_vertices else "active"
    if vertex_class is VertexClass.EXTENDED and vertex in extended.base.vertices:
        return "inactive"
    return vertex_class.value


def render_mesh(mesh: TMesh, extended: Optional[ExtendedTMesh] = None, scale: float = SCALE) -> str:
    """Index-space picture of a mesh, with extensions and vertex classes when given."""
    d = mesh.domain
    canvas = _Canvas(d.m_lo, d.m_hi, d.n_lo, d.n_hi, scale)
    edges = canvas.group("edges")
    for edge in mesh.edges:
        start, end = _edge_points(edge.orientation, edge.line, edge.lo, edge.hi)
        canvas.line(edges, start, end, stroke="black", **{"stroke-width": "1.5"})
    if extended is None:
        vertices = canvas.group("vertices")
        for vertex in sorted(mesh.vertices):
            x, y = canvas.point(*vertex)
            ET.SubElement(vertices, "circle", cx=f"{x:.2f}", cy=f"{y:.2f}", r="2", fill="black")
        return canvas.text()
    extensions = canvas.group("extensions")
    for extension in extended.extensions:
        orientation, line = extension.orientation, extension.line
        start, end = _edge_points(orientation, line, extension.face_lo, extension.face_hi)
        canvas.line(extensions, start, end, stroke="red", **{"stroke-dasharray": "4 2"})
        start, end = _edge_points(orientation, line, extension.edge_lo, extension.edge_hi)
        canvas.line(extensions, start, end, stroke="orange", **{"stroke-dasharray": "2 2"})
    markers = canvas.group("vertices")
    for vertex in sorted(extended.classification):
        x, y = canvas.point(*vertex)
        _marker(markers, _marker_kind(extended, vertex), x, y, vertex)
    logger.debug(f"Rendered {len(extended.classification)} classified vertices")
    return canvas.text()


def _edge_points(
    orientation: Orientation, line: int, lo: float, hi: float
) -> Tuple[Tuple[float, float], Tuple[float, float]]:
    if orientation is Orientation.HORIZONTAL:
        return (lo, line), (hi, line)
    return (line, lo), (line, hi)


def render_parametric(
    space: SplineSpace,
    function: Optional[Callable[[np.ndarray, np.ndarray], np.ndarray]] = None,
    resolution: int = 64,
) -> str:
    """Parametric picture of the evaluation domain, optionally over a grayscale raster.

    :param space: Spline space.
    :param function: Vectorised function drawn as raster, values clipped to ``[0, 1]``.
    :param resolution: Raster cells per direction.
    """
    xi_lo, xi_hi, eta_lo, eta_hi = (float(v) for v in space.reduced_domain)
    extent = max(xi_hi - xi_lo, eta_hi - eta_lo) or 1.0
    canvas = _Canvas(xi_lo, xi_hi, eta_lo, eta_hi, 400.0 / extent)
    if function is not None:
        raster = canvas.group("raster")
        ticks_x = np.linspace(xi_lo, xi_hi, resolution + 1)
        ticks_y = np.linspace(eta_lo, eta_hi, resolution + 1)
        centres_x = (ticks_x[:-1] + ticks_x[1:]) / 2
        centres_y = (ticks_y[:-1] + ticks_y[1:]) / 2
        grid_x, grid_y = np.meshgrid(centres_x, centres_y)
        values = np.clip(np.asarray(function(grid_x.ravel(), grid_y.ravel())), 0.0, 1.0)
        for (row, column), value in zip(np.ndindex(resolution, resolution), values):
            x, y = canvas.point(ticks_x[column], ticks_y[row + 1])
            level = int(round(255 * (1.0 - value)))
            ET.SubElement(
                raster,
                "rect",
                x=f"{x:.2f}",
                y=f"{y:.2f}",
                width=f"{(ticks_x[1] - ticks_x[0]) * canvas.scale + 0.5:.2f}",
                height=f"{(ticks_y[1] - ticks_y[0]) * canvas.scale + 0.5:.2f}",
                fill=f"rgb({level},{level},{level})",
            )
    knots = space.knots
    lines = canvas.group("elements")
    for edge in space.extended.ext_mesh.edges:
        if edge.orientation is Orientation.HORIZONTAL:
            y = float(knots.eta_at(edge.line))
            lo, hi = float(knots.xi_at(edge.lo)), float(knots.xi_at(edge.hi))
            lo, hi = max(lo, xi_lo), min(hi, xi_hi)
            if eta_lo <= y <= eta_hi and lo < hi:
                canvas.line(lines, (lo, y), (hi, y), stroke="blue")
        else:
            x = float(knots.xi_at(edge.line))
            lo, hi = float(knots.eta_at(edge.lo)), float(knots.eta_at(edge.hi))
            lo, hi = max(lo, eta_lo), min(hi, eta_hi)
            if xi_lo <= x <= xi_hi and lo < hi:
                canvas.line(lines, (x, lo), (x, hi), stroke="blue")
    return canvas.text()
