#!/usr/bin/env python
# -*- coding: utf-8 -*-
#
# Copyright 2025 NXP
#
# SPDX-License-Identifier: BSD-3-Clause

"""Mesh and control point files.

A mesh file is a YAML mapping::

    index_domain: [0, 10, 0, 9]
    h_lines: [[0, 0, 10], [1, 0, 10]]
    v_lines: [[5, 4, 9]]
    knots_xi: [0, 1, "3/2", 2]
    knots_eta: [0, 1, 2, 3]

Knots are read from the scalar text, so ``"1/3"`` and ``0.1`` are exact. Missing
knot vectors default to uniform integer knots.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Union

import numpy as np
import yaml

from .errors import MalformedMeshFile, TSplineError
from .spline import GlobalKnots, Real
from .tmesh import IndexDomain, LineSpan, Point, TMesh, build_tmesh

logger = logging.getLogger(__name__)

MESH_FIELDS = ("index_domain", "h_lines", "v_lines", "knots_xi", "knots_eta")


@dataclass
class MeshDocument:
    """Mesh with its global knots as read from a file."""

    mesh: TMesh
    knots: GlobalKnots
    source: str = "<string>"


def _error(message: str, node: Optional[yaml.Node] = None) -> MalformedMeshFile:
    if node is None:
        return MalformedMeshFile(message)
    return MalformedMeshFile(message, node.start_mark.line + 1, node.start_mark.column + 1)


def _scalar(node: yaml.Node, what: str) -> str:
    if not isinstance(node, yaml.ScalarNode):
        raise _error(f"{what} must be a scalar", node)
    return node.value


def _integer(node: yaml.Node, what: str) -> int:
    text = _scalar(node, what)
    try:
        return int(text)
    except ValueError as exc:
        raise _error(f"{what} must be an integer, got '{text}' ({exc})", node) from exc


def _rational(node: yaml.Node, what: str) -> Fraction:
    text = _scalar(node, what)
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise _error(f"{what} must be a rational number, got '{text}' ({exc})", node) from exc


def _sequence(node: yaml.Node, what: str) -> List[yaml.Node]:
    if not isinstance(node, yaml.SequenceNode):
        raise _error(f"{what} must be a list", node)
    return list(node.value)


def _spans(node: yaml.Node, what: str) -> List[LineSpan]:
    spans = []
    for item in _sequence(node, what):
        values = _sequence(item, f"entry of {what}")
        if len(values) != 3:
            raise _error(f"Entry of {what} needs [line, lo, hi], got {len(values)} values", item)
        line, lo, hi = (_integer(value, f"entry of {what}") for value in values)
        spans.append((line, lo, hi))
    return spans


def parse_mesh(text: str, source: str = "<string>") -> MeshDocument:
    """Parse a mesh document.

    :param text: YAML text.
    :param source: Name used in messages.
    :return: Mesh and knots.
    :raises MalformedMeshFile: Text is not a valid mesh document.
    """
    try:
        root = yaml.compose(text, Loader=yaml.SafeLoader)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark
        raise MalformedMeshFile(
            f"{source}: invalid YAML ({exc.problem})",
            mark.line + 1 if mark else None,
            mark.column + 1 if mark else None,
        ) from exc
    except yaml.YAMLError as exc:
        raise MalformedMeshFile(f"{source}: invalid YAML ({exc})") from exc
    if not isinstance(root, yaml.MappingNode):
        raise _error(f"{source}: mesh document must be a mapping", root)
    fields: Dict[str, yaml.Node] = {}
    for key_node, value_node in root.value:
        key = _scalar(key_node, "key")
        if key not in MESH_FIELDS:
            raise _error(f"{source}: unknown field '{key}'", key_node)
        fields[key] = value_node
    if "index_domain" not in fields:
        raise _error(f"{source}: field 'index_domain' is missing", root)
    domain_node = fields["index_domain"]
    domain_nodes = _sequence(domain_node, "index_domain")
    domain_values = [_integer(n, "index_domain entry") for n in domain_nodes]
    try:
        domain = IndexDomain.parse(domain_values)
    except TSplineError as exc:
        raise _error(f"{source}: {exc}", domain_node) from exc
    h_lines = _spans(fields["h_lines"], "h_lines") if "h_lines" in fields else []
    v_lines = _spans(fields["v_lines"], "v_lines") if "v_lines" in fields else []
    try:
        mesh = build_tmesh(domain, h_lines, v_lines)
    except TSplineError as exc:
        raise _error(f"{source}: {exc}", root) from exc

    uniform = GlobalKnots.uniform(domain)
    xi = uniform.xi
    eta = uniform.eta
    if "knots_xi" in fields:
        xi = tuple(_rational(n, "knot") for n in _sequence(fields["knots_xi"], "knots_xi"))
    if "knots_eta" in fields:
        eta = tuple(_rational(n, "knot") for n in _sequence(fields["knots_eta"], "knots_eta"))
    try:
        knots = GlobalKnots(domain, xi, eta)
    except TSplineError as exc:
        raise _error(f"{source}: {exc}", fields.get("knots_xi", root)) from exc
    logger.debug(f"Parsed mesh {mesh!r} from {source}")
    return MeshDocument(mesh, knots, source)


def load_mesh(path: Union[str, Path]) -> MeshDocument:
    """Read a mesh file.

    :raises MalformedMeshFile: File cannot be read or parsed.
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise MalformedMeshFile(f"Cannot read mesh file {path} ({exc})") from exc
    return parse_mesh(text, str(path))


def _knot_value(value: Fraction) -> Union[int, str]:
    return value.numerator if value.denominator == 1 else str(value)


def dump_mesh(
    mesh: TMesh, knots: Optional[GlobalKnots] = None, comments: Iterable[str] = ()
) -> str:
    """Mesh document text, optionally preceded by comment lines."""
    h_lines, v_lines = mesh.lines()
    d = mesh.domain
    data: Dict[str, object] = {
        "index_domain": [d.m_lo, d.m_hi, d.n_lo, d.n_hi],
        "h_lines": [list(span) for span in h_lines],
        "v_lines": [list(span) for span in v_lines],
    }
    if knots is not None:
        data["knots_xi"] = [_knot_value(v) for v in knots.xi]
        data["knots_eta"] = [_knot_value(v) for v in knots.eta]
    header = "".join(f"# {line}\n" for line in comments)
    return header + yaml.safe_dump(data, sort_keys=False, default_flow_style=None)


def save_mesh(
    path: Union[str, Path],
    mesh: TMesh,
    knots: Optional[GlobalKnots] = None,
    comments: Iterable[str] = (),
) -> None:
    """Write a mesh file."""
    Path(path).write_text(dump_mesh(mesh, knots, comments), encoding="utf-8")


def format_number(value: Real) -> str:
    """Exact text for rationals, 17 significant digits for floats."""
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, int):
        return str(value)
    return f"{float(value):.17g}"


def parse_control_points(text: str, source: str = "<string>") -> Dict[Point, np.ndarray]:
    """Parse control points, one ``i j x y z`` row per anchor, ``#`` starts a comment.

    :raises MalformedMeshFile: Malformed row.
    """
    points: Dict[Point, np.ndarray] = {}
    width: Optional[int] = None
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        tokens = line.split()
        if len(tokens) < 3:
            raise MalformedMeshFile(f"{source}: row needs an anchor and coordinates", number, 1)
        try:
            anchor = (int(tokens[0]), int(tokens[1]))
        except ValueError as exc:
            raise MalformedMeshFile(
                f"{source}: anchor indices must be integers ({exc})", number, 1
            ) from exc
        coordinates = []
        for token in tokens[2:]:
            try:
                coordinates.append(float(Fraction(token)))
            except (ValueError, ZeroDivisionError) as exc:
                raise MalformedMeshFile(
                    f"{source}: '{token}' is not a number ({exc})", number, raw.find(token) + 1
                ) from exc
        if width is None:
            width = len(coordinates)
        elif width != len(coordinates):
            raise MalformedMeshFile(f"{source}: expected {width} coordinates", number, 1)
        if anchor in points:
            raise MalformedMeshFile(f"{source}: anchor {anchor} given twice", number, 1)
        points[anchor] = np.array(coordinates)
    return points


def load_control_points(path: Union[str, Path]) -> Dict[Point, np.ndarray]:
    """Read a control point file."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise MalformedMeshFile(f"Cannot read control point file {path} ({exc})") from exc
    return parse_control_points(text, str(path))


def dump_control_points(points: Mapping[Point, Sequence[float]]) -> str:
    """Control point text, anchors sorted by row then column."""
    rows = []
    for anchor in sorted(points, key=lambda p: (p[1], p[0])):
        coordinates = " ".join(format_number(float(c)) for c in points[anchor])
        rows.append(f"{anchor[0]} {anchor[1]} {coordinates}")
    return "\n".join(rows) + "\n"
