#!/usr/bin/env python
# -*- coding: utf-8 -*-
#
# Copyright 2025 NXP
#
# SPDX-License-Identifier: BSD-3-Clause

"""Errors used in the T-spline kernel."""

from typing import Optional


class TSplineError(Exception):
    """Base T-spline kernel error."""


class InvalidDomain(TSplineError):
    """Index domain is too small to hold the frame and active region lines."""


class SpanOutOfDomain(TSplineError):
    """Line span lies (partly) outside of the index domain."""


class DanglingEdge(TSplineError):
    """Skeleton point that no rectangular partition admits (valence one or bent corner)."""


class VertexNotOnSkeleton(TSplineError):
    """Queried point does not lie on the mesh skeleton."""


class InsufficientTrace(TSplineError):
    """Trace around a vertex is too short to pick consecutive indices."""


class NotAnAnchor(TSplineError):
    """Vertex is not an anchor of the mesh."""


class InvalidKnots(TSplineError):
    """Global knot vector is not compatible with the index domain."""


class DegenerateKnotVector(TSplineError):
    """Local knot vector has no non-zero span."""


class OutsideReducedDomain(TSplineError):
    """Evaluation point lies outside of the reduced parametric domain."""


class DerivativesUnavailable(TSplineError):
    """Function can't provide the derivatives a dual functional needs."""


class KnotMultiplicityPresent(TSplineError):
    """Exact assembly requested on knots with repeated values."""


class NegativeCoefficient(TSplineError):
    """Perturbation coefficient is negative."""


class NotASubmesh(TSplineError):
    """First mesh is not contained in the second one."""


class NotAnalysisSuitable(TSplineError):
    """Operation requires an analysis-suitable mesh."""


class NotCertified(TSplineError):
    """Refinement requested for a pair that was not certified as nested."""


class DimensionMismatch(TSplineError):
    """Control points don't match the refinement matrix."""


class UnknownCommand(TSplineError):
    """Command line asked for a sub-command that doesn't exist."""


class MalformedMeshFile(TSplineError):
    """Mesh or control point file can't be parsed."""

    def __init__(
        self, message: str, line: Optional[int] = None, column: Optional[int] = None
    ) -> None:
        """Initialize the error.

        :param message: Description of the problem.
        :param line: One-based line of the problem, if known.
        :param column: One-based column of the problem, if known.
        """
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} (line {line}, column {column or 1})"
        super().__init__(message)
