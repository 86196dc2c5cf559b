#!/usr/bin/env python
# -*- coding: UTF-8 -*-
#
# Copyright 2025 NXP
#
# SPDX-License-Identifier: BSD-3-Clause

"""Bicubic T-spline spaces on index T-meshes."""

__author__ = """NXP"""
__version__ = "0.1.0"

from .errors import TSplineError
from .extension import ExtendedTMesh, extend, is_analysis_suitable
from .spline import GlobalKnots, SplineSpace
from .tmesh import IndexDomain, TMesh, build_tmesh, validate_admissible

__all__ = [
    "ExtendedTMesh",
    "GlobalKnots",
    "IndexDomain",
    "SplineSpace",
    "TMesh",
    "TSplineError",
    "build_tmesh",
    "extend",
    "is_analysis_suitable",
    "validate_admissible",
]
