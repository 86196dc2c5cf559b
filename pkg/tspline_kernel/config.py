#!/usr/bin/env python
# -*- coding: utf-8 -*-
#
# Copyright 2025 NXP
#
# SPDX-License-Identifier: BSD-3-Clause

"""Runtime configuration: packaged defaults with project overrides."""

import logging
import os
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Optional, Union, cast

import tomli
from typing_extensions import Self
from yaml import safe_load

from .fuzz import FuzzParameters

logger = logging.getLogger(__name__)

THIS_DIR = Path(__file__).parent
TOML_SECTION = "tspline_kernel"


class OutputFormat(str, Enum):
    """Format of command results."""

    TEXT = "text"
    TSV = "tsv"


def load_defaults() -> Dict[str, Any]:
    """Load the packaged default configuration.

    :return: Default configuration.
    """
    cfg_content = THIS_DIR.joinpath("default_cfg.yaml").read_text(encoding="utf-8")
    return cast(Dict[str, Any], safe_load(cfg_content))


def _positive_fraction(name: str, value: Any) -> Fraction:
    try:
        result = Fraction(str(value))
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"Invalid value of '{name}': {value} ({exc})") from exc
    if result <= 0:
        raise ValueError(f"Value of '{name}' must be positive, got {value}")
    return result


@dataclass
class RunConfig:
    """Configuration of one tool run."""

    delta: Fraction = Fraction(1, 1024)
    recheck_delta: Fraction = Fraction(1, 4096)
    coefficient: Fraction = Fraction(1)
    sample_density: int = 100
    verification_grid: int = 60
    quadrature_order: int = 5
    fd_step: float = 1e-6
    seed: int = 1
    output_format: OutputFormat = OutputFormat.TEXT
    fuzz: FuzzParameters = field(default_factory=FuzzParameters)

    @classmethod
    def load_from_config(cls, cfg: Dict[str, Any]) -> Self:
        """Load the configuration from a dictionary, missing values taken from the defaults.

        :param cfg: Dictionary with configuration.
        :return: Run configuration.
        :raises ValueError: Invalid value in the configuration.
        """
        defaults = load_defaults()
        merged = {**defaults, **cfg}
        tolerances = {**defaults.get("tolerances", {}), **cfg.get("tolerances", {})}
        fuzz_cfg = {**defaults.get("fuzz", {}), **cfg.get("fuzz", {})}
        fuzz_cfg.setdefault("unity_tolerance", tolerances["unity"])
        fuzz_cfg.setdefault("dual_tolerance", tolerances["biorthogonality"])
        fuzz_cfg.setdefault("reproduction_tolerance", tolerances["reproduction"])
        try:
            output_format = OutputFormat(merged["output_format"])
        except ValueError as exc:
            raise ValueError(f"Invalid output format: {merged['output_format']} ({exc})") from exc
        return cls(
            delta=_positive_fraction("delta", merged["delta"]),
            recheck_delta=_positive_fraction("recheck_delta", merged["recheck_delta"]),
            coefficient=Fraction(str(merged["coefficient"])),
            sample_density=int(merged["sample_density"]),
            verification_grid=int(merged["verification_grid"]),
            quadrature_order=int(merged["quadrature_order"]),
            fd_step=float(merged["fd_step"]),
            seed=int(merged["seed"]),
            output_format=output_format,
            fuzz=FuzzParameters.load_from_config(fuzz_cfg),
        )

    @classmethod
    def load_from_toml(cls, path: Optional[Union[str, Path]] = None) -> Self:
        """Load the configuration from ``[tool.tspline_kernel]`` of a project TOML.

        :param path: Path to pyproject.toml, the one in the working directory when omitted.
        :return: Run configuration, defaults when the file or section is missing.
        """
        toml_path = Path(path) if path else Path(os.getcwd(), "pyproject.toml")
        if toml_path.exists():
            with open(toml_path, "rb") as f:
                toml = tomli.load(f)
            section = toml.get("tool", {}).get(TOML_SECTION)
            if section:
                logger.debug(f"Configuration loaded from {toml_path}")
                return cls.load_from_config(section)
        return cls.load_from_config({})
