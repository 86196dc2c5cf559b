#!/usr/bin/env python
# -*- coding: UTF-8 -*-
#
# Copyright 2025 NXP
#
# SPDX-License-Identifier: BSD-3-Clause
from fractions import Fraction

import pytest

from tspline_kernel.config import OutputFormat, RunConfig, load_defaults


def test_defaults():
    defaults = load_defaults()
    assert defaults["delta"] == "1/1024"
    assert defaults["fuzz"]["workers"] is None
    cfg = RunConfig.load_from_config({})
    assert cfg.delta == Fraction(1, 1024)
    assert cfg.recheck_delta == Fraction(1, 4096)
    assert cfg.output_format is OutputFormat.TEXT
    assert cfg.fd_step == 1e-6
    assert cfg.fuzz.unity_tolerance == 1e-12
    assert cfg.fuzz.workers is None


def test_overrides():
    cfg = RunConfig.load_from_config(
        {
            "delta": "1/64",
            "output_format": "tsv",
            "tolerances": {"unity": 1e-9},
            "fuzz": {"side_max": 12, "workers": 2},
        }
    )
    assert cfg.delta == Fraction(1, 64)
    assert cfg.output_format is OutputFormat.TSV
    assert cfg.fuzz.dual_tolerance == 1e-10
    assert cfg.fuzz.side_max == 12
    assert cfg.fuzz.side_min == 9
    assert cfg.fuzz.workers == 2
    assert cfg.fuzz.unity_tolerance == 1e-9


@pytest.mark.parametrize(
    "cfg",
    [{"delta": 0}, {"delta": "-1/2"}, {"recheck_delta": "a"}, {"output_format": "svg"}],
)
def test_invalid_values(cfg):
    with pytest.raises(ValueError):
        RunConfig.load_from_config(cfg)


def test_load_from_toml(tmp_path):
    toml = tmp_path.joinpath("pyproject.toml")
    toml.write_text(
        '[project]\nname = "mesh-study"\n\n'
        '[tool.tspline_kernel]\ndelta = "1/256"\nseed = 42\n\n'
        "[tool.tspline_kernel.fuzz]\ngrid = 12\n",
        encoding="utf-8",
    )
    cfg = RunConfig.load_from_toml(toml)
    assert cfg.delta == Fraction(1, 256)
    assert cfg.seed == 42
    assert cfg.fuzz.grid == 12


def test_load_from_toml_without_section(tmp_path):
    toml = tmp_path.joinpath("pyproject.toml")
    toml.write_text('[project]\nname = "mesh-study"\n', encoding="utf-8")
    assert RunConfig.load_from_toml(toml) == RunConfig.load_from_config({})
    assert RunConfig.load_from_toml(tmp_path.joinpath("absent.toml")).seed == 1
