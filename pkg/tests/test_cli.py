#!/usr/bin/env python
# -*- coding: UTF-8 -*-
#
# Copyright 2025 NXP
#
# SPDX-License-Identifier: BSD-3-Clause

"""Tests for the `tsplinetool` command line."""

from fractions import Fraction
from pathlib import Path

import pytest
from click.testing import CliRunner
from defusedxml.ElementTree import fromstring

from tspline_kernel import __version__
from tspline_kernel.__main__ import main
from tspline_kernel.meshio import load_mesh

THIS_DIR = Path(__file__).parent
DATA_DIR = THIS_DIR.joinpath("data")


def data(name):
    return str(DATA_DIR.joinpath(name))


@pytest.fixture(autouse=True)
def default_config(tmp_path, monkeypatch):
    """Run every command outside of any project so the packaged defaults apply."""
    monkeypatch.chdir(tmp_path)


def invoke(*args):
    return CliRunner().invoke(main, list(args))


def test_help():
    result = invoke("--help")
    assert result.exit_code == 0
    assert "Usage: tsplinetool" in result.output
    commands = ("check", "as-check", "extend", "dim", "eval", "project", "perturb", "nest", "fuzz")
    for command in commands:
        assert command in result.output


def test_version():
    result = invoke("--version")
    assert result.exit_code == 0
    assert __version__ in result.output


def test_unknown_command():
    result = invoke("triangulate")
    assert result.exit_code == 2
    assert "Known commands" in result.output


@pytest.mark.parametrize("name,code", [("single_tj.tmesh", 0), ("crossing.tmesh", 0)])
def test_check(name, code):
    result = invoke("check", data(name))
    assert result.exit_code == code
    assert "Overall result: PASS" in result.output


def test_check_broken_file():
    result = invoke("check", data("broken.tmesh"))
    assert result.exit_code == 2
    assert "line 2" in result.output


def test_missing_file():
    result = invoke("dim", data("absent.tmesh"))
    assert result.exit_code == 2


def test_as_check():
    result = invoke("as-check", data("single_tj.tmesh"))
    assert result.exit_code == 0
    assert result.output.strip() == "as=true"
    result = invoke("as-check", data("crossing.tmesh"))
    assert result.exit_code == 1
    assert result.output.strip() == "as=false witness ⊢(7,6) ⊥(6,7) meet at (6, 6)"


def test_extend():
    result = invoke("extend", data("single_tj.tmesh"))
    assert result.exit_code == 0
    assert "n_a=40 n_plus=0 n_minus=0 n_star=68 n_ext=108" in result.output


@pytest.mark.parametrize(
    "args,dimension",
    [(["bezier.tmesh"], 16), (["single_tj.tmesh"], 40), (["tensor.tmesh", "-d", "1/512"], 36)],
)
def test_dim(args, dimension):
    result = invoke("dim", data(args[0]), *args[1:])
    assert result.exit_code == 0
    line = f"formula={dimension} nullity={dimension} as=true diag=true confirmed=true agree=true"
    assert result.output.splitlines()[-1] == line
    assert "nullity(M)" in result.output
    assert "ordering confirmed" in result.output


def test_dim_tab_separated():
    result = invoke("--format", "tsv", "dim", data("single_tj.tmesh"))
    assert result.exit_code == 0
    lines = result.output.splitlines()
    assert "Quantity\tValue" in lines
    assert "anchors\t40" in lines
    assert "ordering confirmed\tTrue" in lines


def test_dim_not_admissible(tmp_path):
    mesh = tmp_path.joinpath("gap.tmesh")
    rows = [[j, 0, 7] for j in range(8) if j != 1]
    columns = [[i, 0, 7] for i in range(8)]
    mesh.write_text(
        f"index_domain: [0, 7, 0, 7]\nh_lines: {rows}\nv_lines: {columns}\n", encoding="utf-8"
    )
    result = invoke("dim", str(mesh))
    assert result.exit_code == 1
    assert "mesh is not admissible: frame lines" in result.output
    assert "formula=" not in result.output


def test_eval_exact_points():
    result = invoke(
        "eval", data("single_tj.tmesh"), "--sum", "--point", "1/3", "5/2", "--point", "4", "3"
    )
    assert result.exit_code == 0
    assert result.output.splitlines() == ["xi\teta\tsum", "1/3\t5/2\t1", "4\t3\t1"]


def test_eval_all_anchors():
    result = invoke("eval", data("bezier.tmesh"), "--all", "--point", "7/2", "7/2")
    assert result.exit_code == 0
    header, row = [line.split("\t") for line in result.output.splitlines()]
    assert header[:2] == ["xi", "eta"]
    assert set(header[2:]) == {f"N({i},{j})" for i in range(2, 6) for j in range(2, 6)}
    values = dict(zip(header[2:], (Fraction(v) for v in row[2:])))
    assert values["N(3,3)"] == Fraction(23, 48) ** 2
    assert values["N(2,5)"] == Fraction(1, 48) ** 2
    assert sum(values.values()) == 1


def test_eval_single_anchor():
    result = invoke("eval", data("bezier.tmesh"), "-a", "3", "3", "--point", "7/2", "7/2")
    assert result.exit_code == 0
    assert result.output.splitlines() == ["xi\teta\tN(3,3)", "7/2\t7/2\t529/2304"]


@pytest.mark.parametrize("args", [[], ["--all", "--sum"], ["--all", "-a", "3", "3"]])
def test_eval_needs_one_mode(args):
    result = invoke("eval", data("bezier.tmesh"), *args, "--point", "7/2", "7/2")
    assert result.exit_code == 2
    assert "exactly one of --anchor, --all, --sum" in result.output


def test_eval_anchor_outside():
    result = invoke("eval", data("bezier.tmesh"), "-a", "3", "3", "--point", "5", "3")
    assert result.exit_code == 1
    assert "OutsideReducedDomain" in result.output


def test_eval_surface(tmp_path):
    doc = load_mesh(data("bezier.tmesh"))
    points = tmp_path.joinpath("net.txt")
    anchors = [(i, j) for i, j in sorted(doc.mesh.vertices) if 2 <= i <= 5 and 2 <= j <= 5]
    points.write_text("".join(f"{i} {j} 2 -1\n" for i, j in anchors), encoding="utf-8")
    result = invoke("eval", data("bezier.tmesh"), "-p", str(points), "--point", "7/2", "7/2")
    assert result.exit_code == 0
    xi, eta, x, y = result.output.splitlines()[1].split("\t")
    assert (xi, eta) == ("7/2", "7/2")
    assert float(x) == pytest.approx(2.0)
    assert float(y) == pytest.approx(-1.0)


def test_project():
    result = invoke("project", data("single_tj.tmesh"), "-f", "monomial", "--powers", "1", "2")
    assert result.exit_code == 0
    lines = result.output.splitlines()
    assert lines[0] == "i\tj\tcoefficient"
    assert len(lines) == 1 + 40 + 2
    assert float(lines[-2].split("=")[1]) < 1e-10
    assert float(lines[-1].split("=")[1]) < 1e-10


def coefficient_rows(output):
    return {
        tuple(line.split("\t")[:2]): float(line.split("\t")[2])
        for line in output.splitlines()
        if line.count("\t") == 2 and not line.startswith("i\t")
    }


def test_project_with_finite_differences(tmp_path):
    args = ("project", data("single_tj.tmesh"), "-f", "sin-cos")
    exact = coefficient_rows(invoke(*args).output)
    result = invoke(*args, "--finite-differences")
    assert result.exit_code == 0
    sampled = coefficient_rows(result.output)
    assert sampled.keys() == exact.keys()
    assert max(abs(sampled[k] - exact[k]) for k in exact) < 1e-3
    toml = tmp_path.joinpath("coarse_steps.toml")
    toml.write_text("[tool.tspline_kernel]\nfd_step = 0.5\n", encoding="utf-8")
    coarse = coefficient_rows(invoke("--config", str(toml), *args, "--finite-differences").output)
    assert max(abs(coarse[k] - exact[k]) for k in exact) > max(
        abs(sampled[k] - exact[k]) for k in exact
    )


def test_project_not_suitable():
    result = invoke("project", data("crossing.tmesh"))
    assert result.exit_code == 1
    assert "NotAnalysisSuitable" in result.output


def test_perturb(tmp_path):
    result = invoke("perturb", data("tensor.tmesh"), "-c", "xi:0=2")
    assert result.exit_code == 0
    assert "# strict: true" in result.output
    assert "knots_xi: [0, 1/512" in result.output
    target = tmp_path.joinpath("perturbed.tmesh")
    result = invoke("perturb", data("tensor.tmesh"), "-o", str(target), "-c", "eta:0=0")
    assert result.exit_code == 0
    assert load_mesh(target).knots.has_multiplicities()
    assert "strict: false" in target.read_text(encoding="utf-8")


def test_perturb_negative_coefficient():
    result = invoke("perturb", data("tensor.tmesh"), "-c", "xi:0=-1")
    assert result.exit_code == 1
    assert "NegativeCoefficient" in result.output


def test_converge():
    result = invoke("converge", data("tensor.tmesh"), "--deltas", "1/100,1/1000,1/10000")
    assert result.exit_code == 0
    assert result.output.splitlines()[-2] == "Monotone deviations: PASS"


def test_converge_tab_separated():
    result = invoke("--format", "tsv", "converge", data("tensor.tmesh"), "--deltas", "1/100,1/1000")
    assert result.exit_code == 0
    lines = result.output.splitlines()
    assert "Anchor\tdelta=1/100\tdelta=1/1000" in lines
    assert sum(1 for line in lines if line.startswith("(")) == 36


def test_nest():
    result = invoke("nest", data("coarse.tmesh"), data("single_tj.tmesh"), "--unperturbed")
    assert result.exit_code == 0
    assert "certificate: nested (delta=1/1024, confirmed at 1/4096)" in result.output
    assert "unperturbed extended inclusion: true" in result.output
    result = invoke("nest", data("single_tj.tmesh"), data("coarse.tmesh"))
    assert result.exit_code == 1
    assert "NotASubmesh" in result.output


def test_refine(tmp_path):
    doc = load_mesh(data("coarse.tmesh"))
    net = tmp_path.joinpath("net.txt")
    anchors = [(i, j) for j in range(2, 8) for i in (2, 3, 4, 6, 7, 8)]
    assert all(doc.mesh.is_vertex(a) for a in anchors)
    net.write_text("".join(f"{i} {j} {i} {j} 0\n" for i, j in anchors), encoding="utf-8")
    target = tmp_path.joinpath("refined.txt")
    result = invoke(
        "refine", data("coarse.tmesh"), data("single_tj.tmesh"), "-p", str(net), "-o", str(target)
    )
    assert result.exit_code == 0
    rows = target.read_text(encoding="utf-8").splitlines()
    assert len(rows) == 40


def test_plot(tmp_path):
    target = tmp_path.joinpath("mesh.svg")
    result = invoke("plot", data("crossing.tmesh"), "--extended", "-o", str(target))
    assert result.exit_code == 0
    root = fromstring(target.read_text(encoding="utf-8"))
    assert root.tag.endswith("svg")
    result = invoke("plot", data("bezier.tmesh"), "-a", "3", "3", "--resolution", "8")
    assert result.exit_code == 0
    assert result.output.count("<rect") == 64


def test_fuzz_self_test():
    result = invoke("fuzz", "-s", "3", "-n", "1", "-j", "1", "--inject-fault")
    assert result.exit_code == 0
    assert "Fault injection detected: PASS" in result.output
