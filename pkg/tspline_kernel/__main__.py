#!/usr/bin/env python
# -*- coding: utf-8 -*-
#
# Copyright 2025 NXP
#
# SPDX-License-Identifier: BSD-3-Clause

"""Command line tool for T-spline meshes and spaces."""

import functools
import logging
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, List, Optional, Sequence, Tuple

import click
import colorama
import numpy as np
import prettytable

from . import __version__
from .config import OutputFormat, RunConfig
from .dimension import dimension_report
from .dualproj import (
    BUILTIN_FUNCTIONS,
    FiniteDifference,
    get_function,
    l2_error,
    project,
    projection_eval,
)
from .errors import MalformedMeshFile, TSplineError, UnknownCommand
from .extension import extend, is_analysis_suitable
from .fuzz import run_fuzz
from .meshio import (
    MeshDocument,
    dump_control_points,
    dump_mesh,
    format_number,
    load_control_points,
    load_mesh,
)
from .nesting import certify_nested, extended_inclusion, refine_geometry, refinement_matrix
from .perturb import SlotCoefficients, convergence_experiment, map_knots_holds, perturb
from .spline import SplineSpace, blending_eval, bspline_eval_array, surface_eval
from .svg import render_mesh, render_parametric
from .tmesh import validate_admissible

colorama.init()
logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_FORMAT = 2

DEFAULT_DELTAS = "1/10,1/100,1/1000,1/10000,1/100000"


def _verdict(passed: bool) -> str:
    text = (colorama.Fore.GREEN + "PASS") if passed else (colorama.Fore.RED + "FAIL")
    return text + colorama.Fore.RESET


def _new_table(header: List[str]) -> prettytable.PrettyTable:
    table = prettytable.PrettyTable(header)
    table.align = "l"
    table.hrules = prettytable.HEADER
    table.vrules = prettytable.NONE
    return table


def _echo_table(config: RunConfig, table: prettytable.PrettyTable) -> None:
    if config.output_format is OutputFormat.TSV:
        click.echo("\t".join(table.field_names))
        for row in table.rows:
            click.echo("\t".join(str(value) for value in row))
    else:
        click.echo(table)


class CommandGroup(click.Group):
    """Group reporting unknown commands with the list of the known ones."""

    def resolve_command(self, ctx: click.Context, args: List[str]) -> Tuple[Any, ...]:
        try:
            return super().resolve_command(ctx, args)
        except click.UsageError as exc:
            known = ", ".join(sorted(self.commands))
            error = UnknownCommand(f"{exc.format_message()} Known commands: {known}")
            raise click.UsageError(str(error), ctx) from exc


def handle_errors(func: Callable[..., int]) -> Callable[..., None]:
    """Translate the command result and raised errors into exit codes."""

    @functools.wraps(func)
    def wrapper(*args: Any, **kwargs: Any) -> None:
        ctx = click.get_current_context()
        try:
            code = func(*args, **kwargs)
        except (MalformedMeshFile, OSError, ValueError) as exc:
            click.secho(f"Error: {exc}", fg="red", err=True)
            ctx.exit(EXIT_FORMAT)
        except TSplineError as exc:
            click.secho(f"{type(exc).__name__}: {exc}", fg="red", err=True)
            ctx.exit(EXIT_FAILED)
        ctx.exit(code)

    return wrapper


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"'{text}' is not a rational number ({exc})") from exc


def _space(document: MeshDocument) -> SplineSpace:
    return SplineSpace.create(document.mesh, document.knots)


mesh_argument = click.argument("mesh", type=click.Path(dir_okay=False))
coefficient_option = click.option(
    "-c",
    "--coefficient",
    "coefficients",
    multiple=True,
    help="Perturbation coefficient of one zero span slot as 'xi:0=1/2', may be repeated.",
)


@click.group(name="tsplinetool", cls=CommandGroup, no_args_is_help=True)
@click.option("-v", "--verbose", is_flag=True, default=False, help="Print debug messages.")
@click.option("-q", "--quiet", is_flag=True, default=False, help="Print only warnings and errors.")
@click.option(
    "--config",
    "config_path",
    type=click.Path(exists=True, dir_okay=False),
    help=(
        "Project TOML with a [tool.tspline_kernel] section,"
        " pyproject.toml in working directory by default."
    ),
)
@click.option(
    "--format",
    "output_format",
    type=click.Choice([f.value for f in OutputFormat], case_sensitive=False),
    help="Format of the reported tables, configured value by default.",
)
@click.version_option(__version__)
@click.pass_context
def main(
    ctx: click.Context,
    verbose: bool,
    quiet: bool,
    config_path: Optional[str],
    output_format: Optional[str],
) -> None:
    """Build, validate and analyse bicubic T-spline spaces."""
    level = logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO
    logging.basicConfig(level=level)
    ctx.obj = RunConfig.load_from_toml(config_path)
    if output_format:
        ctx.obj.output_format = OutputFormat(output_format.lower())


@main.command(name="check", no_args_is_help=True)
@mesh_argument
@handle_errors
def check(mesh: str) -> int:
    """Validate the admissibility conditions of a mesh."""
    report = validate_admissible(load_mesh(mesh).mesh)
    table = _new_table(["Condition", "Result", "Witnesses"])
    for condition in report.conditions:
        witnesses = ", ".join(str(w) for w in condition.witnesses[:5])
        if len(condition.witnesses) > 5:
            witnesses += f", ... ({len(condition.witnesses)} in total)"
        table.add_row([condition.name, _verdict(condition.passed), witnesses])
    click.echo(table)
    click.echo(f"Overall result: {_verdict(report.admissible)}")
    return EXIT_OK if report.admissible else EXIT_FAILED


@main.command(name="as-check", no_args_is_help=True)
@mesh_argument
@handle_errors
def as_check(mesh: str) -> int:
    """Check that no horizontal and vertical T-junction extensions meet."""
    tmesh = load_mesh(mesh).mesh
    if not validate_admissible(tmesh).admissible:
        click.echo("as=false mesh is not admissible")
        return EXIT_FAILED
    verdict = is_analysis_suitable(tmesh)
    if verdict.suitable:
        click.echo("as=true")
        return EXIT_OK
    horizontal, vertical, point = verdict.witness
    click.echo(f"as=false witness {horizontal} {vertical} meet at {point}")
    return EXIT_FAILED


@main.command(name="extend", no_args_is_help=True)
@mesh_argument
@click.option(
    "--edge-overlap",
    is_flag=True,
    default=False,
    help="Let edge extensions create overlap vertices.",
)
@click.pass_obj
@handle_errors
def extend_command(config: RunConfig, mesh: str, edge_overlap: bool) -> int:
    """Print the classification of the extended mesh."""
    extended = extend(load_mesh(mesh).mesh, include_edge_overlap=edge_overlap)
    for extension in extended.extensions:
        click.echo(str(extension))
    _echo_table(config, extended.classification_table())
    click.echo(" ".join(f"{key}={value}" for key, value in extended.summary().items()))
    return EXIT_OK


@main.command(name="dim", no_args_is_help=True)
@mesh_argument
@click.option("-d", "--delta", help="Perturbation delta used when the knots repeat values.")
@coefficient_option
@click.pass_obj
@handle_errors
def dim(config: RunConfig, mesh: str, delta: Optional[str], coefficients: Sequence[str]) -> int:
    """Dimension of the space by formula and by exact elimination."""
    document = load_mesh(mesh)
    admissibility = validate_admissible(document.mesh)
    if not admissibility.admissible:
        failed = ", ".join(c.name for c in admissibility.conditions if not c.passed)
        click.echo(f"mesh is not admissible: {failed}")
        return EXIT_FAILED
    delta_value = _fraction(delta) if delta else config.delta
    report = dimension_report(
        document.mesh,
        document.knots,
        delta_value if document.knots.has_multiplicities() else None,
        SlotCoefficients.parse(coefficients, config.coefficient),
    )
    _echo_table(config, report.table())
    click.echo(report.summary_line())
    return EXIT_FAILED if report.agree is False or not report.simplification_safe else EXIT_OK


def _eval_points(
    points: Sequence[Tuple[str, str]], grid: Optional[int], space: SplineSpace
) -> List[Tuple[Any, Any]]:
    if points:
        return [(_fraction(xi), _fraction(eta)) for xi, eta in points]
    xs, ys = space.sample_grid(grid or 10)
    return [(float(x), float(y)) for x, y in zip(xs, ys)]


@main.command(name="eval", no_args_is_help=True)
@mesh_argument
@click.option("-a", "--anchor", type=(int, int), help="Anchor of the evaluated blending function.")
@click.option(
    "--all",
    "all_anchors",
    is_flag=True,
    default=False,
    help="Evaluate every blending function, one column per anchor.",
)
@click.option(
    "--sum",
    "total",
    is_flag=True,
    default=False,
    help="Evaluate the sum of all blending functions.",
)
@click.option(
    "-p",
    "--control-points",
    type=click.Path(dir_okay=False),
    help="Control point file, the surface is evaluated instead of the blending functions.",
)
@click.option(
    "--point", "points", type=(str, str), multiple=True, help="Parameter pair, rationals are exact."
)
@click.option("-g", "--grid", type=click.IntRange(1), help="Evaluate on a grid of this density.")
@click.option(
    "--dxi", type=click.IntRange(0, 3), default=0, show_default=True, help="Derivative in xi."
)
@click.option(
    "--deta", type=click.IntRange(0, 3), default=0, show_default=True, help="Derivative in eta."
)
@handle_errors
def eval_command(
    mesh: str,
    anchor: Optional[Tuple[int, int]],
    all_anchors: bool,
    total: bool,
    control_points: Optional[str],
    points: Sequence[Tuple[str, str]],
    grid: Optional[int],
    dxi: int,
    deta: int,
) -> int:
    """Evaluate blending functions or a surface as tab separated values.

    Exactly one of --anchor, --all, --sum and --control-points selects what is evaluated.
    """
    selected = sum(1 for given in (anchor, all_anchors, total, control_points) if given)
    if selected != 1:
        raise click.UsageError(
            "Use exactly one of --anchor, --all, --sum and --control-points",
            click.get_current_context(),
        )
    space = _space(load_mesh(mesh))
    samples = _eval_points(points, grid, space)
    if control_points:
        net = load_control_points(control_points)
        click.echo("xi\teta\tsurface")
        for xi, eta in samples:
            value = surface_eval(space, net, xi, eta)
            row = [format_number(xi), format_number(eta), *(format_number(v) for v in value)]
            click.echo("\t".join(row))
        return EXIT_OK
    if total:
        click.echo("xi\teta\tsum")
        for xi, eta in samples:
            value = sum(blending_eval(space, a, xi, eta, dxi, deta) for a in space.anchors)
            click.echo(f"{format_number(xi)}\t{format_number(eta)}\t{format_number(value)}")
        return EXIT_OK
    targets = [tuple(anchor)] if anchor else space.anchors
    click.echo("\t".join(["xi", "eta", *(f"N({a[0]},{a[1]})" for a in targets)]))
    for xi, eta in samples:
        values = [format_number(blending_eval(space, a, xi, eta, dxi, deta)) for a in targets]
        click.echo("\t".join([format_number(xi), format_number(eta), *values]))
    return EXIT_OK


@main.command(name="project", no_args_is_help=True)
@mesh_argument
@click.option(
    "-f",
    "--function",
    "function_name",
    type=click.Choice(BUILTIN_FUNCTIONS, case_sensitive=False),
    default="sin-cos",
    show_default=True,
    help="Projected function.",
)
@click.option(
    "--powers", type=(int, int), default=(0, 0), show_default=True, help="Powers of the monomial."
)
@click.option(
    "--finite-differences",
    is_flag=True,
    default=False,
    help="Take the derivatives from finite differences of the function values.",
)
@click.pass_obj
@handle_errors
def project_command(
    config: RunConfig,
    mesh: str,
    function_name: str,
    powers: Tuple[int, int],
    finite_differences: bool,
) -> int:
    """Project a function with the dual functionals, print coefficients and errors."""
    space = _space(load_mesh(mesh))
    args = powers if function_name == "monomial" else ()
    function = get_function(function_name, *args)
    if finite_differences:
        function = FiniteDifference(function, config.fd_step, name=str(function))
    coefficients = project(space, function)
    click.echo("i\tj\tcoefficient")
    for anchor in space.anchors:
        click.echo(f"{anchor[0]}\t{anchor[1]}\t{format_number(coefficients[anchor])}")
    xs, ys = space.sample_grid(config.sample_density)
    deviation = projection_eval(space, coefficients, xs, ys) - function(xs, ys)
    sup_error = float(np.max(np.abs(deviation)))
    click.echo(f"l2_error={format_number(l2_error(space, function, config.quadrature_order))}")
    click.echo(f"sup_error={format_number(sup_error)}")
    return EXIT_OK


@main.command(name="perturb", no_args_is_help=True)
@mesh_argument
@click.option("-d", "--delta", help="Perturbation delta, configured value by default.")
@coefficient_option
@click.option(
    "-o",
    "--output",
    type=click.Path(dir_okay=False),
    help="Perturbed mesh file, stdout by default.",
)
@click.pass_obj
@handle_errors
def perturb_command(
    config: RunConfig,
    mesh: str,
    delta: Optional[str],
    coefficients: Sequence[str],
    output: Optional[str],
) -> int:
    """Write the perturbed mesh with the provenance of its vertices as comments."""
    document = load_mesh(mesh)
    delta_value = _fraction(delta) if delta else config.delta
    slots = SlotCoefficients.parse(coefficients, config.coefficient)
    knots, perturbed = perturb(document.mesh, document.knots, delta_value, slots)
    comments = [
        f"perturbation of {document.source} with delta {delta_value}",
        f"strict: {str(knots.strict).lower()}",
        "provenance: perturbed vertex <- original vertex (horizontal, vertical segment ordinals)",
    ]
    for vertex in sorted(perturbed.provenance, key=lambda p: (p[1], p[0])):
        original, ordinals = perturbed.provenance[vertex]
        comments.append(f"{vertex} <- {original} {ordinals}")
    text = dump_mesh(perturbed.mesh, knots.knots, comments)
    if output:
        Path(output).write_text(text, encoding="utf-8")
        click.echo(f"Perturbed mesh saved to {output}")
    else:
        click.echo(text, nl=False)
    return EXIT_OK


@main.command(name="converge", no_args_is_help=True)
@mesh_argument
@click.option(
    "--deltas",
    default=DEFAULT_DELTAS,
    show_default=True,
    help="Decreasing deltas, comma separated.",
)
@coefficient_option
@click.pass_obj
@handle_errors
def converge(config: RunConfig, mesh: str, deltas: str, coefficients: Sequence[str]) -> int:
    """Deviation of the perturbed blending functions from the original ones."""
    document = load_mesh(mesh)
    values = [_fraction(text.strip()) for text in deltas.split(",") if text.strip()]
    slots = SlotCoefficients.parse(coefficients, config.coefficient)
    experiment = convergence_experiment(
        document.mesh, document.knots, values, config.verification_grid, slots
    )
    _echo_table(config, experiment.table())
    click.echo("worst\t" + "\t".join(f"{v:.3e}" for v in experiment.worst()))
    index_maps = map_knots_holds(document.mesh, document.knots, values[-1])
    click.echo(f"Monotone deviations: {_verdict(experiment.monotone())}")
    click.echo(f"Index vectors commute with the index maps: {_verdict(index_maps)}")
    return EXIT_OK if experiment.monotone() and index_maps else EXIT_FAILED


@main.command(name="nest", no_args_is_help=True)
@click.argument("coarse", type=click.Path(dir_okay=False))
@click.argument("fine", type=click.Path(dir_okay=False))
@click.option("-d", "--delta", help="Perturbation delta, configured value by default.")
@click.option(
    "--unperturbed",
    is_flag=True,
    default=False,
    help="Also report the unperturbed extended inclusion.",
)
@click.pass_obj
@handle_errors
def nest(config: RunConfig, coarse: str, fine: str, delta: Optional[str], unperturbed: bool) -> int:
    """Certify that the coarse space is contained in the fine space."""
    first, second = load_mesh(coarse), load_mesh(fine)
    certificate = certify_nested(
        first.mesh,
        second.mesh,
        first.knots,
        second.knots,
        _fraction(delta) if delta else config.delta,
        config.recheck_delta,
    )
    click.echo(f"certificate: {certificate}")
    if unperturbed:
        included, witness = extended_inclusion(first.mesh, second.mesh)
        suffix = f" witness {witness}" if witness else ""
        click.echo(f"unperturbed extended inclusion: {str(included).lower()}{suffix}")
    click.echo(f"Overall result: {_verdict(certificate.nested)}")
    return EXIT_OK if certificate.nested else EXIT_FAILED


@main.command(name="refine", no_args_is_help=True)
@click.argument("coarse", type=click.Path(dir_okay=False))
@click.argument("fine", type=click.Path(dir_okay=False))
@click.option(
    "-p",
    "--control-points",
    type=click.Path(dir_okay=False),
    required=True,
    help="Coarse control points.",
)
@click.option(
    "-o",
    "--output",
    type=click.Path(dir_okay=False),
    help="Refined control points, stdout by default.",
)
@click.pass_obj
@handle_errors
def refine(
    config: RunConfig, coarse: str, fine: str, control_points: str, output: Optional[str]
) -> int:
    """Refine a control net from the coarse space onto the fine space."""
    first, second = load_mesh(coarse), load_mesh(fine)
    certificate = certify_nested(
        first.mesh, second.mesh, first.knots, second.knots, config.delta, config.recheck_delta
    )
    if not certificate.nested:
        click.echo(f"certificate: {certificate}")
        return EXIT_FAILED
    matrix = refinement_matrix(_space(first), _space(second), certificate)
    text = dump_control_points(refine_geometry(load_control_points(control_points), matrix))
    if output:
        Path(output).write_text(text, encoding="utf-8")
        click.echo(f"Refined control points saved to {output}")
    else:
        click.echo(text, nl=False)
    return EXIT_OK


@main.command(name="plot", no_args_is_help=True)
@mesh_argument
@click.option(
    "-o", "--output", type=click.Path(dir_okay=False), help="SVG file, stdout by default."
)
@click.option(
    "--extended", is_flag=True, default=False, help="Draw the extensions and the vertex classes."
)
@click.option(
    "--parametric", is_flag=True, default=False, help="Draw the elements in the parameter domain."
)
@click.option(
    "-a", "--anchor", type=(int, int), help="Draw this blending function as grayscale raster."
)
@click.option(
    "--resolution",
    type=click.IntRange(4, 512),
    default=64,
    show_default=True,
    help="Raster density.",
)
@handle_errors
def plot(
    mesh: str,
    output: Optional[str],
    extended: bool,
    parametric: bool,
    anchor: Optional[Tuple[int, int]],
    resolution: int,
) -> int:
    """Render a mesh as SVG."""
    document = load_mesh(mesh)
    if parametric or anchor:
        space = _space(document)
        raster: Optional[Callable[[np.ndarray, np.ndarray], np.ndarray]] = None
        if anchor:
            function = space.function(anchor)
            _, xi_hi, _, eta_hi = space.reduced_domain

            def blending(xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
                return bspline_eval_array(function.xi_local, xs, 0, xi_hi) * bspline_eval_array(
                    function.eta_local, ys, 0, eta_hi
                )

            raster = blending
        text = render_parametric(space, raster, resolution)
    else:
        text = render_mesh(document.mesh, extend(document.mesh) if extended else None)
    if output:
        Path(output).write_text(text, encoding="utf-8")
        click.echo(f"SVG saved to {output}")
    else:
        click.echo(text)
    return EXIT_OK


@main.command(name="fuzz")
@click.option("-s", "--seed", type=int, help="Seed of the run, configured value by default.")
@click.option(
    "-n", "--count", type=click.IntRange(1), default=50, show_default=True, help="Number of meshes."
)
@click.option(
    "-j",
    "--workers",
    type=click.IntRange(1, 64),
    help="Worker processes, configured value by default.",
)
@click.option(
    "--inject-fault",
    is_flag=True,
    default=False,
    help="Self-test: corrupt one vertex class per mesh.",
)
@click.pass_obj
@handle_errors
def fuzz(
    config: RunConfig, seed: Optional[int], count: int, workers: Optional[int], inject_fault: bool
) -> int:
    """Check the dimension, partition of unity, biorthogonality and nesting on random meshes."""
    params = config.fuzz
    if workers:
        params.workers = workers
    summary = run_fuzz(config.seed if seed is None else seed, count, params, inject_fault)
    _echo_table(config, summary.table())
    for iteration in summary.failures:
        for result in iteration.failed:
            where = f"iteration {iteration.index} on {iteration.domain}"
            click.echo(f"{where}: {result.name} {result.detail}")
        click.echo(iteration.counterexample, nl=False)
    if inject_fault:
        detected = all(
            any(r.name == "dimension" for r in iteration.failed) for iteration in summary.iterations
        )
        click.echo(f"Fault injection detected: {_verdict(detected)}")
        return EXIT_OK if detected else EXIT_FAILED
    click.echo(f"Overall result: {_verdict(summary.passed)}")
    return EXIT_OK if summary.passed else EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())  # pragma: no cover  # pylint: disable=no-value-for-parameter
