#!/usr/bin/env python
# -*- coding: utf-8 -*-
#
# Copyright 2025 NXP
#
# SPDX-License-Identifier: BSD-3-Clause

"""Randomized property harness over analysis-suitable meshes."""

import logging
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import prettytable
from typing_extensions import Self

from .dimension import (
    assemble,
    confirm_ordering,
    dim_formula,
    diagonalizable_order,
    nullity,
    simplify,
)
from .dualproj import BlendingFunction, dual_apply, dual_functional
from .errors import TSplineError
from .extension import VertexClass, extend, is_analysis_suitable
from .meshio import dump_mesh
from .nesting import Verdict, certify_nested, refinement_matrix
from .spline import GlobalKnots, SplineSpace
from .tmesh import (
    ACTIVE_LINE_OFFSETS,
    IndexDomain,
    LineSpan,
    Orientation,
    TMesh,
    build_tmesh,
    validate_admissible,
)

logger = logging.getLogger(__name__)

PROPERTIES = ("dimension", "partition-of-unity", "biorthogonality", "nesting")


class Status(str, Enum):
    """Outcome of one property on one mesh."""

    PASS = "pass"
    FAIL = "fail"
    SKIP = "skip"


@dataclass
class FuzzParameters:
    """Parameters of the random mesh generator and the property checks."""

    side_min: int = 9
    side_max: int = 16
    insertions_min: int = 1
    insertions_max: int = 6
    knot_denominator: int = 16
    attempts: int = 60
    grid: int = 40
    unity_tolerance: float = 1e-12
    dual_tolerance: float = 1e-10
    reproduction_tolerance: float = 1e-10
    workers: Optional[int] = None

    @classmethod
    def load_from_config(cls, cfg: Dict[str, Any]) -> Self:
        """Create parameters from the ``fuzz`` section of a configuration."""
        known = {name: cfg[name] for name in cls.__dataclass_fields__ if name in cfg}
        for name in ("unity_tolerance", "dual_tolerance", "reproduction_tolerance"):
            if name in known:
                known[name] = float(known[name])
        return cls(**known)


@dataclass
class Insertion:
    """Partial line added to a base mesh."""

    orientation: Orientation
    line: int
    lo: int
    hi: int

    @property
    def span(self) -> LineSpan:
        """Span as ``(line, lo, hi)``."""
        return (self.line, self.lo, self.hi)

    def __str__(self) -> str:
        return f"{self.orientation.value}:{self.line}[{self.lo},{self.hi}]"


@dataclass
class RandomMesh:
    """Randomly generated mesh with the recipe it was built from."""

    domain: IndexDomain
    h_lines: List[LineSpan]
    v_lines: List[LineSpan]
    insertions: List[Insertion]
    knots: GlobalKnots

    def build(self, insertions: Optional[Sequence[Insertion]] = None) -> TMesh:
        """Mesh from the base lines and the given (default all) insertions."""
        chosen = self.insertions if insertions is None else insertions
        h_lines = list(self.h_lines)
        v_lines = list(self.v_lines)
        for insertion in chosen:
            lines = h_lines if insertion.orientation is Orientation.HORIZONTAL else v_lines
            lines.append(insertion.span)
        return build_tmesh(self.domain, h_lines, v_lines)


def _acceptable(mesh: TMesh) -> bool:
    try:
        if not validate_admissible(mesh).admissible:
            return False
        if not is_analysis_suitable(mesh).suitable:
            return False
        extend(mesh)
    except TSplineError as exc:
        logger.debug(f"Rejected candidate ({exc})")
        return False
    return True


def random_knots(domain: IndexDomain, rng: random.Random, denominator: int = 16) -> GlobalKnots:
    """Strictly increasing rational knots, integers shifted by less than one half."""

    def vector(count: int) -> Tuple[Fraction, ...]:
        values = []
        for k in range(count):
            q = rng.randint(1, denominator)
            values.append(k + Fraction(rng.randrange(0, (q + 1) // 2), q))
        return tuple(values)

    return GlobalKnots(
        domain,
        vector(domain.m_hi - domain.m_lo + 1),
        vector(domain.n_hi - domain.n_lo + 1),
    )


def _required_lines(lo: int, hi: int) -> List[int]:
    offsets = set(range(max(ACTIVE_LINE_OFFSETS) + 1))
    return sorted({lo + k for k in offsets} | {hi - k for k in offsets})


def random_insertion(
    mesh: TMesh, rng: random.Random, attempts: int
) -> Optional[Tuple[Insertion, TMesh]]:
    """Random partial line keeping the mesh admissible and analysis-suitable.

    :return: Insertion and refined mesh, None when all attempts were rejected.
    """
    for _ in range(attempts):
        orientation = rng.choice(list(Orientation))
        lines = mesh.domain.line_range(orientation)
        line = rng.randint(lines.start + 1, lines.stop - 2)
        crossings = mesh.crossings(orientation, line)
        if len(crossings) < 2:
            continue
        lo, hi = sorted(rng.sample(crossings, 2))
        if mesh.covers(orientation, line, lo, hi):
            continue
        insertion = Insertion(orientation, line, lo, hi)
        try:
            if orientation is Orientation.HORIZONTAL:
                candidate = mesh.with_lines(h_lines=[insertion.span])
            else:
                candidate = mesh.with_lines(v_lines=[insertion.span])
        except TSplineError as exc:
            logger.debug(f"Rejected insertion {insertion} ({exc})")
            continue
        if _acceptable(candidate):
            return insertion, candidate
        logger.debug(f"Rejected insertion {insertion}")
    return None


def random_mesh(
    rng: random.Random, params: Optional[FuzzParameters] = None
) -> Tuple[RandomMesh, TMesh]:
    """Random admissible analysis-suitable mesh with random rational knots.

    The base is a tensor grid of the required lines and a random subset of the other lines,
    then partial lines are inserted one at a time, each rejected until the mesh stays
    admissible and analysis-suitable.
    """
    params = params or FuzzParameters()
    m_hi = rng.randint(params.side_min, params.side_max)
    domain = IndexDomain(0, m_hi, 0, rng.randint(params.side_min, params.side_max))
    full: Dict[Orientation, List[LineSpan]] = {}
    for orientation in Orientation:
        lines = domain.line_range(orientation)
        lo, hi = domain.span_range(orientation)
        required = _required_lines(lines.start, lines.stop - 1)
        chosen = [k for k in lines if k in required or rng.random() < 0.5]
        full[orientation] = [(k, lo, hi) for k in chosen]
    recipe = RandomMesh(
        domain,
        full[Orientation.HORIZONTAL],
        full[Orientation.VERTICAL],
        [],
        random_knots(domain, rng, params.knot_denominator),
    )
    mesh = recipe.build()
    for _ in range(rng.randint(params.insertions_min, params.insertions_max)):
        found = random_insertion(mesh, rng, params.attempts)
        if found is None:
            break
        insertion, mesh = found
        recipe.insertions.append(insertion)
    logger.debug(f"Random mesh on {domain} with insertions {[str(x) for x in recipe.insertions]}")
    return recipe, mesh


@dataclass
class PropertyResult:
    """Outcome of one property on one mesh."""

    name: str
    status: Status
    detail: str = ""


def check_dimension(mesh: TMesh, knots: GlobalKnots, inject_fault: bool = False) -> PropertyResult:
    """Formula against exact nullity, simplification and diagonalizability.

    :param inject_fault: Flip one extended vertex into a crossing vertex before counting.
    """
    mesh_ext = extend(mesh)
    if inject_fault:
        flipped = mesh_ext.vertices_of(VertexClass.EXTENDED)[0]
        mesh_ext.classification[flipped] = VertexClass.CROSSING
    system = assemble(mesh_ext, knots)
    formula = dim_formula(mesh_ext)
    exact = nullity(system.matrix)
    if formula != exact:
        return PropertyResult("dimension", Status.FAIL, f"formula={formula} nullity={exact}")
    reduced = simplify(system)
    reduced_exact = nullity(reduced.matrix)
    if reduced_exact != exact:
        return PropertyResult("dimension", Status.FAIL, f"nullity={exact} reduced={reduced_exact}")
    ordering = diagonalizable_order(reduced)
    if not ordering.success:
        detail = f"peel stuck at {len(ordering.stuck)} segments"
        return PropertyResult("dimension", Status.FAIL, detail)
    if not confirm_ordering(reduced, ordering):
        return PropertyResult("dimension", Status.FAIL, "peeled blocks not of full column rank")
    return PropertyResult("dimension", Status.PASS, f"dim={formula}")


def check_partition_of_unity(space: SplineSpace, grid: int, tolerance: float) -> PropertyResult:
    """Blending functions sum to one on a sample grid."""
    xs, ys = space.sample_grid(grid)
    deviation = float(np.max(np.abs(space.evaluate_all(xs, ys).sum(axis=0) - 1.0)))
    status = Status.PASS if deviation <= tolerance else Status.FAIL
    return PropertyResult("partition-of-unity", status, f"max deviation {deviation:.3g}")


def check_biorthogonality(space: SplineSpace, tolerance: float) -> PropertyResult:
    """Dual functionals applied to the blending functions give the identity."""
    worst = 0.0
    worst_pair = None
    for anchor in space.anchors:
        functional = dual_functional(space, anchor)
        for other in space.functions:
            if not other.covers(functional.tau_xi, functional.tau_eta):
                continue
            value = dual_apply(functional, BlendingFunction(space, other.anchor))
            deviation = abs(float(value) - (1.0 if other.anchor == anchor else 0.0))
            if deviation > worst:
                worst, worst_pair = deviation, (anchor, other.anchor)
    if worst > tolerance:
        detail = f"deviation {worst:.3g} at {worst_pair}"
        return PropertyResult("biorthogonality", Status.FAIL, detail)
    return PropertyResult("biorthogonality", Status.PASS, f"max deviation {worst:.3g}")


def check_nesting(
    mesh: TMesh, knots: GlobalKnots, rng: random.Random, params: FuzzParameters
) -> PropertyResult:
    """Nesting of the mesh against a random refinement and reproduction of the coarse functions."""
    for _ in range(params.attempts // 10 + 1):
        found = random_insertion(mesh, rng, params.attempts)
        if found is None:
            break
        insertion, refined = found
        certificate = certify_nested(mesh, refined, knots, knots)
        if certificate.verdict is not Verdict.NESTED:
            logger.debug(f"Refinement {insertion} gives {certificate}")
            continue
        coarse = SplineSpace.create(mesh, knots)
        fine = SplineSpace.create(refined, knots)
        matrix = refinement_matrix(coarse, fine, certificate)
        xs, ys = coarse.sample_grid(params.grid)
        residual = coarse.evaluate_all(xs, ys) - matrix.to_array().T @ fine.evaluate_all(xs, ys)
        deviation = float(np.max(np.abs(residual)))
        status = Status.PASS if deviation <= params.reproduction_tolerance else Status.FAIL
        detail = f"refined by {insertion}, residual {deviation:.3g}"
        return PropertyResult("nesting", status, detail)
    return PropertyResult("nesting", Status.SKIP, "no nested refinement found")


@dataclass
class IterationTask:
    """Everything a worker needs to run one iteration."""

    index: int
    seed: int
    params: FuzzParameters
    inject_fault: bool = False

    @property
    def rng(self) -> random.Random:
        """Generator determined by the run seed and the iteration index."""
        return random.Random(f"{self.seed}:{self.index}")


@dataclass
class IterationResult:
    """Results of all properties on one random mesh."""

    index: int
    domain: str
    insertions: List[str]
    results: List[PropertyResult] = field(default_factory=list)
    counterexample: str = ""

    @property
    def failed(self) -> List[PropertyResult]:
        """Failed properties."""
        return [r for r in self.results if r.status is Status.FAIL]


def _property_checks(
    task: IterationTask, knots: GlobalKnots
) -> List[Tuple[str, Callable[[TMesh], PropertyResult]]]:
    params = task.params

    def dimension(mesh: TMesh) -> PropertyResult:
        return check_dimension(mesh, knots, task.inject_fault)

    def unity(mesh: TMesh) -> PropertyResult:
        space = SplineSpace.create(mesh, knots)
        return check_partition_of_unity(space, params.grid, params.unity_tolerance)

    def dual(mesh: TMesh) -> PropertyResult:
        return check_biorthogonality(SplineSpace.create(mesh, knots), params.dual_tolerance)

    def nesting(mesh: TMesh) -> PropertyResult:
        rng = random.Random(f"{task.seed}:{task.index}:refine")
        return check_nesting(mesh, knots, rng, params)

    return list(zip(PROPERTIES, (dimension, unity, dual, nesting)))


def _run_check(name: str, check: Callable[[TMesh], PropertyResult], mesh: TMesh) -> PropertyResult:
    try:
        return check(mesh)
    except TSplineError as exc:
        return PropertyResult(name, Status.FAIL, f"{type(exc).__name__}: {exc}")


def minimize(
    recipe: RandomMesh, check: Callable[[TMesh], PropertyResult]
) -> Tuple[List[Insertion], TMesh]:
    """Drop insertions while the mesh stays acceptable and the property keeps failing."""
    kept = list(recipe.insertions)
    mesh = recipe.build(kept)
    changed = True
    while changed:
        changed = False
        for insertion in list(kept):
            trial = [x for x in kept if x is not insertion]
            try:
                candidate = recipe.build(trial)
            except TSplineError:
                continue
            if not _acceptable(candidate):
                continue
            if check(candidate).status is Status.FAIL:
                kept, mesh, changed = trial, candidate, True
                break
    return kept, mesh


def run_iteration(task: IterationTask) -> IterationResult:
    """Generate one mesh and check every property on it."""
    recipe, mesh = random_mesh(task.rng, task.params)
    result = IterationResult(task.index, str(recipe.domain), [str(x) for x in recipe.insertions])
    checks = _property_checks(task, recipe.knots)
    for name, check in checks:
        result.results.append(_run_check(name, check, mesh))
    if result.failed:
        first = next(check for name, check in checks if name == result.failed[0].name)
        kept, smallest = minimize(recipe, lambda m: _run_check(result.failed[0].name, first, m))
        result.counterexample = dump_mesh(
            smallest,
            recipe.knots,
            comments=[
                f"iteration {task.index}, {result.failed[0].name}",
                f"insertions {[str(x) for x in kept]}",
            ],
        )
    logger.debug(f"Iteration {task.index}: {[(r.name, r.status.value) for r in result.results]}")
    return result


@dataclass
class FuzzSummary:
    """Results of a fuzz run ordered by iteration index."""

    seed: int
    iterations: List[IterationResult]

    @property
    def failures(self) -> List[IterationResult]:
        """Iterations with at least one failed property."""
        return [r for r in self.iterations if r.failed]

    @property
    def passed(self) -> bool:
        """True when no property failed."""
        return not self.failures

    def counts(self) -> Dict[str, Dict[Status, int]]:
        """Number of outcomes per property."""
        counts = {name: {status: 0 for status in Status} for name in PROPERTIES}
        for iteration in self.iterations:
            for result in iteration.results:
                counts[result.name][result.status] += 1
        return counts

    def table(self) -> prettytable.PrettyTable:
        """Outcome counts per property."""
        table = prettytable.PrettyTable(["Property", "Passed", "Failed", "Skipped"])
        table.align = "l"
        table.hrules = prettytable.HEADER
        table.vrules = prettytable.NONE
        for name, counts in self.counts().items():
            table.add_row([name, counts[Status.PASS], counts[Status.FAIL], counts[Status.SKIP]])
        return table


def run_fuzz(
    seed: int,
    count: int,
    params: Optional[FuzzParameters] = None,
    inject_fault: bool = False,
) -> FuzzSummary:
    """Run the property harness on ``count`` random meshes.

    :param seed: Seed, determines every mesh.
    :param count: Number of meshes.
    :param params: Generator and check parameters.
    :param inject_fault: Corrupt one vertex classification per mesh.
    :return: Summary ordered by iteration index.
    :raises ValueError: Count is not positive.
    """
    if count < 1:
        raise ValueError(f"Fuzz count must be positive, got {count}")
    params = params or FuzzParameters()
    tasks = [IterationTask(index, seed, params, inject_fault) for index in range(count)]
    if params.workers == 1:
        iterations = [run_iteration(task) for task in tasks]
    else:
        with ProcessPoolExecutor(max_workers=params.workers) as executor:
            iterations = list(executor.map(run_iteration, tasks))
    summary = FuzzSummary(seed, iterations)
    logger.info(f"Fuzz run with seed {seed}: {len(summary.failures)} of {count} meshes failed")
    return summary
