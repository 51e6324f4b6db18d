"""Scenario runs, the lexicographic maximum-reduction mode, and price sweeps."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .builder import (
    COST_ONLY,
    MAX_REDUCTION_LEX,
    NUM_TECH,
    DeploymentPlan,
    ScenarioConfig,
    VariableIndex,
    assemble,
    extract_plan,
    offset_vector,
    scenario_config,
)
from .domain import TECH_ORDER, ModelInstance
from .lp import GE, LinearProgram, Row, Status, violated_rows
from .simplex import SolverSettings, solve

LEX_EPS = 1e-6  # relative slack on the stage-1 reduction when re-minimising cost

PARAMETER_KEYS = {
    "carbon_price": "cp",
    "ccs_unit_cost": "ccsp",
    "transport_cost": "gt",
}


class ScenarioError(RuntimeError):
    pass


class InfeasibleModelError(ScenarioError):
    def __init__(self, binding_rows):
        self.binding_rows = list(binding_rows)
        super().__init__(f"infeasible; violated rows: {', '.join(self.binding_rows) or '<none found>'}")


class UnboundedModelError(ScenarioError):
    def __init__(self, ray_vars):
        self.ray_vars = list(ray_vars)
        super().__init__(f"unbounded along: {', '.join(self.ray_vars) or '<unknown>'}")


@dataclass
class ScenarioResult:
    config: ScenarioConfig
    instance: ModelInstance
    plan: DeploymentPlan
    emissions: np.ndarray  # (n, T), C_i(t) for t = 1..T
    objective_value: float
    reduction_pct: float
    solve_stats: dict

    @property
    def total_offset(self) -> float:
        return float(self.instance.baseline_total - self.emissions[:, -1].sum())


@dataclass
class SweepPoint:
    value: float
    reduction_pct: float | None = None
    objective_value: float | None = None
    any_trading: bool | None = None
    total_re_gw: float | None = None
    total_ccs_t: float | None = None
    error: str | None = None


@dataclass
class SweepResult:
    parameter: str
    grid: list
    points: list
    threshold: float | None  # first grid value where the reduction jumps > delta
    monotone: bool  # reduction_pct non-decreasing along the grid


def compute_emissions(instance: ModelInstance, plan: DeploymentPlan) -> np.ndarray:
    """Per-region emission paths via the telescoped recursion (no re-solve)."""
    n, T = instance.n, instance.T
    offs = plan.ccs_of_region().copy()
    for i, region in enumerate(instance.regions):
        for k, kind in enumerate(TECH_ORDER):
            offs[i, :] += region.tech[kind].g * plan.re_installed[i, k, :]
    baselines = np.array([r.baseline_emissions for r in instance.regions])
    return baselines[:, None] - np.cumsum(offs, axis=1)


def _raise_for_status(lp: LinearProgram, sol) -> None:
    if sol.status == Status.OPTIMAL:
        return
    if sol.status == Status.INFEASIBLE:
        tol = 1e-6 * (1.0 + np.abs(lp.rhs()).max(initial=0.0))
        raise InfeasibleModelError(violated_rows(lp, sol.x, tol))
    if sol.status == Status.UNBOUNDED:
        names = [lp.name_of(sol.ray_var)] if sol.ray_var is not None else []
        raise UnboundedModelError(names)
    raise ScenarioError(f"solver stopped early: {sol.status.value} after {sol.iterations} iterations")


def run_scenario(
    instance: ModelInstance,
    config: ScenarioConfig,
    settings: SolverSettings | None = None,
) -> ScenarioResult:
    """Assemble, solve, and post-process one scenario configuration.

    In max-reduction mode, stage 1 maximises the total offset subject to the
    scenario constraints; stage 2 minimises cost among the (near-)maximisers.
    """
    settings = settings or SolverSettings()
    lp, index = assemble(instance, config)
    stats = {}

    if config.objective_mode == MAX_REDUCTION_LEX:
        off = offset_vector(instance, index)
        lp1 = LinearProgram(
            num_vars=lp.num_vars,
            objective=-off,
            rows=lp.rows,
            lower=lp.lower,
            upper=lp.upper,
            var_names=lp.var_names,
        )
        sol1 = solve(lp1, settings)
        _raise_for_status(lp1, sol1)
        max_offset = -sol1.objective_value
        floor = max_offset * (1.0 - LEX_EPS)
        nz = np.nonzero(off)[0]
        lex_row = Row(idx=nz, val=off[nz], sense=GE, rhs=floor, name="lex_reduction")
        lp2 = LinearProgram(
            num_vars=lp.num_vars,
            objective=lp.objective,
            rows=list(lp.rows) + [lex_row],
            lower=lp.lower,
            upper=lp.upper,
            var_names=lp.var_names,
        )
        sol = solve(lp2, settings)
        _raise_for_status(lp2, sol)
        achieved = float(off @ sol.x)
        if achieved < floor - 1e-6 * (1.0 + abs(floor)):
            raise ScenarioError(
                f"lexicographic stage 2 lost reduction: {achieved} < floor {floor}"
            )
        stats["stage1_offset_t"] = max_offset
        stats["stage1_iterations"] = sol1.iterations
    elif config.objective_mode == COST_ONLY:
        sol = solve(lp, settings)
        _raise_for_status(lp, sol)
    else:
        raise ValueError(f"unknown objective_mode {config.objective_mode!r}")

    plan = extract_plan(sol, index)
    emissions = compute_emissions(instance, plan)
    baseline = instance.baseline_total
    reduction_pct = 100.0 * (baseline - float(emissions[:, -1].sum())) / baseline
    stats.update(
        status=sol.status.value,
        iterations=sol.iterations,
        max_primal_infeasibility=sol.max_primal_infeasibility,
        clamped=plan.clamped,
    )
    return ScenarioResult(
        config=config,
        instance=instance,
        plan=plan,
        emissions=emissions,
        objective_value=sol.objective_value,
        reduction_pct=reduction_pct,
        solve_stats=stats,
    )


def run_all(
    instance: ModelInstance,
    settings: SolverSettings | None = None,
    objective_mode: str = COST_ONLY,
    nonneg_emissions: bool = False,
) -> dict:
    """Scenarios 1-4 on a shared instance. Failures are isolated per scenario:
    the mapped value is then the ScenarioError instead of a result."""
    out = {}
    for sid in (1, 2, 3, 4):
        config = scenario_config(sid, objective_mode=objective_mode, nonneg_emissions=nonneg_emissions)
        try:
            out[sid] = run_scenario(instance, config, settings)
        except ScenarioError as exc:
            out[sid] = exc
    return out


def sweep(
    instance: ModelInstance,
    config: ScenarioConfig,
    parameter: str,
    grid,
    delta_pp: float = 1.0,
    jobs: int | None = None,
    settings: SolverSettings | None = None,
) -> SweepResult:
    """One scenario run per grid value with the parameter's whole series
    replaced by the constant value. Per-point failures never abort the sweep."""
    if parameter not in PARAMETER_KEYS:
        raise ValueError(f"unknown sweep parameter {parameter!r}; expected one of {sorted(PARAMETER_KEYS)}")
    grid = [float(v) for v in grid]
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("grid must be strictly increasing")
    if any(v < 0 for v in grid):
        raise ValueError("grid values must be >= 0")
    key = PARAMETER_KEYS[parameter]

    def one(value):
        point = SweepPoint(value=value)
        try:
            res = run_scenario(instance, config.with_overrides(**{key: value}), settings)
        except ScenarioError as exc:
            point.error = str(exc)
            return point
        point.reduction_pct = res.reduction_pct
        point.objective_value = res.objective_value
        point.any_trading = bool(res.plan.ccs_traded.sum() > 0)
        point.total_re_gw = float(res.plan.re_installed.sum())
        point.total_ccs_t = float(res.plan.ccs_local.sum() + res.plan.ccs_traded.sum())
        return point

    workers = jobs or os.cpu_count() or 1
    with ThreadPoolExecutor(max_workers=workers) as pool:
        points = list(pool.map(one, grid))

    threshold = None
    monotone = True
    prev = None
    for p in points:
        if p.error is not None:
            continue
        if prev is not None:
            if p.reduction_pct < prev - 1e-9:
                monotone = False
            if threshold is None and p.reduction_pct - prev > delta_pp:
                threshold = p.value
        prev = p.reduction_pct
    return SweepResult(parameter=parameter, grid=grid, points=points, threshold=threshold, monotone=monotone)
