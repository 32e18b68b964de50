"""Run orchestration: time stepping, diagnostics cadence, snapshots, invariant audit."""

import logging
import os
from dataclasses import dataclass, field

import numpy as np

from .. import diagnostics
from ..errors import ChemoFluidError, ConfigError, InvariantViolation, SolverError
from ..fluid import fluid_step
from ..grid import write_snapshot
from ..model import validate_assumptions
from ..transport import cfl_dt, update_c, update_n
from .initial import build_grid, initial_state

log = logging.getLogger(__name__)

MASS_RTOL = 1e-12
CMAX_ATOL = 1e-12
EXIT_OK, EXIT_INVARIANT, EXIT_CONFIG, EXIT_SOLVER = 0, 2, 3, 4


def exit_code_for(exc):
    cause = getattr(exc, "cause", exc)
    if isinstance(cause, InvariantViolation):
        return EXIT_INVARIANT
    if isinstance(cause, ConfigError):
        return EXIT_CONFIG
    if isinstance(cause, (SolverError, ChemoFluidError)):
        return EXIT_SOLVER
    return EXIT_SOLVER


class RunFailure(ChemoFluidError):
    """A run stopped early; carries the step index and the records so far."""

    def __init__(self, step, cause, records, csv_path=None):
        super().__init__(f"step {step}: {type(cause).__name__}: {cause}")
        self.step = step
        self.cause = cause
        self.records = records
        self.csv_path = csv_path


@dataclass
class RunResult:
    state: object
    records: list
    grid: object
    params: object
    steps: int
    csv_path: str = None
    snapshots: list = field(default_factory=list)
    max_divergence: float = 0.0
    trajectory: list = field(default_factory=list)


def step(grid, state, params, dt, tol=1e-10, method="direct"):
    """One full split step: fluid, then oxygen, then cells."""
    u, P, report = fluid_step(grid, state, params, dt, tol=tol, method=method)
    mid = state.copy()
    mid.u = u
    mid.p = P
    mid.c = update_c(grid, mid, params, dt, tol=tol, method=method)
    mid.n = update_n(grid, mid, params, dt)
    mid.t = state.t + dt
    return mid, report


def _snapshot(out_dir, grid, state, index):
    paths = []
    snap_dir = os.path.join(out_dir, "snapshots")
    os.makedirs(snap_dir, exist_ok=True)
    for name, values, role in (("n", state.n, "cell"), ("c", state.c, "cell"),
                               *((f"u{'xyz'[d]}", comp, f"face-{'xyz'[d]}") for d, comp in enumerate(state.u))):
        path = os.path.join(snap_dir, f"{name}_{index:04d}.cfx")
        write_snapshot(path, grid, values, state.t, name, role)
        paths.append(path)
    return paths


def _audit(rec, first, c_max_prev, step_no):
    drift = abs(rec.mass - first.mass) / abs(first.mass) if first.mass else abs(rec.mass)
    if drift > MASS_RTOL:
        raise InvariantViolation(f"relative mass drift {drift:.3e} at step {step_no}")
    if rec.c_max > c_max_prev + CMAX_ATOL:
        raise InvariantViolation(f"c_max grew from {c_max_prev!r} to {rec.c_max!r}")
    if rec.c_min < 0:
        raise InvariantViolation(f"negative oxygen {rec.c_min!r} at step {step_no}")


def run(config, out_dir=None, state=None, keep_trajectory=False, check_assumptions=True):
    """Integrate ``config`` to ``run.t_final``.

    Writes the diagnostics CSV (and snapshots at ``run.snapshot_times``)
    into ``out_dir`` when given.  With ``run.record_interval`` set, steps
    are shortened to land on every multiple of it and records are taken
    there; otherwise a record is taken every ``run.record_every`` steps and
    at the final time.  Raises :class:`RunFailure` on any module error after
    writing the partial CSV.
    """
    config.validate()
    params = config.model_params()
    grid = build_grid(config)
    state = initial_state(config, grid) if state is None else state.copy()
    rc, sc = config.run, config.solver
    if check_assumptions:
        report = validate_assumptions(params, c_max_probe=max(float(state.c.max()), 1e-12))
        if not report.passed:
            names = ", ".join(report.failed)
            raise ConfigError(f"model assumptions not satisfied: {names}")
    csv_path = None
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        csv_path = os.path.join(out_dir, config.output.csv_name)

    records = [diagnostics.evaluate(grid, state, params)]
    trajectory = [state.copy()] if keep_trajectory else []
    snapshots = []
    pending_snaps = sorted(set(rc.snapshot_times))
    if out_dir is not None and config.output.snapshots and pending_snaps and pending_snaps[0] == 0.0:
        snapshots += _snapshot(out_dir, grid, state, 0)
        pending_snaps.pop(0)
    t_end = rc.t_final
    t_start = state.t
    interval = rc.record_interval
    next_record = interval if interval else None
    c_max_prev = records[0].c_max
    max_div = 0.0
    steps = 0
    snap_index = 1 if snapshots else 0
    try:
        while state.t < t_end * (1.0 - 1e-14) and steps < rc.max_steps:
            dt = rc.dt if rc.dt_policy == "fixed" else cfl_dt(grid, state, params, rc.safety)
            if not np.isfinite(dt):
                dt = t_end - state.t
            targets = [t_end]
            if next_record is not None:
                targets.append(next_record)
            if pending_snaps:
                targets.append(pending_snaps[0])
            target = min(targets)
            landed = False
            if state.t + dt >= target * (1.0 - 1e-12):
                dt = target - state.t
                landed = True
            state, report = step(grid, state, params, dt, tol=sc.tol, method=sc.method)
            if landed:
                state.t = target
            elif rc.dt_policy == "fixed" and not interval and not rc.snapshot_times:
                state.t = t_start + (steps + 1) * rc.dt
            steps += 1
            max_div = max(max_div, report.divergence)
            at_end = state.t >= t_end * (1.0 - 1e-14)
            on_interval = next_record is not None and landed and abs(state.t - next_record) <= 1e-12 * max(1.0, t_end)
            if on_interval:
                next_record = min(next_record + interval, t_end) if next_record < t_end else None
            take = (on_interval or at_end) if interval else (steps % rc.record_every == 0 or at_end)
            if take:
                rec = diagnostics.evaluate(grid, state, params, prev=records[-1])
                _audit(rec, records[0], c_max_prev, steps)
                c_max_prev = rec.c_max
                records.append(rec)
                if keep_trajectory:
                    trajectory.append(state.copy())
            if pending_snaps and landed and abs(state.t - pending_snaps[0]) <= 1e-12 * max(1.0, t_end):
                pending_snaps.pop(0)
                if out_dir is not None and config.output.snapshots:
                    snapshots += _snapshot(out_dir, grid, state, snap_index)
                    snap_index += 1
    except ChemoFluidError as exc:
        if csv_path:
            diagnostics.write_csv(csv_path, records)
        log.error("run aborted at step %d: %s", steps + 1, exc)
        raise RunFailure(steps + 1, exc, records, csv_path) from exc
    if records[-1].t != state.t:
        records.append(diagnostics.evaluate(grid, state, params, prev=records[-1]))
        if keep_trajectory:
            trajectory.append(state.copy())
    if csv_path:
        diagnostics.write_csv(csv_path, records)
    return RunResult(state, records, grid, params, steps, csv_path, snapshots, max_div, trajectory)
