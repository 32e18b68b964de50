"""Refinement and continuation studies: eps-study, heat MMS, Barenblatt."""

import csv
import os
from dataclasses import dataclass, field

import numpy as np

from ..diagnostics import CosineTestFunction, StreamTestFunction, weak_residual
from ..errors import InvariantViolation
from ..grid import Grid
from ..model import ModelParams
from ..reference import (
    barenblatt,
    barenblatt_exponents,
    barenblatt_radius,
    heat_neumann_solution,
)
from ..transport import State, cfl_dt, update_c, update_n
from .initial import build_grid, initial_state
from .run import run, step


def observed_orders(sizes, errors):
    """``log2``-style slopes ``log(e_i/e_{i+1}) / log(n_{i+1}/n_i)``."""
    out = []
    for (n0, e0), (n1, e1) in zip(zip(sizes, errors), zip(sizes[1:], errors[1:])):
        if e0 == 0.0 or e1 == 0.0:
            out.append(np.inf if e1 == 0.0 else -np.inf)
        else:
            out.append(float(np.log(e0 / e1) / np.log(n1 / n0)))
    return out


def _write_rows(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([f"{v:.17g}" if isinstance(v, float) else v for v in r])


# --- eps continuation -------------------------------------------------------

ACCUMULATORS = ("A1", "A2", "A3", "A4", "A5", "A6", "A7")
BOUNDED = ("A1", "A2", "A3")


@dataclass
class EpsStudyResult:
    eps: tuple
    finals: list
    distances: dict
    accumulators: dict
    bound_ratio: float
    bounded: dict = field(default_factory=dict)
    cauchy: dict = field(default_factory=dict)
    runs: list = field(default_factory=list, repr=False)

    @property
    def passed(self):
        return all(self.bounded.values()) and all(self.cauchy.values())

    def format(self):
        lines = ["eps study: " + ", ".join(f"{e:g}" for e in self.eps)]
        for k in BOUNDED:
            vals = ", ".join(f"{v:.6g}" for v in self.accumulators[k])
            lines.append(f"  {k}: {vals}  within x{self.bound_ratio:g} of median: {self.bounded[k]}")
        for k, v in self.distances.items():
            vals = ", ".join(f"{x:.3e}" for x in v)
            lines.append(f"  {k}: {vals}  non-increasing: {self.cauchy[k]}")
        lines.append("PASS" if self.passed else "FAIL")
        return "\n".join(lines)


def eps_study(config, eps_list, bound_ratio=2.0, out_dir=None):
    """Run ``config`` once per eps and compare final fields and accumulators.

    Checks (i) that each of A1..A3 lies within ``bound_ratio`` of its median
    across eps, and (ii) that consecutive final-field distances
    (``n`` in L1, ``c`` and ``u`` in L2) do not increase along the sequence.
    The second is a trend heuristic, not a convergence proof.
    """
    eps = tuple(float(e) for e in eps_list)
    if len(eps) < 3:
        raise ValueError("the eps study needs at least three values")
    if any(b > a for a, b in zip(eps, eps[1:])):
        raise ValueError("eps values must be decreasing")
    results = []
    for e in eps:
        sub = None if out_dir is None else os.path.join(out_dir, f"eps_{e:g}")
        results.append(run(config.replace(**{"model.eps": e}), out_dir=sub))
    grid = results[0].grid
    vol = grid.cell_volume
    dist = {"n_L1": [], "c_L2": [], "u_L2": []}
    for a, b in zip(results, results[1:]):
        sa, sb = a.state, b.state
        dist["n_L1"].append(float(np.sum(np.abs(sa.n - sb.n))) * vol)
        dist["c_L2"].append(float(np.sqrt(np.sum((sa.c - sb.c) ** 2) * vol)))
        du = tuple(x - y for x, y in zip(sa.u, sb.u))
        dist["u_L2"].append(float(np.sqrt(grid.inner_faces(du, du))))
    finals = [r.records[-1] for r in results]
    acc = {k: [max(getattr(rec, k) for rec in r.records) for r in results] for k in ACCUMULATORS}
    bounded = {}
    for k in BOUNDED:
        v = np.array(acc[k])
        med = float(np.median(v))
        bounded[k] = bool(np.all(v <= bound_ratio * med) and np.all(v * bound_ratio >= med))
    cauchy = {k: all(y <= x * (1 + 1e-12) + 1e-15 for x, y in zip(v, v[1:])) for k, v in dist.items()}
    out = EpsStudyResult(eps, finals, dist, acc, bound_ratio, bounded, cauchy, results)
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        _write_rows(os.path.join(out_dir, "eps_study.csv"),
                    ["eps", *ACCUMULATORS, "mass", "c_max"],
                    [[e, *(acc[k][i] for k in ACCUMULATORS), finals[i].mass, finals[i].c_max]
                     for i, e in enumerate(eps)])
        _write_rows(os.path.join(out_dir, "eps_distances.csv"),
                    ["eps_a", "eps_b", *dist],
                    [[eps[i], eps[i + 1], *(dist[k][i] for k in dist)] for i in range(len(eps) - 1)])
    return out


# --- manufactured / series solutions -----------------------------------------


@dataclass
class ConvergenceTable:
    name: str
    sizes: tuple
    errors: dict
    orders: dict
    threshold: float
    extra: dict = field(default_factory=dict)
    monotone_required: bool = False

    @property
    def passed(self):
        ok = all(min(o) >= self.threshold for o in self.orders.values())
        if self.monotone_required:
            ok = ok and all(all(b < a for a, b in zip(e, e[1:])) for e in self.errors.values())
        return ok

    def format(self):
        lines = [f"{self.name}: sizes {', '.join(map(str, self.sizes))}"]
        for k, errs in self.errors.items():
            lines.append(f"  {k} error: " + ", ".join(f"{e:.4e}" for e in errs))
            lines.append(f"  {k} order: " + ", ".join(f"{o:.3f}" for o in self.orders[k]))
        for k, v in self.extra.items():
            lines.append(f"  {k}: {v}")
        lines.append(f"threshold {self.threshold:g}: {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines)

    def write(self, path):
        rows = []
        for i, n in enumerate(self.sizes):
            rows.append([n, *(self.errors[k][i] for k in self.errors),
                         *(self.orders[k][i - 1] if i else float("nan") for k in self.orders)])
        _write_rows(path, ["n", *(f"{k}_error" for k in self.errors),
                           *(f"{k}_order" for k in self.orders)], rows)


DEFAULT_MODES = {(0, 0): 1.0, (1, 1): 0.5}


def mms_validate(sizes=(32, 64, 128), modes=None, t_final=0.02, dt_factor=0.2,
                 threshold=1.8, out_dir=None, tol=1e-12):
    """Heat sub-case against the cosine-series oracle, ``dt = dt_factor * h^2``.

    ``c``: ``n = 0`` and ``u = 0`` reduce the oxygen update to implicit heat
    flow.  ``n``: uniform ``c`` (no chemotaxis), ``u = 0`` and ``m = 1``
    reduce the cell update to explicit linear diffusion.  Reports L-infinity
    errors at ``t_final`` and observed orders.
    """
    sizes = tuple(int(s) for s in sizes)
    if len(sizes) < 3:
        raise ValueError("need at least three grid sizes")
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise ValueError("sizes must increase")
    modes = DEFAULT_MODES if modes is None else modes
    params = ModelParams(m=1.0, diff_coeff=1.0, eps=1e-2, kappa=0.0, phi_grad=(0.0, 0.0))
    errs = {"c": [], "n": []}
    for k in sizes:
        grid = Grid((k, k))
        X = grid.cell_coords()
        q0 = heat_neumann_solution(modes, X, 0.0)
        exact = heat_neumann_solution(modes, X, t_final)
        steps = int(np.ceil(t_final / (dt_factor * grid.h[0] ** 2)))
        dt = t_final / steps
        zero_u = grid.zeros_faces()
        sc = State(n=np.zeros(grid.shape), c=q0.copy(), u=zero_u)
        sn = State(n=q0.copy(), c=np.ones(grid.shape), u=zero_u)
        for _ in range(steps):
            sc.c = update_c(grid, sc, params, dt, tol=tol)
            sn.n = update_n(grid, sn, params, dt)
        errs["c"].append(float(np.max(np.abs(sc.c - exact))))
        errs["n"].append(float(np.max(np.abs(sn.n - exact))))
    orders = {k: observed_orders(sizes, v) for k, v in errs.items()}
    for k, v in errs.items():
        if all(e <= 1e-13 for e in v):
            orders[k] = [np.inf] * (len(sizes) - 1)
    table = ConvergenceTable("heat series", sizes, errs, orders, threshold,
                             extra={"t_final": t_final, "dt": f"{dt_factor:g} h^2"})
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        table.write(os.path.join(out_dir, "mms.csv"))
    return table


def barenblatt_validate(sizes=(64, 128, 256), m=2.0, a=1.0, mass=1.0, r0=0.15, r1=0.35,
                        eps=1e-10, safety=0.4, threshold=0.8, out_dir=None):
    """Porous-medium sub-case against the Barenblatt source solution.

    The profile is sampled at cell centres at the time its support radius is
    ``r0`` and evolved with ``u = 0`` and uniform ``c`` until the radius is
    ``r1``; the L1 error against the exact profile is reported with the
    observed order.  The mass column records the discrete mass per size.
    """
    sizes = tuple(int(s) for s in sizes)
    if m <= 1:
        raise ValueError("the Barenblatt check needs m > 1")
    if len(sizes) < 2:
        raise ValueError("need at least two grid sizes")
    params = ModelParams(m=m, diff_coeff=a, eps=eps, kappa=0.0, phi_grad=(0.0, 0.0))
    dim = 2
    unit = barenblatt_radius(m, a, mass, 1.0, dim)
    from ..reference import barenblatt_exponents
    _, beta = barenblatt_exponents(m, dim)
    t0 = (r0 / unit) ** (1.0 / beta)
    t1 = (r1 / unit) ** (1.0 / beta)
    center = (0.5, 0.5)
    errors, masses, drift = [], [], []
    for k in sizes:
        grid = Grid((k, k))
        X = grid.cell_coords()
        n = barenblatt(m, a, mass, list(X), t0, center=center)
        state = State(n=n, c=np.ones(grid.shape), u=grid.zeros_faces(), t=t0)
        m0 = grid.integrate(state.n)
        while state.t < t1 * (1 - 1e-14):
            dt = min(cfl_dt(grid, state, params, safety), t1 - state.t)
            state.n = update_n(grid, state, params, dt)
            state.t += dt
        exact = barenblatt(m, a, mass, list(X), t1, center=center)
        errors.append(grid.integrate(np.abs(state.n - exact)))
        m1 = grid.integrate(state.n)
        masses.append(m1)
        drift.append(abs(m1 - m0) / m0)
        if drift[-1] > 1e-12:
            raise InvariantViolation(f"mass drift {drift[-1]:.3e} on {k}^2")
    table = ConvergenceTable("barenblatt", sizes, {"n_L1": errors},
                             {"n_L1": observed_orders(sizes, errors)}, threshold,
                             extra={"m": m, "t0": t0, "t1": t1,
                                    "max mass drift": f"{max(drift):.2e}"},
                             monotone_required=True)
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        rows = [[k, e, ms, d] for k, e, ms, d in zip(sizes, errors, masses, drift)]
        _write_rows(os.path.join(out_dir, "barenblatt.csv"), ["n", "l1_error", "mass", "mass_drift"], rows)
    return table


# --- weak formulation consistency ---------------------------------------------


def default_test_functions(lengths, t_end):
    """One fixed smooth admissible test function per equation.

    The modes are chosen so that none of them is orthogonal to data that
    are mirror symmetric about the box centre (like the default blob).
    """
    dim = len(lengths)
    scalar = CosineTestFunction((2,) * dim, tuple(lengths), t_end)
    stream = StreamTestFunction(tuple(lengths), t_end, (1,) + (0,) * (dim - 1))
    return {"n-eq": scalar, "c-eq": scalar, "u-eq": stream}


def weak_refinement(config, sizes=(16, 32, 64), t_final=2e-3, safety=0.4,
                    threshold=1.8, test_functions=None):
    """Weak-form residuals under simultaneous halving of ``h`` and ``dt``.

    The finest step is the explicit stability bound of the finest initial
    state (scaled by ``safety``); coarser levels double it per level, so
    every level shares the sampling times ``k * dt`` of the coarsest.  Each
    level keeps every state (no diagnostics evaluation) and the residuals
    of the three identities are tabulated with their reduction factors.
    """
    sizes = tuple(int(s) for s in sizes)
    if len(sizes) < 2 or any(b != 2 * a for a, b in zip(sizes, sizes[1:])):
        raise ValueError("sizes must form a doubling chain")
    fine = config.replace(**{"grid.n": (sizes[-1],) * len(config.grid.n)})
    g_f = build_grid(fine)
    params = fine.model_params()
    dt_f = cfl_dt(g_f, initial_state(fine, g_f), params, safety)
    steps_f = int(np.ceil(t_final / dt_f))
    steps_f += (-steps_f) % (2 ** (len(sizes) - 1))
    fns = test_functions or default_test_functions(g_f.lengths, t_final)
    residuals = {k: [] for k in fns}
    for level, k in enumerate(sizes):
        cfg = config.replace(**{"grid.n": (k,) * len(config.grid.n)})
        grid = build_grid(cfg)
        steps = steps_f // 2 ** (len(sizes) - 1 - level)
        dt = t_final / steps
        state = initial_state(cfg, grid)
        traj = [state.copy()]
        for i in range(steps):
            state, _ = step(grid, state, params, dt, tol=cfg.solver.tol, method=cfg.solver.method)
            state.t = (i + 1) * dt if i + 1 < steps else t_final
            traj.append(state)
        for which, fn in fns.items():
            residuals[which].append(weak_residual(grid, traj, params, fn, which, tol=cfg.solver.tol))
    factors = {w: [float(a / b) if b > 0 else np.inf for a, b in zip(v, v[1:])]
               for w, v in residuals.items()}
    orders = {w: [float(np.log2(f)) if np.isfinite(f) and f > 0 else np.inf for f in fs]
              for w, fs in factors.items()}
    table = ConvergenceTable("weak residual", sizes, residuals, orders, float(np.log2(threshold)),
                             extra={"t_final": t_final, "fine dt": t_final / steps_f,
                                    "reduction factors": {w: [round(f, 3) for f in fs]
                                                          for w, fs in factors.items()}})
    return table
