"""Positivity-preserving, conservative updates for cell density and oxygen."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvariantViolation, StabilityError
from .grid import (
    advective_flux,
    cells_to_faces,
    courant_number,
    divergence,
    gradient,
    helmholtz_neumann_solve,
    upwind_advect,
)
from .grid.ops import donor_values
from .model import D_eps, F_eps, F_eps_prime

NEGATIVITY_TOL = 1e-13


@dataclass
class State:
    """Cell-centred ``n``, ``c``, ``p`` and face-centred ``u`` at time ``t``."""

    n: np.ndarray
    c: np.ndarray
    u: tuple
    p: np.ndarray = None
    t: float = 0.0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.u = tuple(self.u)
        if self.p is None:
            self.p = np.zeros_like(self.n)

    def copy(self):
        return State(self.n.copy(), self.c.copy(), tuple(c.copy() for c in self.u),
                     self.p.copy(), self.t, dict(self.meta))


def _clip_small_negatives(q, name):
    lo = float(q.min())
    if lo < -NEGATIVITY_TOL:
        raise InvariantViolation(f"{name} became negative ({lo:.3e}); time step or flux bug")
    if lo < 0.0:
        q = np.maximum(q, 0.0)
    return q


# --- fluxes -----------------------------------------------------------------


def chemotactic_drift(grid, c, params):
    """Face drift ``chi(c_face) * d c``."""
    chi = params.kinetics.chi
    c_faces = cells_to_faces(grid, c)
    return tuple(chi(cf) * g for cf, g in zip(c_faces, gradient(grid, c)))


def chemotaxis_flux(grid, n, c, params):
    """Saturated chemotactic flux ``n F_eps'(n) chi(c) grad c`` on faces.

    ``n F_eps'(n)`` is taken from the donor cell chosen by the sign of the
    drift, so the flux is monotone and bounded by ``max|drift| / eps``.
    """
    n = grid.check_cells(n, "n")
    carrier = n * F_eps_prime(params.eps, n)
    drift = chemotactic_drift(grid, c, params)
    return tuple(w * donor_values(grid, carrier, w, d) for d, w in enumerate(drift))


def diffusive_flux_n(grid, n, params):
    """``D_eps(n_face) * d n`` with ``n_face`` the mean of the adjacent cells."""
    n = grid.check_cells(n, "n")
    n_faces = cells_to_faces(grid, n)
    return tuple(D_eps(params, nf) * g for nf, g in zip(n_faces, gradient(grid, n)))


# --- time step bounds -------------------------------------------------------


def stability_rates(grid, state, params):
    """Inverse time scales of the explicit n-update: advection, diffusion, chemotaxis.

    Their sum bounds the per-cell outflow coefficient, so ``dt * sum <= 1``
    keeps the update a convex combination.
    """
    h = grid.h
    r_adv = courant_number(grid, state.u, 1.0)
    d_max = float(np.max(D_eps(params, np.maximum(state.n, 0.0))))
    r_diff = 2.0 * sum(d_max / hd**2 for hd in h)
    fp_max = float(np.max(F_eps_prime(params.eps, np.maximum(state.n, 0.0))))
    drift = chemotactic_drift(grid, state.c, params)
    r_chem = 2.0 * fp_max * sum(float(np.max(np.abs(w))) / hd for w, hd in zip(drift, h))
    return {"advection": r_adv, "diffusion": r_diff, "chemotaxis": r_chem}


def cfl_bounds(grid, state, params, safety=0.4):
    """Individual time-step bounds ``safety / rate`` (inf when a rate vanishes)."""
    return {k: (safety / r if r > 0 else np.inf)
            for k, r in stability_rates(grid, state, params).items()}


def cfl_dt(grid, state, params, safety=0.4):
    """Admissible explicit step ``safety / (r_adv + r_diff + r_chem)``."""
    total = sum(stability_rates(grid, state, params).values())
    if total == 0:
        return np.inf
    return safety / total


# --- updates ----------------------------------------------------------------


def update_n(grid, state, params, dt):
    """Explicit conservative update of the cell density.

    ``n - dt * div(u n - D_eps(n) grad n + n F_eps'(n) chi(c) grad c)``;
    total mass is conserved to round-off and ``n`` stays nonnegative.
    """
    n = grid.check_cells(state.n, "n")
    rate = sum(stability_rates(grid, state, params).values())
    if dt * rate > 1.0 + 1e-12:
        raise StabilityError(f"n-update step {dt:.3e} exceeds stability limit {1.0 / rate:.3e}")
    adv = advective_flux(grid, n, state.u)
    chem = chemotaxis_flux(grid, n, state.c, params)
    diff = diffusive_flux_n(grid, n, params)
    total = tuple(a + b - c for a, b, c in zip(adv, chem, diff))
    return _clip_small_negatives(n - dt * divergence(grid, total), "n")


def update_n_classical(grid, state, params, dt):
    """Unregularized linear-diffusion Keller-Segel update (reference path).

    Flux ``u n - a grad n + n chi(c) grad c`` with the same upwinding as
    ``update_n``; used to confirm that ``update_n`` reduces to it for
    ``m = 1`` and vanishing ``eps``.
    """
    n = grid.check_cells(state.n, "n")
    a = params.diff_coeff
    adv = advective_flux(grid, n, state.u)
    drift = chemotactic_drift(grid, state.c, params)
    carrier = n * 1.0
    chem = tuple(w * donor_values(grid, carrier, w, d) for d, w in enumerate(drift))
    diff = tuple(a * g for g in gradient(grid, n))
    total = tuple(x + y - z for x, y, z in zip(adv, chem, diff))
    return n - dt * divergence(grid, total)


def update_c(grid, state, params, dt, tol=1e-10, method="direct"):
    """Oxygen update: upwind advection, implicit diffusion, implicit consumption.

    The consumption factor ``1 / (1 + dt F_eps(n) f(c)/c)`` is applied to the
    diffused field, so ``0 <= c_new <= max(c_old)``.  Round-off excursions
    (at most 1e-10 relative) outside that range are clipped.
    """
    c = grid.check_cells(state.c, "c")
    c_max = float(c.max())
    c1 = upwind_advect(grid, c, state.u, dt)
    c2 = helmholtz_neumann_solve(grid, c1, dt, tol=tol, method=method)
    c2 = _clip_small_negatives(c2, "c")
    consumption = F_eps(params.eps, np.maximum(state.n, 0.0)) * params.kinetics.lam(c2)
    c3 = c2 / (1.0 + dt * consumption)
    over = float(c3.max()) - c_max
    if over > 1e-10 * max(c_max, 1.0):
        raise InvariantViolation(f"oxygen maximum grew by {over:.3e}")
    return np.minimum(c3, c_max)


def advective_dt(grid, u, safety=1.0):
    """Largest step with advective Courant number ``safety``."""
    r = courant_number(grid, u, 1.0)
    return np.inf if r == 0 else safety / r
