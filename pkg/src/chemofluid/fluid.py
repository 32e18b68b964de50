"""Incompressible fluid step: Yosida-smoothed convection, buoyancy,
implicit viscosity and Chorin projection on the MAC grid."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SolverError, StabilityError
from .grid import (
    cells_to_faces,
    courant_number,
    divergence,
    faces_to_cells,
    gradient,
    helmholtz_dirichlet_solve,
    poisson_neumann_solve,
)
from .grid.ops import _sl


@dataclass
class FluidStepReport:
    divergence: float
    kinetic_energy: float
    enstrophy: float
    residuals: dict


def divergence_norm(grid, u):
    return float(np.max(np.abs(divergence(grid, u))))


def kinetic_energy(grid, u):
    """``0.5 * int |u|^2``."""
    return 0.5 * grid.inner_faces(u, u)


def velocity_gradient_terms(grid, u):
    """Difference quotients ``d_e u_d`` with their quadrature weights.

    Yields ``(d, e, values, weights)``.  ``d_d u_d`` lives at cell centres;
    ``d_e u_d`` (e != d) lives on edges, and at no-slip walls it uses the
    reflected ghost so the wall difference is ``2 u / h`` with half weight.
    With these weights ``sum w * values**2 = -<u, Delta u>``.
    """
    u = grid.check_faces(u)
    vol = grid.cell_volume
    for d, comp in enumerate(u):
        for e in range(grid.dim):
            h = grid.h[e]
            if grid.periodic:
                vals = (np.roll(comp, -1, axis=e) - comp) / h
                yield d, e, vals, np.full(vals.shape, vol)
            elif e == d:
                vals = np.diff(comp, axis=e) / h
                yield d, e, vals, np.full(vals.shape, vol)
            else:
                first = comp[_sl(grid.dim, e, slice(0, 1))]
                last = comp[_sl(grid.dim, e, slice(-1, None))]
                padded = np.concatenate([-first, comp, -last], axis=e)
                vals = np.diff(padded, axis=e) / h
                w = np.full(vals.shape, vol)
                w[_sl(grid.dim, e, 0)] *= 0.5
                w[_sl(grid.dim, e, -1)] *= 0.5
                yield d, e, vals, w


def enstrophy(grid, u):
    """``int |grad u|^2`` (Frobenius), consistent with the discrete viscosity."""
    return float(sum(np.sum(w * v**2) for _, _, v, w in velocity_gradient_terms(grid, u)))


def _zero_walls(grid, u):
    if grid.periodic:
        return u
    out = []
    for d, comp in enumerate(u):
        comp = comp.copy()
        comp[_sl(grid.dim, d, 0)] = 0.0
        comp[_sl(grid.dim, d, -1)] = 0.0
        out.append(comp)
    return tuple(out)


def project(grid, u_star, tol=1e-10, method="direct"):
    """Helmholtz projection ``u = u_star - grad(p)`` with ``div u ~ 0``.

    Returns ``(u, p)`` with ``p`` mean-free and ``max|div u| <= tol``.
    In box mode the wall-normal components of ``u_star`` must already be
    zero.
    """
    u_star = grid.check_faces(u_star)
    if not grid.periodic:
        for d, comp in enumerate(u_star):
            walls = max(np.max(np.abs(comp[_sl(grid.dim, d, 0)])),
                        np.max(np.abs(comp[_sl(grid.dim, d, -1)])))
            if walls != 0.0:
                raise ValueError(f"normal velocity on walls must be zero (component {d}: {walls:.3e})")
    div = divergence(grid, u_star)
    scale = float(np.max(np.abs(div)))
    if scale <= tol:
        return tuple(c.copy() for c in u_star), np.zeros(grid.shape)
    p = poisson_neumann_solve(grid, div, tol=max(tol / scale, 1e-13), method=method)
    gp = gradient(grid, p)
    u = tuple(a - b for a, b in zip(u_star, gp))
    res = divergence_norm(grid, u)
    if res > tol:
        raise SolverError(f"projection left divergence {res:.3e} > {tol:.1e}", res)
    return u, p


def yosida_smooth(grid, u, eps, tol=1e-10, method="direct"):
    """Resolvent smoothing ``(1 + eps*A)^-1 u`` of the Stokes operator.

    Realized as a componentwise ``(I - eps*Delta)`` solve with no-slip
    walls followed by the projection; the result is divergence free and
    its L2 norm does not exceed that of ``u``.
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    w = helmholtz_dirichlet_solve(grid, u, eps, tol=tol, method=method)
    v, _ = project(grid, w, tol=tol, method=method)
    return v


def _interp_along(grid, a, axis):
    """Average a face component to the nodes of ``axis`` (a cell axis of ``a``)."""
    if grid.periodic:
        return 0.5 * (a + np.roll(a, 1, axis=axis))
    shape = list(a.shape)
    shape[axis] += 1
    out = np.zeros(shape)
    out[_sl(grid.dim, axis, slice(1, -1))] = 0.5 * (
        a[_sl(grid.dim, axis, slice(None, -1))] + a[_sl(grid.dim, axis, slice(1, None))]
    )
    return out


def convect(grid, u, a, dt):
    """Explicit conservative upwind transport of each velocity component by ``a``.

    Each component is advanced on its own staggered control volumes; the
    transporting velocity on their faces is interpolated from ``a`` so that
    a discretely solenoidal ``a`` yields solenoidal control-volume fluxes.
    """
    u = grid.check_faces(u)
    a = grid.check_faces(a, "advecting velocity")
    cfl = courant_number(grid, a, dt)
    if cfl > 1.0 + 1e-12:
        raise StabilityError(f"momentum Courant number {cfl:.4g} exceeds 1")
    a_cells = faces_to_cells(grid, a)
    out = []
    for d, q in enumerate(u):
        dq = np.zeros_like(q)
        for e in range(grid.dim):
            h = grid.h[e]
            if e == d:
                vel = a_cells[d]
                if grid.periodic:
                    right = np.roll(q, -1, axis=d)
                    F = vel * np.where(vel > 0, q, right)
                    dq -= (F - np.roll(F, 1, axis=d)) / h
                else:
                    left = q[_sl(grid.dim, d, slice(None, -1))]
                    right = q[_sl(grid.dim, d, slice(1, None))]
                    F = vel * np.where(vel > 0, left, right)
                    zero = np.zeros_like(F[_sl(grid.dim, d, slice(0, 1))])
                    dq -= np.diff(np.concatenate([zero, F, zero], axis=d), axis=d) / h
            else:
                vel = _interp_along(grid, a[e], d)
                if grid.periodic:
                    F = vel * np.where(vel > 0, np.roll(q, 1, axis=e), q)
                    dq -= (np.roll(F, -1, axis=e) - F) / h
                else:
                    F = np.zeros(vel.shape)
                    inner = _sl(grid.dim, e, slice(1, -1))
                    lo = q[_sl(grid.dim, e, slice(None, -1))]
                    hi = q[_sl(grid.dim, e, slice(1, None))]
                    F[inner] = vel[inner] * np.where(vel[inner] > 0, lo, hi)
                    dq -= np.diff(F, axis=e) / h
        out.append(q + dt * dq)
    return _zero_walls(grid, tuple(out))


def buoyancy(grid, n, phi_grad):
    """Face forcing ``n_face * grad Phi`` with arithmetic face averages of n."""
    n_faces = cells_to_faces(grid, n)
    return _zero_walls(grid, tuple(nf * g for nf, g in zip(n_faces, phi_grad)))


def fluid_step(grid, state, params, dt, tol=1e-10, method="direct"):
    """Advance the velocity by one Chorin step.

    Order: Yosida smoothing of the transporting velocity, explicit upwind
    convection by ``kappa * Y_eps u``, implicit viscosity ``(I - dt Delta)``,
    buoyancy, projection.  Buoyancy is added after the viscous solve so that
    a constant density produces an exact discrete gradient, which the
    projection removes.  Returns ``(u, P, report)`` where ``P`` follows the
    sign convention ``u_t = Delta u + grad P + ...``.
    """
    u = grid.check_faces(state.u, "velocity")
    residuals = {}
    if params.kappa != 0.0:
        v = yosida_smooth(grid, u, params.eps, tol=tol, method=method)
        residuals["yosida_divergence"] = divergence_norm(grid, v)
        a = tuple(params.kappa * c for c in v)
        u = convect(grid, u, a, dt)
    u = helmholtz_dirichlet_solve(grid, u, dt, tol=tol, method=method)
    if any(g != 0.0 for g in params.phi_grad):
        if len(params.phi_grad) != grid.dim:
            raise ValueError("phi_grad dimension does not match the grid")
        force = buoyancy(grid, state.n, params.phi_grad)
        u = tuple(c + dt * f for c, f in zip(u, force))
    u, p = project(grid, u, tol=tol, method=method)
    residuals["divergence"] = divergence_norm(grid, u)
    report = FluidStepReport(
        divergence=residuals["divergence"],
        kinetic_energy=kinetic_energy(grid, u),
        enstrophy=enstrophy(grid, u),
        residuals=residuals,
    )
    return u, -p / dt, report
