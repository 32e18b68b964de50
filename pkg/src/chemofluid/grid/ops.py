"""Discrete differential operators and upwind transport on the MAC grid.

All operators return new arrays and never modify their inputs.
"""
from __future__ import annotations

import numpy as np

from ..errors import StabilityError


def _sl(ndim, axis, s):
    idx = [slice(None)] * ndim
    idx[axis] = s
    return tuple(idx)


def gradient(grid, q):
    """Two-point difference of a cell field onto faces.

    Wall faces carry a zero normal derivative in box mode.
    """
    q = grid.check_cells(q)
    out = []
    for d in range(grid.dim):
        h = grid.h[d]
        if grid.periodic:
            out.append((q - np.roll(q, 1, axis=d)) / h)
        else:
            g = np.zeros(grid.face_shape(d))
            g[_sl(grid.dim, d, slice(1, -1))] = np.diff(q, axis=d) / h
            out.append(g)
    return tuple(out)


def divergence(grid, F):
    """Per-cell sum of face differences divided by the spacing."""
    F = grid.check_faces(F)
    out = np.zeros(grid.shape)
    for d, comp in enumerate(F):
        if grid.periodic:
            out += (np.roll(comp, -1, axis=d) - comp) / grid.h[d]
        else:
            out += np.diff(comp, axis=d) / grid.h[d]
    return out


def laplacian(grid, q):
    """Neumann (box) or periodic Laplacian, equal to divergence(gradient(q))."""
    return divergence(grid, gradient(grid, q))


def vector_laplacian(grid, u):
    """Componentwise Laplacian of a face field with no-slip walls.

    Along its own axis a component is fixed to zero on the wall faces; across
    the other axes the wall sits half a cell away and is imposed with the
    reflected ghost value ``-u``.  Wall entries of the result are zero.
    """
    u = grid.check_faces(u)
    out = []
    for d, comp in enumerate(u):
        lap = np.zeros_like(comp)
        for e in range(grid.dim):
            h2 = grid.h[e] ** 2
            if grid.periodic:
                lap += (np.roll(comp, -1, axis=e) - 2.0 * comp + np.roll(comp, 1, axis=e)) / h2
            elif e == d:
                inner = _sl(grid.dim, e, slice(1, -1))
                lap[inner] += (
                    comp[_sl(grid.dim, e, slice(2, None))]
                    - 2.0 * comp[inner]
                    + comp[_sl(grid.dim, e, slice(None, -2))]
                ) / h2
            else:
                first = comp[_sl(grid.dim, e, slice(0, 1))]
                last = comp[_sl(grid.dim, e, slice(-1, None))]
                padded = np.concatenate([-first, comp, -last], axis=e)
                lap += (
                    padded[_sl(grid.dim, e, slice(2, None))]
                    - 2.0 * comp
                    + padded[_sl(grid.dim, e, slice(None, -2))]
                ) / h2
        if not grid.periodic:
            lap[_sl(grid.dim, d, 0)] = 0.0
            lap[_sl(grid.dim, d, -1)] = 0.0
        out.append(lap)
    return tuple(out)


def cells_to_faces(grid, q):
    """Arithmetic mean of the two cells adjacent to each face.

    Wall faces copy the adjacent cell value.
    """
    q = grid.check_cells(q)
    out = []
    for d in range(grid.dim):
        if grid.periodic:
            out.append(0.5 * (q + np.roll(q, 1, axis=d)))
        else:
            first = q[_sl(grid.dim, d, slice(0, 1))]
            last = q[_sl(grid.dim, d, slice(-1, None))]
            padded = np.concatenate([first, q, last], axis=d)
            out.append(0.5 * (padded[_sl(grid.dim, d, slice(1, None))]
                              + padded[_sl(grid.dim, d, slice(None, -1))]))
    return tuple(out)


def faces_to_cells(grid, F):
    """Average each component from its two bounding faces to the cell centre."""
    F = grid.check_faces(F)
    out = []
    for d, comp in enumerate(F):
        if grid.periodic:
            out.append(0.5 * (comp + np.roll(comp, -1, axis=d)))
        else:
            out.append(0.5 * (comp[_sl(grid.dim, d, slice(1, None))]
                              + comp[_sl(grid.dim, d, slice(None, -1))]))
    return tuple(out)


def cell_gradient(grid, q):
    """Cell-centred gradient: mean of the two face differences per axis."""
    return faces_to_cells(grid, gradient(grid, q))


def donor_values(grid, q, vel_comp, axis):
    """Upwind (donor-cell) values of ``q`` on the faces normal to ``axis``.

    Wall faces in box mode get 0 (no transport through walls).
    """
    d = axis
    if grid.periodic:
        left = np.roll(q, 1, axis=d)
        return np.where(vel_comp > 0, left, q)
    out = np.zeros(grid.face_shape(d))
    inner = _sl(grid.dim, d, slice(1, -1))
    left = q[_sl(grid.dim, d, slice(None, -1))]
    right = q[_sl(grid.dim, d, slice(1, None))]
    out[inner] = np.where(vel_comp[inner] > 0, left, right)
    return out


def advective_flux(grid, q, vel):
    """First-order upwind flux ``vel * q_donor`` on every face."""
    q = grid.check_cells(q)
    vel = grid.check_faces(vel, "velocity")
    flux = []
    for d in range(grid.dim):
        f = vel[d] * donor_values(grid, q, vel[d], d)
        if not grid.periodic:
            f[_sl(grid.dim, d, 0)] = 0.0
            f[_sl(grid.dim, d, -1)] = 0.0
        flux.append(f)
    return tuple(flux)


def courant_number(grid, vel, dt):
    """``dt`` times the largest per-cell outflow rate ``sum_faces max(u_out, 0) / h``.

    At most 1 keeps upwinding monotone.  A cell may lose mass through both
    faces of one axis when ``vel`` is not solenoidal, so the maximum speed
    per axis is not enough.
    """
    vel = grid.check_faces(vel)
    rate = np.zeros(grid.shape)
    for d, v in enumerate(vel):
        if grid.periodic:
            lo, hi = v, np.roll(v, -1, axis=d)
        else:
            lo = np.take(v, np.arange(grid.shape[d]), axis=d)
            hi = np.take(v, np.arange(1, grid.shape[d] + 1), axis=d)
        rate += (np.maximum(hi, 0.0) + np.maximum(-lo, 0.0)) / grid.h[d]
    return dt * float(rate.max())


def upwind_advect(grid, q, vel, dt):
    """Conservative first-order upwind update of cell averages.

    Raises StabilityError when the Courant number exceeds 1, beyond which
    the update is no longer a convex combination of neighbouring values.
    """
    vel = grid.check_faces(vel, "velocity")
    cfl = courant_number(grid, vel, dt)
    if cfl > 1.0 + 1e-12:
        raise StabilityError(f"advective Courant number {cfl:.4g} exceeds 1")
    return q - dt * divergence(grid, advective_flux(grid, q, vel))
