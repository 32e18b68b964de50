"""Initial-condition presets.

All presets give ``n0 > 0`` (a positive floor under the profile),
``c0 >= 0`` and a discretely divergence-free ``u0``.
"""

import numpy as np

from ..errors import ConfigError
from ..grid import Grid
from ..transport import State


def build_grid(config):
    g = config.grid
    return Grid(tuple(g.n), lengths=tuple(g.lengths) or None, bc=g.bc)


def _blob(grid, init):
    center = init.center or tuple(0.5 * L for L in grid.lengths)
    X = grid.cell_coords()
    r2 = sum((x - c) ** 2 for x, c in zip(X, center))
    bump = np.exp(-0.5 * r2 / init.width**2)
    # normalize on the grid so the discrete mass of the bump is exact
    bump *= init.mass / grid.integrate(bump)
    return bump + init.floor


def _stream_velocity(grid, amplitude):
    """Discrete curl of ``amplitude * prod sin^2(pi x_i / L_i)`` (first two axes)."""
    out = []
    for d in range(grid.dim):
        if d >= 2 or amplitude == 0.0:
            out.append(np.zeros(grid.face_shape(d)))
            continue
        other = 1 - d
        axes = [grid.nodes_1d(k) if k in (d, other) else grid.centers_1d(k) for k in range(grid.dim)]
        if grid.periodic:
            axes = [np.append(a, grid.lengths[k]) if k == other else a for k, a in enumerate(axes)]
        X = np.meshgrid(*axes, indexing="ij")
        A = amplitude * np.ones(X[0].shape)
        for x, L in zip(X, grid.lengths):
            A = A * np.sin(np.pi * x / L) ** 2
        diff = np.diff(A, axis=other) / grid.h[other]
        out.append(diff if d == 0 else -diff)
    return tuple(out)


def initial_state(config, grid=None):
    """Build the t = 0 state for ``config.init`` (seeded where random)."""
    grid = build_grid(config) if grid is None else grid
    init = config.init
    rng = np.random.default_rng(config.run.seed)
    if init.preset == "uniform":
        n = np.full(grid.shape, init.mass / grid.volume + init.floor)
        c = np.full(grid.shape, init.c0)
    elif init.preset == "gaussian-blob":
        n = _blob(grid, init)
        c = np.full(grid.shape, init.c0)
    elif init.preset == "stratified":
        n = _blob(grid, init)
        # oxygen supplied from the top: linear in the last axis
        z = grid.cell_coords()[-1] / grid.lengths[-1]
        c = init.c0 * (init.c_bottom + (1.0 - init.c_bottom) * z)
    elif init.preset == "random-perturbation":
        base = init.mass / grid.volume
        X = grid.cell_coords()
        pert = np.zeros(grid.shape)
        for _ in range(init.modes):
            k = rng.integers(1, 5, size=grid.dim)
            term = rng.uniform(-1.0, 1.0)
            for ki, x, L in zip(k, X, grid.lengths):
                term = term * np.cos(ki * np.pi * x / L)
            pert = pert + term
        scale = np.max(np.abs(pert))
        pert = pert / scale if scale > 0 else pert
        n = base * (1.0 + init.amplitude * pert) + init.floor
        c = init.c0 * (1.0 + init.amplitude * rng.uniform(-1.0, 1.0) * pert)
        c = np.maximum(c, 0.0)
    else:
        raise ConfigError(f"unknown initial preset {init.preset!r}")
    u = _stream_velocity(grid, init.u_amplitude)
    return State(n=n, c=c, u=u, t=0.0)
