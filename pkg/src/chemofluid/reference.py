"""Closed-form oracles: Neumann heat series and the Barenblatt source solution."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln


@dataclass
class SeriesSolution:
    """Cosine series on a box with zero-flux walls.

    ``modes`` maps integer wave-number tuples ``(kx, ky[, kz])`` to
    coefficients of ``prod cos(k_i pi x_i / L_i)``.
    """

    lengths: tuple
    modes: dict

    def eigenvalue(self, k):
        return sum((ki * np.pi / L) ** 2 for ki, L in zip(k, self.lengths))

    def __call__(self, x, t):
        return heat_neumann_solution(self.modes, x, t, self.lengths)


def heat_neumann_solution(modes, x, t, lengths=None):
    """Evaluate ``sum a_k prod cos(k_i pi x_i / L_i) exp(-lambda_k t)``.

    ``x`` is a sequence of coordinate arrays (one per axis); continuum
    eigenvalues ``lambda_k = sum (k_i pi / L_i)^2`` are used.
    """
    if t < 0:
        raise ValueError("t must be nonnegative")
    x = [np.asarray(xi, dtype=float) for xi in x]
    if lengths is None:
        lengths = (1.0,) * len(x)
    out = np.zeros(np.broadcast(*x).shape)
    for k, a in modes.items():
        if len(k) != len(x):
            raise ValueError(f"mode {k} does not match dimension {len(x)}")
        lam = sum((ki * np.pi / L) ** 2 for ki, L in zip(k, lengths))
        term = np.full(out.shape, float(a) * np.exp(-lam * t))
        for ki, xi, L in zip(k, x, lengths):
            term = term * np.cos(ki * np.pi * xi / L)
        out = out + term
    return out


# --- Barenblatt ---------------------------------------------------------------
#
# For n_t = div(a n^(m-1) grad n) = (a/m) Lap(n^m) put b = a/m and s = b t.
# Then U(x, s) = s^-alpha (C - k |x|^2 s^(-2 beta))_+^(1/(m-1)) solves
# U_s = Lap(U^m) with beta = 1/(d(m-1)+2), alpha = d beta and
# k = beta (m-1) / (2 m).  Substituting y = x s^-beta, the mass is
# int (C - k|y|^2)_+^q dy = C^(q + d/2) k^(-d/2) pi^(d/2) G(q+1)/G(q+1+d/2)
# with q = 1/(m-1), which fixes C.


def barenblatt_exponents(m, dim):
    beta = 1.0 / (dim * (m - 1.0) + 2.0)
    return dim * beta, beta


def barenblatt_constant(m, a, total_mass, dim):
    """The free constant ``C`` matching ``total_mass`` (independent of ``a``)."""
    if m <= 1:
        raise ValueError("Barenblatt profile needs m > 1")
    _, beta = barenblatt_exponents(m, dim)
    k = beta * (m - 1.0) / (2.0 * m)
    q = 1.0 / (m - 1.0)
    log_unit = (-0.5 * dim) * np.log(k) + 0.5 * dim * np.log(np.pi) + gammaln(q + 1) - gammaln(q + 1 + 0.5 * dim)
    return float(np.exp((np.log(total_mass) - log_unit) / (q + 0.5 * dim)))


def barenblatt(m, a, total_mass, x, t, dim=None, center=None):
    """Source solution of ``n_t = div(a n^(m-1) grad n)`` with given mass.

    ``x`` is a sequence of coordinate arrays (one per axis) or a single
    array of radii when ``dim`` is given explicitly.
    """
    if m <= 1:
        raise ValueError("Barenblatt profile needs m > 1")
    if t <= 0:
        raise ValueError("t must be positive")
    if not a > 0:
        raise ValueError("a must be positive")
    if isinstance(x, (list, tuple)):
        dim = len(x) if dim is None else dim
        center = (0.0,) * len(x) if center is None else center
        r2 = sum((np.asarray(xi, dtype=float) - c0) ** 2 for xi, c0 in zip(x, center))
    else:
        if dim is None:
            raise ValueError("pass dim when x holds radii")
        r2 = np.asarray(x, dtype=float) ** 2
    alpha, beta = barenblatt_exponents(m, dim)
    k = beta * (m - 1.0) / (2.0 * m)
    C = barenblatt_constant(m, a, total_mass, dim)
    s = (a / m) * t
    core = np.maximum(C - k * r2 * s ** (-2.0 * beta), 0.0)
    return s ** (-alpha) * core ** (1.0 / (m - 1.0))


def barenblatt_radius(m, a, total_mass, t, dim):
    """Support radius ``sqrt(C/k) * (a t / m)^beta``."""
    _, beta = barenblatt_exponents(m, dim)
    k = beta * (m - 1.0) / (2.0 * m)
    C = barenblatt_constant(m, a, total_mass, dim)
    return float(np.sqrt(C / k) * ((a / m) * t) ** beta)
