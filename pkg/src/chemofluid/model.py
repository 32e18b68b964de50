"""Model parameters, kinetics presets and the regularizing nonlinearities.

The cell density diffuses with ``D(s) = a * s**(m - 1)``; regularization
replaces it by ``D_eps(s) = D(s + eps)`` and saturates the chemotactic
sensitivity and the oxygen consumption through ``F_eps(s) = log(1 + eps*s)/eps``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import integrate

from .errors import ConfigError

M_THRESHOLD = 2.0 / 3.0


@dataclass(frozen=True)
class KineticsPreset:
    """A named sensitivity/consumption pair with the derivatives the checks need.

    ``g = f / chi``.  ``lam(c) = f(c)/c`` is the consumption rate per unit
    oxygen, continued by ``f'(0)`` at ``c = 0``.  ``psi_closed`` is an
    optional closed form of ``Psi(s) = int_1^s g(sigma)**-0.5 dsigma``.
    """

    name: str
    chi: Callable
    f: Callable
    g: Callable
    dg: Callable
    d2g: Callable
    dchif: Callable
    lam: Callable
    psi_closed: Optional[Callable] = None
    symbolic: bool = True

    def __repr__(self):
        return f"KineticsPreset({self.name!r})"


def _const(value):
    return lambda c: np.full_like(np.asarray(c, dtype=float), value)


def _linear():
    return KineticsPreset(
        name="linear",
        chi=_const(1.0),
        f=lambda c: np.asarray(c, dtype=float) * 1.0,
        g=lambda c: np.asarray(c, dtype=float) * 1.0,
        dg=_const(1.0),
        d2g=_const(0.0),
        dchif=_const(1.0),
        lam=_const(1.0),
        psi_closed=lambda s: 2.0 * (np.sqrt(s) - 1.0),
    )


def _saturating():
    def f(c):
        c = np.asarray(c, dtype=float)
        return c / (1.0 + c)

    return KineticsPreset(
        name="saturating",
        chi=_const(1.0),
        f=f,
        g=f,
        dg=lambda c: 1.0 / (1.0 + np.asarray(c, dtype=float)) ** 2,
        d2g=lambda c: -2.0 / (1.0 + np.asarray(c, dtype=float)) ** 3,
        dchif=lambda c: 1.0 / (1.0 + np.asarray(c, dtype=float)) ** 2,
        lam=lambda c: 1.0 / (1.0 + np.asarray(c, dtype=float)),
    )


def _quadratic():
    # deliberately violates the concavity requirement on f/chi
    return KineticsPreset(
        name="quadratic",
        chi=_const(1.0),
        f=lambda c: np.asarray(c, dtype=float) ** 2,
        g=lambda c: np.asarray(c, dtype=float) ** 2,
        dg=lambda c: 2.0 * np.asarray(c, dtype=float),
        d2g=_const(2.0),
        dchif=lambda c: 2.0 * np.asarray(c, dtype=float),
        lam=lambda c: np.asarray(c, dtype=float) * 1.0,
    )


PRESETS = {
    "linear": _linear(),
    "saturating": _saturating(),
    "quadratic": _quadratic(),
}


def get_preset(name):
    try:
        return PRESETS[name]
    except KeyError:
        raise ConfigError(
            f"unknown kinetics preset {name!r}; known: {sorted(PRESETS)}"
        ) from None


def numeric_preset(name, chi, f, h=1e-4):
    """Build a preset from bare ``chi`` and ``f`` using finite differences.

    Derivatives are approximated by central differences (one-sided at 0);
    the validator reports such presets as numerically checked only.
    """

    def g(c):
        c = np.asarray(c, dtype=float)
        return f(c) / chi(c)

    def d1(fun):
        def out(c):
            c = np.asarray(c, dtype=float)
            lo = np.maximum(c - h, 0.0)
            return (fun(c + h) - fun(lo)) / (c + h - lo)

        return out

    def d2(fun):
        def out(c):
            c = np.asarray(c, dtype=float)
            mid = np.maximum(c, h)
            return (fun(mid + h) - 2.0 * fun(mid) + fun(mid - h)) / h**2

        return out

    dg = d1(g)

    def lam(c):
        c = np.asarray(c, dtype=float)
        safe = np.where(c > 0, c, 1.0)
        return np.where(c > 0, f(safe) / safe, d1(f)(np.zeros_like(c)))

    return KineticsPreset(
        name=name, chi=chi, f=f, g=g, dg=dg, d2g=d2(g),
        dchif=d1(lambda c: chi(c) * f(c)), lam=lam, symbolic=False,
    )


@dataclass(frozen=True)
class ModelParams:
    """Physical and regularization parameters.

    ``phi_grad`` is the constant gradient of the potential (gravity
    direction times magnitude); ``energy_weight`` is the K multiplying the
    kinetic energy in the combined functional.
    """

    m: float = 2.0
    diff_coeff: float = 1.0
    eps: float = 1e-2
    kappa: float = 1.0
    kinetics: KineticsPreset = field(default_factory=lambda: PRESETS["linear"])
    phi_grad: tuple = (0.0, -0.1)
    energy_weight: float = 1.0
    c_floor: float = 1e-12

    def __post_init__(self):
        if isinstance(self.kinetics, str):
            object.__setattr__(self, "kinetics", get_preset(self.kinetics))
        object.__setattr__(self, "phi_grad", tuple(float(v) for v in self.phi_grad))
        if not self.m > 0:
            raise ConfigError(f"diffusion exponent must be positive, got m={self.m}")
        if not self.diff_coeff > 0:
            raise ConfigError(f"diffusion coefficient must be positive, got {self.diff_coeff}")
        if not 0.0 < self.eps < 1.0:
            raise ConfigError(f"eps must lie in (0, 1), got {self.eps}")
        if not self.energy_weight >= 1.0:
            raise ConfigError(f"energy weight K must be >= 1, got {self.energy_weight}")
        if not self.c_floor > 0:
            raise ConfigError(f"c_floor must be positive, got {self.c_floor}")

    def replace(self, **changes):
        from dataclasses import replace

        return replace(self, **changes)


# --- regularizing nonlinearities -------------------------------------------


def _nonneg(s, what="s"):
    s = np.asarray(s, dtype=float)
    if np.any(s < 0):
        raise ValueError(f"{what} must be nonnegative (min {s.min()!r})")
    return s


def F_eps(eps, s):
    """``log(1 + eps*s) / eps``; lies between 0 and ``s``."""
    s = _nonneg(s)
    return np.log1p(eps * s) / eps


def F_eps_prime(eps, s):
    """``1 / (1 + eps*s)``, so that ``s * F_eps'(s) <= 1/eps``."""
    s = _nonneg(s)
    return 1.0 / (1.0 + eps * s)


def D_eps(params, s):
    """Shifted diffusivity ``a * (s + eps)**(m - 1)``, positive even at 0."""
    s = _nonneg(s)
    if params.m == 1.0:
        return np.full_like(s, params.diff_coeff)
    return params.diff_coeff * (s + params.eps) ** (params.m - 1.0)


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(24)


def _psi_gauss(preset, s, panels):
    # Psi(s) = int_1^sqrt(s) 2 tau / sqrt(g(tau^2)) dtau; smooth because g(0)=0, g'(0)>0
    root = np.sqrt(s)
    edges = np.linspace(0.0, 1.0, panels + 1)
    total = np.zeros_like(root)
    for lo, hi in zip(edges[:-1], edges[1:]):
        a = 1.0 + (root - 1.0) * lo
        b = 1.0 + (root - 1.0) * hi
        half = 0.5 * (b - a)
        mid = 0.5 * (a + b)
        tau = mid[..., None] + half[..., None] * _GL_NODES
        vals = 2.0 * tau / np.sqrt(preset.g(tau**2))
        total += half * np.sum(vals * _GL_WEIGHTS, axis=-1)
    return total


def psi(preset, s, c_floor=1e-12):
    """Potential ``Psi(s) = int_1^s dsigma / sqrt(g(sigma))``.

    Uses the preset's closed form when it has one.  Otherwise the integral
    is taken in the variable ``tau = sqrt(sigma)`` with composite
    Gauss-Legendre rules at two resolutions; points where they disagree by
    more than 1e-10 (relative) are recomputed with adaptive quadrature.
    """
    s_arr = np.asarray(s, dtype=float)
    if np.any(s_arr < c_floor):
        raise ValueError(f"psi needs s >= c_floor={c_floor}, got min {s_arr.min()!r}")
    if preset.psi_closed is not None:
        return preset.psi_closed(s_arr)
    flat = s_arr.ravel()
    coarse = _psi_gauss(preset, flat, 4)
    fine = _psi_gauss(preset, flat, 8)
    bad = np.abs(fine - coarse) > 1e-10 * np.maximum(np.abs(fine), 1e-300)
    bad &= flat != 1.0

    def integrand(sig):
        return 1.0 / math.sqrt(float(preset.g(sig)))

    for i in np.flatnonzero(bad):
        fine[i], _ = integrate.quad(integrand, 1.0, float(flat[i]), epsabs=0.0,
                                    epsrel=1e-10, limit=200)
    fine[flat == 1.0] = 0.0
    if s_arr.ndim == 0:
        return float(fine[0])
    return fine.reshape(s_arr.shape)


def psi_prime(preset, s):
    """``Psi'(s) = g(s)**-0.5``."""
    return 1.0 / np.sqrt(preset.g(np.asarray(s, dtype=float)))


# --- assumption validator ---------------------------------------------------


@dataclass
class AssumptionCheck:
    label: str
    description: str
    passed: bool
    method: str
    detail: str = ""


@dataclass
class ValidationReport:
    checks: list

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    @property
    def failed(self):
        return [c.label for c in self.checks if not c.passed]

    def __getitem__(self, label):
        for c in self.checks:
            if c.label == label:
                return c
        raise KeyError(label)

    def format(self):
        lines = []
        for c in self.checks:
            status = "PASS" if c.passed else "FAIL"
            lines.append(f"{status}  {c.label:<18} {c.description} [{c.method}] {c.detail}".rstrip())
        lines.append("overall: " + ("PASS" if self.passed else "FAIL"))
        return "\n".join(lines)


def validate_assumptions(params, c_max_probe=1.0, n_probe_points=64):
    """Check the structural hypotheses on D, chi, f and m.

    Sign conditions are evaluated on an equispaced grid over
    ``[0, c_max_probe]`` with the preset's derivative formulas; presets
    without exact derivatives are labelled "numerical".  A grid pass means
    numerically verified on the probe range, not proved on [0, inf).
    """
    if not c_max_probe > 0:
        raise ValueError("c_max_probe must be positive")
    if n_probe_points < 16:
        raise ValueError("need at least 16 probe points")
    if not params.diff_coeff > 0:
        raise ConfigError("diffusion coefficient must be positive")
    if not 0.0 < params.eps < 1.0:
        raise ConfigError("eps must lie in (0, 1)")

    k = params.kinetics
    c = np.linspace(0.0, c_max_probe, n_probe_points)
    pos = c[1:]
    method = "symbolic derivatives on probe grid" if k.symbolic else "numerical on probe grid"

    def worst(values, where):
        i = int(np.argmin(values))
        return f"min {values[i]:.3g} at c={where[i]:.3g}"

    checks = []
    checks.append(AssumptionCheck(
        "m-threshold", "m >= 2/3", params.m >= M_THRESHOLD - 1e-15, "exact", f"m={params.m!r}"))
    checks.append(AssumptionCheck(
        "diffusion-bounds", "D1 s^(m-1) <= D(s) <= D2 s^(m-1), D1 = D2 = a > 0",
        params.diff_coeff > 0, "exact", f"a={params.diff_coeff!r}"))
    chi = np.asarray(k.chi(c), dtype=float)
    checks.append(AssumptionCheck(
        "chi-positive", "chi > 0 on [0, c_max]", bool(np.all(chi > 0)), method, worst(chi, c)))
    f0 = float(np.asarray(k.f(np.zeros(1)))[0])
    fpos = np.asarray(k.f(pos), dtype=float)
    checks.append(AssumptionCheck(
        "f-sign", "f(0) = 0 and f > 0 on (0, c_max]",
        abs(f0) == 0.0 and bool(np.all(fpos > 0)), method, f"f(0)={f0!r}; " + worst(fpos, pos)))
    dg = np.asarray(k.dg(c), dtype=float)
    checks.append(AssumptionCheck(
        "g-increasing", "(f/chi)' > 0", bool(np.all(dg > 0)), method, worst(dg, c)))
    d2g = np.asarray(k.d2g(c), dtype=float)
    checks.append(AssumptionCheck(
        "g-concave", "(f/chi)'' <= 0", bool(np.all(d2g <= 0)), method,
        f"max {d2g.max():.3g} at c={c[int(np.argmax(d2g))]:.3g}"))
    dchif = np.asarray(k.dchif(c), dtype=float)
    checks.append(AssumptionCheck(
        "chi-f-monotone", "(chi f)' >= 0", bool(np.all(dchif >= 0)), method, worst(dchif, c)))
    grad = np.asarray(params.phi_grad, dtype=float)
    checks.append(AssumptionCheck(
        "potential-bounded", "grad Phi bounded (constant vector)", bool(np.all(np.isfinite(grad))),
        "exact", f"grad Phi={tuple(float(g) for g in grad)}"))
    return ValidationReport(checks)
