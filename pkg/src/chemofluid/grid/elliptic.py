"""Elliptic solves on the MAC grid.

The default ``method="direct"`` diagonalizes the separable stencils with
real-to-real transforms (DCT-II for Neumann cells, DST-I/DST-II for the
no-slip face components) or the FFT in periodic mode.  ``method="cg"``
runs Jacobi-preconditioned conjugate gradients on the assembled sparse
stencil.  Either way the residual is measured afterwards and the contract
is the residual tolerance, not the method.
"""
from __future__ import annotations

import numpy as np
import scipy.fft as sfft
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from ..errors import SolverError
from .ops import _sl, laplacian, vector_laplacian

METHODS = ("direct", "cg")


# --- 1D symbols (eigenvalues of -d^2/dx^2) ---------------------------------


def _symbol(kind, n, h):
    k = np.arange(n)
    if kind == "dct2":
        return (4.0 / h**2) * np.sin(np.pi * k / (2 * n)) ** 2
    if kind == "dst2":
        return (4.0 / h**2) * np.sin(np.pi * (k + 1) / (2 * n)) ** 2
    if kind == "dst1":
        return (4.0 / h**2) * np.sin(np.pi * (k + 1) / (2 * (n + 1))) ** 2
    if kind == "fft":
        return (4.0 / h**2) * np.sin(np.pi * k / n) ** 2
    raise ValueError(kind)


def _forward(x, kind, axis):
    if kind == "dct2":
        return sfft.dct(x, type=2, axis=axis, norm="ortho")
    if kind == "dst2":
        return sfft.dst(x, type=2, axis=axis, norm="ortho")
    if kind == "dst1":
        return sfft.dst(x, type=1, axis=axis, norm="ortho")
    raise ValueError(kind)


def _inverse(x, kind, axis):
    if kind == "dct2":
        return sfft.idct(x, type=2, axis=axis, norm="ortho")
    if kind == "dst2":
        return sfft.idst(x, type=2, axis=axis, norm="ortho")
    if kind == "dst1":
        return sfft.idst(x, type=1, axis=axis, norm="ortho")
    raise ValueError(kind)


def _spectral(grid, x, kinds, invert):
    """Apply ``invert(Lambda)`` as a multiplier in the eigenbasis.

    ``kinds`` names the transform per axis; ``Lambda`` is the summed symbol
    of ``-Laplacian`` broadcast over the array.
    """
    lam = np.zeros(x.shape)
    for d, kind in enumerate(kinds):
        shape = [1] * x.ndim
        shape[d] = x.shape[d]
        lam = lam + _symbol(kind, x.shape[d], grid.h[d]).reshape(shape)
    if kinds[0] == "fft":
        xh = sfft.fftn(x)
        return np.real(sfft.ifftn(xh * invert(lam)))
    xh = x
    for d, kind in enumerate(kinds):
        xh = _forward(xh, kind, d)
    xh = xh * invert(lam)
    for d, kind in enumerate(kinds):
        xh = _inverse(xh, kind, d)
    return xh


# --- sparse stencils ----------------------------------------------------------


def _stencil_1d(kind, n, h):
    main = -2.0 * np.ones(n)
    off = np.ones(n - 1)
    if kind == "neumann":
        main[0] = main[-1] = -1.0
    elif kind == "ghost":
        main[0] = main[-1] = -3.0
    elif kind == "dirichlet":
        pass
    elif kind == "periodic":
        A = sp.diags([off, main, off], [-1, 0, 1], format="lil")
        A[0, n - 1] = 1.0
        A[n - 1, 0] = 1.0
        return (A.tocsr()) / h**2
    else:
        raise ValueError(kind)
    return sp.diags([off, main, off], [-1, 0, 1], format="csr") / h**2


def _kron_sum(mats):
    eyes = [sp.identity(m.shape[0], format="csr") for m in mats]
    total = None
    for d, A in enumerate(mats):
        term = None
        for e in range(len(mats)):
            factor = A if e == d else eyes[e]
            term = factor if term is None else sp.kron(term, factor, format="csr")
        total = term if total is None else total + term
    return total.tocsr()


def neumann_laplacian_matrix(grid):
    """Sparse 5-point (7-point in 3D) cell Laplacian, C-order unknowns."""
    kind = "periodic" if grid.periodic else "neumann"
    return _kron_sum([_stencil_1d(kind, n, h) for n, h in zip(grid.n, grid.h)])


def dirichlet_laplacian_matrix(grid, axis):
    """Sparse Laplacian for the interior unknowns of face component ``axis``."""
    mats = []
    for d, (n, h) in enumerate(zip(grid.n, grid.h)):
        if grid.periodic:
            mats.append(_stencil_1d("periodic", n, h))
        elif d == axis:
            mats.append(_stencil_1d("dirichlet", n - 1, h))
        else:
            mats.append(_stencil_1d("ghost", n, h))
    return _kron_sum(mats)


def _cg(A, b, x0, tol_abs, maxiter):
    diag = A.diagonal()
    M = spla.LinearOperator(A.shape, matvec=lambda r: r / diag)
    x = x0
    for _ in range(4):
        x, info = spla.cg(A, b, x0=x, rtol=0.0, atol=tol_abs * 1e-2, maxiter=maxiter, M=M)
        if np.max(np.abs(A @ x - b)) <= tol_abs:
            break
    return x


# --- public solves -------------------------------------------------------------


def _residual_check(res, scale, tol, what):
    r = float(np.max(np.abs(res))) if res.size else 0.0
    if r > tol * max(scale, np.finfo(float).tiny):
        raise SolverError(f"{what}: residual {r:.3e} exceeds {tol:.1e} x {scale:.3e}", r)
    return r


def poisson_neumann_solve(grid, rhs, tol=1e-10, method="direct", maxiter=10000):
    """Solve ``laplacian(phi) = rhs`` with zero-flux walls, ``mean(phi) = 0``.

    The right-hand side must have zero mean (to 1e-10 of its max norm).
    """
    rhs = grid.check_cells(rhs, "rhs")
    if tol <= 0:
        raise ValueError("tol must be positive")
    scale = float(np.max(np.abs(rhs)))
    if scale == 0.0:
        return np.zeros(grid.shape)
    mean = float(np.mean(rhs))
    if abs(mean) > 1e-10 * scale:
        raise SolverError(f"incompatible Neumann right-hand side: mean {mean:.3e}")
    rhs = rhs - mean
    if method == "direct":
        kinds = ["fft" if grid.periodic else "dct2"] * grid.dim

        def inv(lam):
            out = np.zeros_like(lam)
            nz = lam > 0
            out[nz] = -1.0 / lam[nz]
            return out

        phi = _spectral(grid, rhs, kinds, inv)
    elif method == "cg":
        # CG on the negated (positive semidefinite) stencil
        A = -neumann_laplacian_matrix(grid)
        phi = _cg(A, -rhs.ravel(), np.zeros(rhs.size), tol * scale, maxiter).reshape(grid.shape)
    else:
        raise ValueError(f"method must be one of {METHODS}")
    phi = phi - phi.mean()
    _residual_check(laplacian(grid, phi) - rhs, scale, tol, "Neumann Poisson solve")
    return phi


def helmholtz_neumann_solve(grid, rhs, shift, tol=1e-10, method="direct", maxiter=10000):
    """Solve ``(I - shift * laplacian) w = rhs`` for a cell field."""
    rhs = grid.check_cells(rhs, "rhs")
    if shift < 0:
        raise ValueError("shift must be nonnegative")
    if shift == 0:
        return rhs.copy()
    if method == "direct":
        kinds = ["fft" if grid.periodic else "dct2"] * grid.dim
        w = _spectral(grid, rhs, kinds, lambda lam: 1.0 / (1.0 + shift * lam))
    elif method == "cg":
        A = sp.identity(rhs.size, format="csr") - shift * neumann_laplacian_matrix(grid)
        scale = float(np.max(np.abs(rhs))) or 1.0
        w = _cg(A, rhs.ravel(), rhs.ravel().copy(), tol * scale, maxiter).reshape(grid.shape)
    else:
        raise ValueError(f"method must be one of {METHODS}")
    scale = float(np.max(np.abs(rhs)))
    _residual_check(w - shift * laplacian(grid, w) - rhs, scale, tol, "Neumann Helmholtz solve")
    return w


def helmholtz_dirichlet_solve(grid, rhs, shift, tol=1e-10, method="direct", maxiter=10000):
    """Solve ``(I - shift * Delta) w = rhs`` componentwise with no-slip walls.

    Wall faces of each component are returned as zero.
    """
    rhs = grid.check_faces(rhs, "rhs")
    if shift < 0:
        raise ValueError("shift must be nonnegative")
    if shift == 0:
        return tuple(c.copy() for c in rhs)
    out = []
    for d, comp in enumerate(rhs):
        if grid.periodic:
            w = _spectral(grid, comp, ["fft"] * grid.dim, lambda lam: 1.0 / (1.0 + shift * lam))
        else:
            inner = _sl(grid.dim, d, slice(1, -1))
            sub = comp[inner]
            if method == "direct":
                kinds = ["dst1" if e == d else "dst2" for e in range(grid.dim)]
                ws = _spectral(grid, sub, kinds, lambda lam: 1.0 / (1.0 + shift * lam))
            elif method == "cg":
                A = sp.identity(sub.size, format="csr") - shift * dirichlet_laplacian_matrix(grid, d)
                scale = float(np.max(np.abs(sub))) or 1.0
                ws = _cg(A, sub.ravel(), sub.ravel().copy(), tol * scale, maxiter).reshape(sub.shape)
            else:
                raise ValueError(f"method must be one of {METHODS}")
            w = np.zeros_like(comp)
            w[inner] = ws
        out.append(w)
    out = tuple(out)
    lap = vector_laplacian(grid, out)
    scale = max((float(np.max(np.abs(c))) for c in rhs), default=0.0)
    for d in range(grid.dim):
        res = out[d] - shift * lap[d] - rhs[d]
        if not grid.periodic:
            res = res[_sl(grid.dim, d, slice(1, -1))]
        _residual_check(res, scale, tol, "Dirichlet Helmholtz solve")
    return out
