"""MAC mesh, discrete operators, elliptic solvers and snapshot I/O."""
from .elliptic import (
    dirichlet_laplacian_matrix,
    helmholtz_dirichlet_solve,
    helmholtz_neumann_solve,
    neumann_laplacian_matrix,
    poisson_neumann_solve,
)
from .io import read_snapshot, write_csv, write_snapshot
from .mesh import Grid
from .ops import (
    advective_flux,
    cell_gradient,
    cells_to_faces,
    courant_number,
    divergence,
    faces_to_cells,
    gradient,
    laplacian,
    upwind_advect,
    vector_laplacian,
)

__all__ = [
    "Grid",
    "gradient",
    "divergence",
    "laplacian",
    "vector_laplacian",
    "cells_to_faces",
    "faces_to_cells",
    "cell_gradient",
    "advective_flux",
    "courant_number",
    "upwind_advect",
    "poisson_neumann_solve",
    "helmholtz_neumann_solve",
    "helmholtz_dirichlet_solve",
    "neumann_laplacian_matrix",
    "dirichlet_laplacian_matrix",
    "write_snapshot",
    "read_snapshot",
    "write_csv",
]
