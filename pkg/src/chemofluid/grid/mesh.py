"""Staggered (MAC) rectangular mesh descriptor."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError

BC_MODES = ("box", "periodic")


@dataclass(frozen=True)
class Grid:
    """Uniform rectangular MAC mesh.

    Scalars live at cell centres in arrays of shape ``n``; the velocity
    component along axis ``d`` lives on the faces normal to ``d``.  In
    ``box`` mode there are ``n[d] + 1`` such faces per line, the two wall
    faces included (and held at zero); in ``periodic`` mode there are
    ``n[d]`` faces and face ``k`` is the left face of cell ``k``.
    """

    n: tuple
    lengths: tuple = None
    bc: str = "box"

    def __post_init__(self):
        n = tuple(int(k) for k in self.n)
        lengths = self.lengths
        if lengths is None:
            lengths = (1.0,) * len(n)
        lengths = tuple(float(x) for x in lengths)
        if len(n) not in (2, 3):
            raise ConfigError(f"grid must be 2D or 3D, got {len(n)} axes")
        if len(lengths) != len(n):
            raise ConfigError("lengths and cell counts disagree in dimension")
        if any(k < 4 for k in n):
            raise ConfigError(f"need at least 4 cells per axis, got {n}")
        if any(not x > 0 for x in lengths):
            raise ConfigError(f"domain lengths must be positive, got {lengths}")
        if self.bc not in BC_MODES:
            raise ConfigError(f"bc must be one of {BC_MODES}, got {self.bc!r}")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "lengths", lengths)

    @classmethod
    def square(cls, n, length=1.0, dim=2, bc="box"):
        return cls((n,) * dim, (length,) * dim, bc)

    @property
    def dim(self):
        return len(self.n)

    @property
    def shape(self):
        return self.n

    @property
    def h(self):
        return tuple(L / k for L, k in zip(self.lengths, self.n))

    @property
    def cell_volume(self):
        return float(np.prod(self.h))

    @property
    def volume(self):
        return float(np.prod(self.lengths))

    @property
    def periodic(self):
        return self.bc == "periodic"

    def face_shape(self, axis):
        shape = list(self.n)
        if not self.periodic:
            shape[axis] += 1
        return tuple(shape)

    # coordinates -----------------------------------------------------------

    def centers_1d(self, axis):
        return (np.arange(self.n[axis]) + 0.5) * self.h[axis]

    def nodes_1d(self, axis):
        """Face positions along ``axis`` (matching the face arrays)."""
        k = self.n[axis] if self.periodic else self.n[axis] + 1
        return np.arange(k) * self.h[axis]

    def cell_coords(self):
        axes = [self.centers_1d(d) for d in range(self.dim)]
        return np.meshgrid(*axes, indexing="ij")

    def face_coords(self, axis):
        axes = [
            self.nodes_1d(d) if d == axis else self.centers_1d(d)
            for d in range(self.dim)
        ]
        return np.meshgrid(*axes, indexing="ij")

    # containers ------------------------------------------------------------

    def zeros(self):
        return np.zeros(self.shape)

    def zeros_faces(self):
        return tuple(np.zeros(self.face_shape(d)) for d in range(self.dim))

    def check_cells(self, q, name="field"):
        q = np.asarray(q, dtype=float)
        if q.shape != self.shape:
            raise ValueError(f"{name} has shape {q.shape}, grid expects {self.shape}")
        return q

    def check_faces(self, F, name="vector field"):
        if len(F) != self.dim:
            raise ValueError(f"{name} has {len(F)} components, grid is {self.dim}D")
        out = []
        for d, comp in enumerate(F):
            comp = np.asarray(comp, dtype=float)
            if comp.shape != self.face_shape(d):
                raise ValueError(
                    f"{name}[{d}] has shape {comp.shape}, expected {self.face_shape(d)}"
                )
            out.append(comp)
        return tuple(out)

    def integrate(self, q):
        """Midpoint-rule integral of a cell field."""
        return float(np.sum(q)) * self.cell_volume

    def inner_faces(self, F, G):
        """Discrete L2 product of two face fields (uniform face weights)."""
        return sum(float(np.sum(a * b)) for a, b in zip(F, G)) * self.cell_volume
