"""Field snapshot files.

Binary layout, all little-endian::

    b"CFX1"                      magic
    uint32  dim
    uint32  sizes[dim]           array shape of the stored field
    float64 spacings[dim]
    float64 time
    uint16  len, utf-8 bytes     field name
    uint16  len, utf-8 bytes     role ("cell", "face-x", "face-y", "face-z")
    float64 values[prod(sizes)]  x index fastest

A CSV export with columns ``i,j[,k],value`` is provided for small grids.
"""
from __future__ import annotations

import csv
import struct

import numpy as np

MAGIC = b"CFX1"
ROLES = ("cell", "face-x", "face-y", "face-z")


def _pack_str(s):
    b = s.encode("utf-8")
    return struct.pack("<H", len(b)) + b


def write_snapshot(path, grid, values, t, name, role="cell"):
    values = np.asarray(values, dtype="<f8")
    if role not in ROLES:
        raise ValueError(f"role must be one of {ROLES}")
    expected = grid.shape if role == "cell" else grid.face_shape(ROLES.index(role) - 1)
    if values.shape != tuple(expected):
        raise ValueError(f"{name}: shape {values.shape} does not match role {role} {expected}")
    header = MAGIC + struct.pack("<I", grid.dim)
    header += struct.pack(f"<{grid.dim}I", *values.shape)
    header += struct.pack(f"<{grid.dim}d", *grid.h)
    header += struct.pack("<d", float(t))
    header += _pack_str(name) + _pack_str(role)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(values.ravel(order="F").tobytes())


def read_snapshot(path):
    """Return ``(header, values)`` with values shaped ``header["sizes"]``."""
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:4] != MAGIC:
        raise ValueError(f"{path}: not a CFX1 snapshot")
    pos = 4
    (dim,) = struct.unpack_from("<I", data, pos)
    pos += 4
    sizes = struct.unpack_from(f"<{dim}I", data, pos)
    pos += 4 * dim
    spacings = struct.unpack_from(f"<{dim}d", data, pos)
    pos += 8 * dim
    (t,) = struct.unpack_from("<d", data, pos)
    pos += 8
    strings = []
    for _ in range(2):
        (k,) = struct.unpack_from("<H", data, pos)
        pos += 2
        strings.append(data[pos:pos + k].decode("utf-8"))
        pos += k
    count = int(np.prod(sizes))
    values = np.frombuffer(data, dtype="<f8", count=count, offset=pos)
    values = values.reshape(sizes, order="F").astype(float)
    header = {"dim": dim, "sizes": tuple(sizes), "spacings": tuple(spacings),
              "time": t, "name": strings[0], "role": strings[1]}
    return header, values


def write_csv(path, values):
    """Write ``i,j[,k],value`` rows (x index fastest)."""
    values = np.asarray(values, dtype=float)
    names = "ijk"[: values.ndim]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(list(names) + ["value"])
        for idx in np.ndindex(*values.shape[::-1]):
            idx = idx[::-1]
            w.writerow(list(idx) + [repr(float(values[idx]))])
