"""Grid sampling and OBJ/CSV export."""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass

import numpy as np

from .errors import EmptyMeshError
from .geometry import SINGULAR_TOL, as_evaluator, fundamental_forms


@dataclass
class MeshGrid:
    u_range: tuple[float, float]
    v_range: tuple[float, float]
    nu: int
    nv: int
    uv: np.ndarray  # (nu*nv, 2), row-major in u
    vertices: np.ndarray  # (nu*nv, 3)
    faces: np.ndarray  # (m, 3) zero-based, counterclockwise in (u, v)
    singular: np.ndarray  # (nu*nv,) bool
    K: np.ndarray | None = None
    normal_curvature: np.ndarray | None = None

    @property
    def vertex_count(self) -> int:
        return len(self.vertices)


def sample(surface, region=(-1.0, 1.0, -1.0, 1.0), resolution=(41, 41), curvature: bool = True,
           singular_tol: float = SINGULAR_TOL) -> MeshGrid:
    """Sample ``surface`` on a regular grid and triangulate it.

    Vertex (a, b) has index ``a * nv + b`` where ``a`` runs over u.  Each grid
    quad becomes two triangles; triangles touching a singular vertex
    (EG - F^2 <= ``singular_tol``) are dropped.
    """
    if isinstance(resolution, int):
        resolution = (resolution, resolution)
    nu, nv = resolution
    if nu < 2 or nv < 2:
        raise ValueError("resolution must be at least 2 per axis")
    ev = as_evaluator(surface)
    u0, u1, v0, v1 = (float(x) for x in region)
    us = np.linspace(u0, u1, nu)
    vs = np.linspace(v0, v1, nv)
    U, V = np.meshgrid(us, vs, indexing="ij")
    pos = ev.evaluate(U, V)
    d = ev.derivatives(U, V)
    ff = fundamental_forms(d["u"], d["v"], d["uu"], d["uv"], d["vv"])
    singular = ~(ff["det"] > singular_tol)
    if singular.all():
        raise EmptyMeshError("every grid point is singular")

    idx = np.arange(nu * nv).reshape(nu, nv)
    a, b, c, dd = idx[:-1, :-1], idx[1:, :-1], idx[1:, 1:], idx[:-1, 1:]
    # (u, v) corners a=(i,j), b=(i+1,j), c=(i+1,j+1), d=(i,j+1) go counterclockwise
    tris = np.concatenate([
        np.stack([a, b, c], axis=-1).reshape(-1, 3),
        np.stack([a, c, dd], axis=-1).reshape(-1, 3),
    ])
    flat_sing = singular.reshape(-1)
    tris = tris[~flat_sing[tris].any(axis=1)]
    order = np.lexsort((tris[:, 2], tris[:, 1], tris[:, 0]))
    tris = tris[order]

    K = nuc = None
    if curvature:
        K = np.where(singular, np.nan, ff["K"]).reshape(-1)
        nuc = np.where(singular, np.nan, ff["nu"]).reshape(-1)
    return MeshGrid(
        u_range=(u0, u1),
        v_range=(v0, v1),
        nu=nu,
        nv=nv,
        uv=np.stack([U.reshape(-1), V.reshape(-1)], axis=1),
        vertices=pos.reshape(3, -1).T.copy(),
        faces=tris,
        singular=flat_sing,
        K=K,
        normal_curvature=nuc,
    )


def _g17(x: float) -> str:
    return format(float(x), ".17g")


def export(mesh: MeshGrid, path, fmt: str | None = None) -> str:
    """Write OBJ ("v x y z" then 1-based "f i j k") or CSV (u,v,x,y,z,K,nu)."""
    path = os.fspath(path)
    if mesh.vertex_count == 0:
        raise EmptyMeshError("nothing to export")
    fmt = (fmt or os.path.splitext(path)[1].lstrip(".")).lower()
    if fmt == "obj":
        with open(path, "w") as fh:
            for x, y, z in mesh.vertices:
                fh.write(f"v {_g17(x)} {_g17(y)} {_g17(z)}\n")
            for i, j, k in mesh.faces + 1:
                fh.write(f"f {i} {j} {k}\n")
    elif fmt == "csv":
        K = mesh.K if mesh.K is not None else np.full(mesh.vertex_count, np.nan)
        nuc = mesh.normal_curvature if mesh.normal_curvature is not None else np.full(mesh.vertex_count, np.nan)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["u", "v", "x", "y", "z", "K", "nu"])
            for (u, v), (x, y, z), k, n in zip(mesh.uv, mesh.vertices, K, nuc):
                w.writerow([_g17(u), _g17(v), _g17(x), _g17(y), _g17(z), _g17(k), _g17(n)])
    else:
        raise ValueError(f"unsupported export format {fmt!r}")
    return path


def read_csv(path) -> np.ndarray:
    """Rows of (u, v, x, y, z, K, nu) as floats."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if rows[0] != ["u", "v", "x", "y", "z", "K", "nu"]:
        raise ValueError(f"unexpected header {rows[0]}")
    return np.array([[float(x) for x in r] for r in rows[1:]])


def read_obj(path) -> tuple[np.ndarray, np.ndarray]:
    verts, faces = [], []
    with open(path) as fh:
        for line in fh:
            parts = line.split()
            if not parts:
                continue
            if parts[0] == "v":
                verts.append([float(x) for x in parts[1:4]])
            elif parts[0] == "f":
                faces.append([int(x) - 1 for x in parts[1:4]])
    return np.array(verts), np.array(faces, dtype=int)


def mesh_filename(family: str, params, res) -> str:
    """``<family>_<params>_<res>.obj`` with characters unsafe in file names replaced."""
    ptxt = "_".join(str(p) for p in params) if params else "none"
    for ch in "/\\ ()[]":
        ptxt = ptxt.replace(ch, "-" if ch == "/" else "")
    if isinstance(res, (tuple, list)):
        res = "x".join(str(r) for r in res)
    return f"{family.lower()}_{ptxt}_{res}.obj"
