"""Quasi-uniform triangular meshes of a rectangle, with adjacency queries."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import PatchDGError


@dataclass
class Mesh:
    """Immutable triangulation with face and adjacency tables.

    ``faces`` holds vertex pairs, ``face_tris`` the left/right element of
    each face (-1 when absent, i.e. boundary). All triangles are stored
    counterclockwise.
    """

    vertices: np.ndarray          # (nv, 2)
    triangles: np.ndarray         # (nt, 3), CCW
    faces: np.ndarray = field(init=False)        # (nf, 2) vertex ids
    face_tris: np.ndarray = field(init=False)    # (nf, 2) element ids, -1 = none
    tri_faces: np.ndarray = field(init=False)    # (nt, 3) face ids
    h_K: np.ndarray = field(init=False)
    h_e: np.ndarray = field(init=False)
    rho_K: np.ndarray = field(init=False)
    areas: np.ndarray = field(init=False)
    barycenters: np.ndarray = field(init=False)

    def __post_init__(self):
        self.vertices = np.asarray(self.vertices, dtype=float)
        self.triangles = np.asarray(self.triangles, dtype=np.int64)
        self._build_tables()

    def _build_tables(self):
        v = self.vertices
        t = self.triangles
        p0, p1, p2 = v[t[:, 0]], v[t[:, 1]], v[t[:, 2]]
        cross = (p1[:, 0] - p0[:, 0]) * (p2[:, 1] - p0[:, 1]) - \
                (p1[:, 1] - p0[:, 1]) * (p2[:, 0] - p0[:, 0])
        if np.any(cross <= 0):
            raise PatchDGError("all triangles must have positive signed area")
        self.areas = 0.5 * cross
        self.barycenters = (p0 + p1 + p2) / 3.0

        e01 = np.linalg.norm(p1 - p0, axis=1)
        e12 = np.linalg.norm(p2 - p1, axis=1)
        e20 = np.linalg.norm(p0 - p2, axis=1)
        edge_len = np.column_stack([e01, e12, e20])
        self.h_K = edge_len.max(axis=1)
        s = 0.5 * edge_len.sum(axis=1)
        self.rho_K = 2.0 * self.areas / s  # inradius diameter

        face_index: dict[tuple[int, int], int] = {}
        faces = []
        face_tris = []
        tri_faces = np.empty_like(t)
        for k in range(len(t)):
            for loc, (a, b) in enumerate(((t[k, 0], t[k, 1]),
                                          (t[k, 1], t[k, 2]),
                                          (t[k, 2], t[k, 0]))):
                key = (a, b) if a < b else (b, a)
                fid = face_index.get(key)
                if fid is None:
                    fid = len(faces)
                    face_index[key] = fid
                    faces.append(key)
                    face_tris.append([k, -1])
                else:
                    if face_tris[fid][1] != -1:
                        raise PatchDGError("face shared by more than 2 triangles")
                    face_tris[fid][1] = k
                tri_faces[k, loc] = fid
        self.faces = np.array(faces, dtype=np.int64)
        self.face_tris = np.array(face_tris, dtype=np.int64)
        self.tri_faces = tri_faces
        self.h_e = np.linalg.norm(
            v[self.faces[:, 0]] - v[self.faces[:, 1]], axis=1)

        vert_tris: list[list[int]] = [[] for _ in range(len(v))]
        for k in range(len(t)):
            for a in t[k]:
                vert_tris[a].append(k)
        self._vert_tris = [np.array(x, dtype=np.int64) for x in vert_tris]

    @property
    def n_elements(self) -> int:
        return len(self.triangles)

    @property
    def h(self) -> float:
        return float(self.h_K.max())

    @property
    def nu(self) -> float:
        """Quasi-uniformity witness h / min_K rho_K."""
        return float(self.h / self.rho_K.min())

    @property
    def boundary_faces(self) -> np.ndarray:
        return np.flatnonzero(self.face_tris[:, 1] == -1)

    @property
    def interior_faces(self) -> np.ndarray:
        return np.flatnonzero(self.face_tris[:, 1] != -1)

    def triangle_vertices(self, K: int) -> np.ndarray:
        return self.vertices[self.triangles[K]]


def barycenter(mesh: Mesh, K: int) -> np.ndarray:
    """Arithmetic mean of the three vertices of element K."""
    return mesh.barycenters[K].copy()


def moore_neighbors(mesh: Mesh, K: int) -> set[int]:
    """All elements whose closure touches the closure of K, including K."""
    out: set[int] = set()
    for a in mesh.triangles[K]:
        out.update(mesh._vert_tris[a].tolist())
    return out


def generate_structured(domain, n: int) -> Mesh:
    """Uniform n x n grid of squares, each split along the same diagonal.

    ``domain`` is (xmin, ymin, xmax, ymax).
    """
    if n < 2:
        raise PatchDGError(f"need n >= 2 subdivisions, got {n}")
    xmin, ymin, xmax, ymax = map(float, domain)
    xs = np.linspace(xmin, xmax, n + 1)
    ys = np.linspace(ymin, ymax, n + 1)
    xx, yy = np.meshgrid(xs, ys, indexing="ij")
    verts = np.column_stack([xx.ravel(), yy.ravel()])

    def vid(i, j):
        return i * (n + 1) + j

    tris = []
    for i in range(n):
        for j in range(n):
            a, b = vid(i, j), vid(i + 1, j)
            c, d = vid(i + 1, j + 1), vid(i, j + 1)
            tris.append((a, b, c))
            tris.append((a, c, d))
    return Mesh(verts, np.array(tris, dtype=np.int64))


def refine_uniform(mesh: Mesh) -> Mesh:
    """Split each triangle into 4 via edge midpoints; h halves exactly."""
    nv = len(mesh.vertices)
    mids = 0.5 * (mesh.vertices[mesh.faces[:, 0]] + mesh.vertices[mesh.faces[:, 1]])
    verts = np.vstack([mesh.vertices, mids])
    tris = []
    for k in range(mesh.n_elements):
        a, b, c = mesh.triangles[k]
        # tri_faces order: (a,b), (b,c), (c,a)
        mab = nv + mesh.tri_faces[k, 0]
        mbc = nv + mesh.tri_faces[k, 1]
        mca = nv + mesh.tri_faces[k, 2]
        tris.extend([(a, mab, mca), (mab, b, mbc), (mca, mbc, c), (mab, mbc, mca)])
    return Mesh(verts, np.array(tris, dtype=np.int64))


def load_mesh(path) -> Mesh:
    """Read the plain-text mesh format: `v x y` and `t i j k` lines."""
    verts = []
    tris = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if parts[0] == "v" and len(parts) == 3:
                verts.append((float(parts[1]), float(parts[2])))
            elif parts[0] == "t" and len(parts) == 4:
                tris.append(tuple(int(p) for p in parts[1:]))
            else:
                raise PatchDGError(f"{path}:{lineno}: unrecognized line {raw!r}")
    if not verts or not tris:
        raise PatchDGError(f"{path}: no vertices or triangles found")
    return Mesh(np.array(verts), np.array(tris, dtype=np.int64))


def save_mesh(mesh: Mesh, path) -> None:
    """Write the plain-text mesh format accepted by :func:`load_mesh`."""
    with open(path, "w") as fh:
        for x, y in mesh.vertices:
            fh.write(f"v {float(x)!r} {float(y)!r}\n")
        for a, b, c in mesh.triangles:
            fh.write(f"t {int(a)} {int(b)} {int(c)}\n")
