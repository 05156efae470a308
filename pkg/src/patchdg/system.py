"""Assembly of the symmetric interior-penalty forms over the patch space.

The bilinear form couples, per face or interface segment, the two local
polynomials adjacent to it; every term is built from small dense blocks
over the union of the two patch DOF sets and accumulated into triplet
lists. Duplicate entries are summed in sorted (row, col) order, so the
assembled matrix is reproducible bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.sparse as sp

from .exceptions import PatchDGError
from .geometry import (CUT, InterfaceClassification, interface_normal,
                       quad_bulk, quad_face, quad_interface)
from .reconstruction import ReconstructionSpace, Trace


@dataclass
class ProblemSpec:
    """Coefficients, data, and (optionally) the exact solution.

    Per-side callbacks take ``(points, side)``; interface jump callbacks
    take ``(points, normals)`` with normals oriented side 0 to side 1.
    """

    beta: tuple[float, float]
    f: Callable
    g1: Callable                  # boundary trace of u, (points, side)
    g2: Callable                  # boundary normal derivative, (points, normals, side)
    a1: Callable                  # [u], (points, normals)
    a2: Callable                  # [grad u].n0
    a3: Callable                  # [beta lap u]
    a4: Callable                  # [grad(beta lap u)].n0
    u: Callable | None = None
    grad_u: Callable | None = None
    lap_u: Callable | None = None
    grad_lap_u: Callable | None = None

    def __post_init__(self):
        if not (self.beta[0] > 0 and self.beta[1] > 0):
            raise PatchDGError("beta must be positive on both sides")

    @classmethod
    def from_exact(cls, beta, u, grad_u, lap_u, grad_lap_u, f):
        """Derive boundary and interface data from a two-sided exact solution."""
        b0, b1 = float(beta[0]), float(beta[1])

        def a1(p, n):
            return u(p, 0) - u(p, 1)

        def a2(p, n):
            return np.einsum("ij,ij->i", grad_u(p, 0) - grad_u(p, 1), n)

        def a3(p, n):
            return b0 * lap_u(p, 0) - b1 * lap_u(p, 1)

        def a4(p, n):
            return np.einsum("ij,ij->i",
                             b0 * grad_lap_u(p, 0) - b1 * grad_lap_u(p, 1), n)

        def g1(p, side):
            return u(p, side)

        def g2(p, n, side):
            return np.einsum("ij,ij->i", grad_u(p, side), n)

        return cls((b0, b1), f, g1, g2, a1, a2, a3, a4,
                   u=u, grad_u=grad_u, lap_u=lap_u, grad_lap_u=grad_lap_u)


@dataclass
class PenaltyConfig:
    """Face and interface penalty weights derived from a single eta."""

    eta: float

    def __post_init__(self):
        if self.eta <= 0:
            raise PatchDGError("penalty eta must be positive")

    def mu1_face(self, h_e: float) -> float:
        return self.eta / h_e ** 3

    def mu2_face(self, h_e: float) -> float:
        return self.eta / h_e

    def mu1_interface(self, h_K: float) -> float:
        return self.eta / h_K ** 3

    def mu2_interface(self, h_K: float) -> float:
        return self.eta / h_K


@dataclass
class LinearSystem:
    A: sp.csr_matrix
    b: np.ndarray
    dof_elements: np.ndarray


class _TripletSink:
    """Accumulates dense local blocks as COO triplets."""

    def __init__(self, n: int):
        self.n = n
        self.rows: list[np.ndarray] = []
        self.cols: list[np.ndarray] = []
        self.vals: list[np.ndarray] = []

    def add(self, dofs: np.ndarray, block: np.ndarray):
        r = np.repeat(dofs, len(dofs))
        self.rows.append(r)
        self.cols.append(np.tile(dofs, len(dofs)))
        self.vals.append(block.ravel())

    def tocsr(self) -> sp.csr_matrix:
        rows = np.concatenate(self.rows)
        cols = np.concatenate(self.cols)
        vals = np.concatenate(self.vals)
        # deterministic duplicate summation: sort by (row, col) first
        order = np.lexsort((cols, rows))
        A = sp.coo_matrix((vals[order], (rows[order], cols[order])),
                          shape=(self.n, self.n))
        A.sum_duplicates()
        return A.tocsr()


def _outward_normal(mesh, e: int, K: int) -> np.ndarray:
    va, vb = mesh.vertices[mesh.faces[e]]
    t = vb - va
    n = np.array([t[1], -t[0]]) / np.linalg.norm(t)
    mid = 0.5 * (va + vb)
    if n @ (mid - mesh.barycenters[K]) < 0:
        n = -n
    return n


def _normal_dot(tr: Trace, n, which: str) -> np.ndarray:
    """n . (gradient-like pair of matrices); n is (2,) or (npts, 2)."""
    gx, gy = (tr.gx, tr.gy) if which == "grad" else (tr.glx, tr.gly)
    n = np.asarray(n, float)
    if n.ndim == 1:
        return n[0] * gx + n[1] * gy
    return n[:, [0]] * gx + n[:, [1]] * gy


class _FacePair:
    """Stacked jump/average operator matrices over two element traces."""

    def __init__(self, trp: Trace, trm: Trace | None, n_plus, beta: float):
        if trm is None:
            self.dofs = trp.dofs
            self.jump_u = trp.val
            self.jump_gu = _normal_dot(trp, n_plus, "grad")
            self.avg_blap = beta * trp.lap
            self.avg_glap = beta * _normal_dot(trp, n_plus, "glap")
        else:
            self.dofs = np.concatenate([trp.dofs, trm.dofs])
            self.jump_u = np.hstack([trp.val, -trm.val])
            self.jump_gu = np.hstack([_normal_dot(trp, n_plus, "grad"),
                                      -_normal_dot(trm, n_plus, "grad")])
            self.avg_blap = 0.5 * beta * np.hstack([trp.lap, trm.lap])
            self.avg_glap = 0.5 * beta * np.hstack(
                [_normal_dot(trp, n_plus, "glap"),
                 _normal_dot(trm, n_plus, "glap")])


class _InterfacePair:
    """Jump/average matrices across Gamma_K (two-sided betas)."""

    def __init__(self, tr0: Trace, tr1: Trace, n0, beta):
        self.dofs = np.concatenate([tr0.dofs, tr1.dofs])
        self.jump_u = np.hstack([tr0.val, -tr1.val])
        self.jump_gu = np.hstack([_normal_dot(tr0, n0, "grad"),
                                  -_normal_dot(tr1, n0, "grad")])
        self.avg_v = 0.5 * np.hstack([tr0.val, tr1.val])
        self.avg_gv = 0.5 * np.hstack([_normal_dot(tr0, n0, "grad"),
                                       _normal_dot(tr1, n0, "grad")])
        self.avg_blap = 0.5 * np.hstack([beta[0] * tr0.lap,
                                         beta[1] * tr1.lap])
        self.avg_glap = 0.5 * np.hstack(
            [beta[0] * _normal_dot(tr0, n0, "glap"),
             beta[1] * _normal_dot(tr1, n0, "glap")])


def _penalized_block(pair, w, mu1: float, mu2: float) -> np.ndarray:
    """The face/interface contribution of B_h for one stacked pair."""
    Ju, Jg = pair.jump_u, pair.jump_gu
    wJu = w[:, None] * Ju
    wJg = w[:, None] * Jg
    block = wJu.T @ pair.avg_glap
    block += pair.avg_glap.T @ wJu
    block -= wJg.T @ pair.avg_blap
    block -= pair.avg_blap.T @ wJg
    block += mu1 * (wJu.T @ Ju) + mu2 * (wJg.T @ Jg)
    return block


def assemble_bilinear(space: ReconstructionSpace,
                      cls: InterfaceClassification,
                      problem: ProblemSpec,
                      penalty: PenaltyConfig,
                      quad_order: int | None = None) -> sp.csr_matrix:
    """Assemble A with A[i, j] = B_h(lambda_j, lambda_i)."""
    m = space.m
    if m < 2:
        raise PatchDGError("the scheme requires reconstruction degree m >= 2")
    if quad_order is None:
        quad_order = 2 * m
    face_order = quad_order + 1
    mesh = cls.mesh
    beta = problem.beta
    sink = _TripletSink(space.n_dofs)

    # volume terms: beta * lap(u) * lap(v) over K^0 and K^1
    for K in range(mesh.n_elements):
        for side in cls.element_sides(K):
            rule = quad_bulk(cls, K, side, quad_order)
            if len(rule.weights) == 0:
                continue
            tr = space.trace(K, side, rule.points)
            wl = (beta[side] * rule.weights)[:, None] * tr.lap
            sink.add(tr.dofs, tr.lap.T @ wl)

    # face terms over e^0 and e^1, boundary faces with one-sided traces
    for e in range(len(mesh.faces)):
        Kp, Km = mesh.face_tris[e]
        n_plus = _outward_normal(mesh, e, Kp)
        mu1 = penalty.mu1_face(mesh.h_e[e])
        mu2 = penalty.mu2_face(mesh.h_e[e])
        for side in cls.face_sides(e):
            rule = quad_face(cls, e, side, face_order)
            if len(rule.weights) == 0:
                continue
            trp = space.trace(Kp, side, rule.points)
            trm = space.trace(Km, side, rule.points) if Km >= 0 else None
            pair = _FacePair(trp, trm, n_plus, beta[side])
            sink.add(pair.dofs,
                     _penalized_block(pair, rule.weights, mu1, mu2))

    # interface terms over Gamma_K
    for K in cls.cut_elements:
        K = int(K)
        rule = quad_interface(cls, K, face_order)
        n0 = interface_normal(cls.level_set, rule.points)
        tr0 = space.trace(K, 0, rule.points)
        tr1 = space.trace(K, 1, rule.points)
        pair = _InterfacePair(tr0, tr1, n0, beta)
        mu1 = penalty.mu1_interface(mesh.h_K[K])
        mu2 = penalty.mu2_interface(mesh.h_K[K])
        sink.add(pair.dofs, _penalized_block(pair, rule.weights, mu1, mu2))

    return sink.tocsr()


def assemble_linear(space: ReconstructionSpace,
                    cls: InterfaceClassification,
                    problem: ProblemSpec,
                    penalty: PenaltyConfig,
                    quad_order: int | None = None) -> np.ndarray:
    """Assemble b with b[i] = l_h(lambda_i)."""
    m = space.m
    if m < 2:
        raise PatchDGError("the scheme requires reconstruction degree m >= 2")
    if quad_order is None:
        quad_order = 2 * m
    face_order = quad_order + 1
    mesh = cls.mesh
    beta = problem.beta
    b = np.zeros(space.n_dofs)

    # source term
    for K in range(mesh.n_elements):
        for side in cls.element_sides(K):
            rule = quad_bulk(cls, K, side, quad_order)
            if len(rule.weights) == 0:
                continue
            tr = space.trace(K, side, rule.points)
            fv = problem.f(rule.points, side)
            b[tr.dofs] += tr.val.T @ (rule.weights * fv)

    # interface data terms
    for K in cls.cut_elements:
        K = int(K)
        rule = quad_interface(cls, K, face_order)
        pts, w = rule.points, rule.weights
        n0 = interface_normal(cls.level_set, pts)
        tr0 = space.trace(K, 0, pts)
        tr1 = space.trace(K, 1, pts)
        pair = _InterfacePair(tr0, tr1, n0, beta)
        a1 = problem.a1(pts, n0)
        a2 = problem.a2(pts, n0)
        a3 = problem.a3(pts, n0)
        a4 = problem.a4(pts, n0)
        mu1 = penalty.mu1_interface(mesh.h_K[K])
        mu2 = penalty.mu2_interface(mesh.h_K[K])
        local = pair.avg_glap.T @ (w * a1)
        local -= pair.avg_blap.T @ (w * a2)
        local += pair.avg_gv.T @ (w * a3)
        local -= pair.avg_v.T @ (w * a4)
        local += pair.jump_u.T @ (w * mu1 * a1)
        local += pair.jump_gu.T @ (w * mu2 * a2)
        b[pair.dofs] += local

    # boundary data terms
    for e in mesh.boundary_faces:
        e = int(e)
        K = int(mesh.face_tris[e, 0])
        n = _outward_normal(mesh, e, K)
        mu1 = penalty.mu1_face(mesh.h_e[e])
        mu2 = penalty.mu2_face(mesh.h_e[e])
        for side in cls.face_sides(e):
            rule = quad_face(cls, e, side, face_order)
            if len(rule.weights) == 0:
                continue
            pts, w = rule.points, rule.weights
            tr = space.trace(K, side, pts)
            g1 = problem.g1(pts, side)
            g2 = problem.g2(pts, np.broadcast_to(n, pts.shape), side)
            gl = _normal_dot(tr, n, "glap")
            gv = _normal_dot(tr, n, "grad")
            local = beta[side] * (gl.T @ (w * g1)) + mu1 * (tr.val.T @ (w * g1))
            local -= beta[side] * (tr.lap.T @ (w * g2))
            local += mu2 * (gv.T @ (w * g2))
            b[tr.dofs] += local

    return b


def assemble_system(space, cls, problem, penalty,
                    quad_order=None) -> LinearSystem:
    A = assemble_bilinear(space, cls, problem, penalty, quad_order)
    b = assemble_linear(space, cls, problem, penalty, quad_order)
    return LinearSystem(A, b, space.dof_elements)


def galerkin_residual(A, b, x) -> float:
    """Relative residual ||Ax - b|| / ||b||, the Galerkin-orthogonality witness."""
    nb = np.linalg.norm(b)
    if nb == 0:
        return float(np.linalg.norm(A @ x))
    return float(np.linalg.norm(A @ x - b) / nb)
