"""Error norms, convergence tables, and norm-equivalence diagnostics.

The two energy norms follow the scheme's analysis: the plain norm sums
the broken Laplacian with weighted jump terms on faces and on the
interface; the extended norm adds the weighted average terms. All
integrals use the Laplacian itself (not beta times it).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import (InterfaceClassification, interface_normal, quad_bulk,
                       quad_face, quad_interface)
from .exceptions import NonMonotoneH
from .reconstruction import ReconstructionSpace
from .system import ProblemSpec, _outward_normal

DG_TERMS = ("volume_lap", "face_jump_u", "face_jump_gu",
            "interface_jump_u", "interface_jump_gu")
EXTRA_TERMS = ("face_avg_glap", "face_avg_lap",
               "interface_avg_lap", "interface_avg_glap")


@dataclass
class ErrorReport:
    h: float
    dofs: int
    energy_error: float
    dg_error: float
    l2_error: float
    breakdown: dict[str, float] = field(default_factory=dict)
    assemble_ms: float = 0.0
    solve_ms: float = 0.0


@dataclass
class ConvergenceTable:
    reports: list[ErrorReport] = field(default_factory=list)

    def append(self, report: ErrorReport):
        if self.reports and report.h >= self.reports[-1].h:
            raise NonMonotoneH(
                f"mesh size {report.h} does not decrease below "
                f"{self.reports[-1].h}")
        self.reports.append(report)

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.reports])


def eoc(hs, errors) -> np.ndarray:
    """Experimental orders log(err ratio) / log(h ratio), pairwise."""
    hs = np.asarray(hs, float)
    errors = np.asarray(errors, float)
    if np.any(np.diff(hs) >= 0):
        raise NonMonotoneH("mesh sizes must decrease strictly")
    return np.log(errors[:-1] / errors[1:]) / np.log(hs[:-1] / hs[1:])


class _SideValues:
    """Value/gradient/Laplacian/third derivatives of v = u - u_h at points."""

    def __init__(self, space, problem, u_h, K, side, pts):
        tr = space.trace(K, side, pts)
        dofs = np.asarray(u_h, float)[tr.dofs]
        self.val = tr.val @ dofs
        self.gx = tr.gx @ dofs
        self.gy = tr.gy @ dofs
        self.lap = tr.lap @ dofs
        self.glx = tr.glx @ dofs
        self.gly = tr.gly @ dofs
        if problem is not None:
            g = problem.grad_u(pts, side)
            gl = problem.grad_lap_u(pts, side)
            self.val = problem.u(pts, side) - self.val
            self.gx = g[:, 0] - self.gx
            self.gy = g[:, 1] - self.gy
            self.lap = problem.lap_u(pts, side) - self.lap
            self.glx = gl[:, 0] - self.glx
            self.gly = gl[:, 1] - self.gly
        else:
            for name in ("val", "gx", "gy", "lap", "glx", "gly"):
                setattr(self, name, -getattr(self, name))

    def ndot(self, n, which):
        ax, ay = (self.gx, self.gy) if which == "grad" else (self.glx, self.gly)
        if n.ndim == 1:
            return n[0] * ax + n[1] * ay
        return n[:, 0] * ax + n[:, 1] * ay


def norm_terms(space: ReconstructionSpace, cls: InterfaceClassification,
               problem: ProblemSpec | None, u_h, quad_order: int
               ) -> dict[str, float]:
    """Squared contributions of every term of both energy norms.

    With ``problem`` None the norms are taken of -u_h itself (used by the
    equivalence probe); otherwise of the error u - u_h.
    """
    mesh = cls.mesh
    terms = {name: 0.0 for name in DG_TERMS + EXTRA_TERMS}

    for K in range(mesh.n_elements):
        for side in cls.element_sides(K):
            rule = quad_bulk(cls, K, side, quad_order)
            if len(rule.weights) == 0:
                continue
            v = _SideValues(space, problem, u_h, K, side, rule.points)
            terms["volume_lap"] += float(rule.weights @ v.lap ** 2)

    for e in range(len(mesh.faces)):
        Kp, Km = mesh.face_tris[e]
        n = _outward_normal(mesh, e, int(Kp))
        he = float(mesh.h_e[e])
        for side in cls.face_sides(e):
            rule = quad_face(cls, e, side, quad_order)
            if len(rule.weights) == 0:
                continue
            w = rule.weights
            vp = _SideValues(space, problem, u_h, int(Kp), side, rule.points)
            if Km >= 0:
                vm = _SideValues(space, problem, u_h, int(Km), side,
                                 rule.points)
                ju = vp.val - vm.val
                jg = vp.ndot(n, "grad") - vm.ndot(n, "grad")
                alap = 0.5 * (vp.lap + vm.lap)
                aglx = 0.5 * (vp.glx + vm.glx)
                agly = 0.5 * (vp.gly + vm.gly)
            else:
                ju = vp.val
                jg = vp.ndot(n, "grad")
                alap = vp.lap
                aglx, agly = vp.glx, vp.gly
            terms["face_jump_u"] += float(w @ ju ** 2) / he ** 3
            terms["face_jump_gu"] += float(w @ jg ** 2) / he
            terms["face_avg_lap"] += he * float(w @ alap ** 2)
            terms["face_avg_glap"] += he ** 3 * float(
                w @ (aglx ** 2 + agly ** 2))

    for K in cls.cut_elements:
        K = int(K)
        rule = quad_interface(cls, K, quad_order)
        w = rule.weights
        n0 = interface_normal(cls.level_set, rule.points)
        hk = float(mesh.h_K[K])
        v0 = _SideValues(space, problem, u_h, K, 0, rule.points)
        v1 = _SideValues(space, problem, u_h, K, 1, rule.points)
        ju = v0.val - v1.val
        jg = v0.ndot(n0, "grad") - v1.ndot(n0, "grad")
        alap = 0.5 * (v0.lap + v1.lap)
        aglx = 0.5 * (v0.glx + v1.glx)
        agly = 0.5 * (v0.gly + v1.gly)
        terms["interface_jump_u"] += float(w @ ju ** 2) / hk ** 3
        terms["interface_jump_gu"] += float(w @ jg ** 2) / hk
        terms["interface_avg_lap"] += hk * float(w @ alap ** 2)
        terms["interface_avg_glap"] += hk ** 3 * float(
            w @ (aglx ** 2 + agly ** 2))

    return terms


def energy_norms(space, cls, problem, u_h, quad_order=None):
    """(dg_error, energy_error, breakdown) of u - u_h in both norms."""
    if quad_order is None:
        quad_order = 2 * space.m + 2
    terms = norm_terms(space, cls, problem, u_h, quad_order)
    dg2 = sum(terms[t] for t in DG_TERMS)
    en2 = dg2 + sum(terms[t] for t in EXTRA_TERMS)
    return float(np.sqrt(dg2)), float(np.sqrt(en2)), terms


def l2_error(space, cls, problem, u_h, quad_order=None) -> float:
    """Broken L2 norm of u - u_h over both subdomains."""
    if quad_order is None:
        quad_order = 2 * space.m + 2
    acc = 0.0
    for K in range(cls.mesh.n_elements):
        for side in cls.element_sides(K):
            rule = quad_bulk(cls, K, side, quad_order)
            if len(rule.weights) == 0:
                continue
            v = _SideValues(space, problem, u_h, K, side, rule.points)
            acc += float(rule.weights @ v.val ** 2)
    return float(np.sqrt(acc))


def norm_equivalence_probe(space, cls, samples: int = 20,
                           seed: int = 0) -> float:
    """Max of energy/dg norm ratio over random DOF vectors."""
    rng = np.random.default_rng(seed)
    worst = 1.0
    order = 2 * space.m + 2
    for _ in range(samples):
        u_h = rng.standard_normal(space.n_dofs)
        dg, en, _ = energy_norms(space, cls, None, u_h, order)
        if dg > 0:
            worst = max(worst, en / dg)
    return float(worst)
