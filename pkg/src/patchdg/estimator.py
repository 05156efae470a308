"""Scikit-learn style front end: fit a solve, predict point values."""

from __future__ import annotations

import time

import numpy as np
from scipy.spatial import cKDTree
from sklearn.base import BaseEstimator

from .analysis import ErrorReport, energy_norms, l2_error
from .exceptions import PatchDGError
from .geometry import classify, make_level_set
from .mesh import Mesh, generate_structured
from .problems import NamedProblem, get_problem
from .reconstruction import build_space
from .solve import solve_spd
from .system import PenaltyConfig, assemble_system, galerkin_residual


class InterfaceSolver(BaseEstimator):
    """Patch-reconstruction interior-penalty solver for Delta(beta Delta u) = f.

    Parameters follow the CLI flags: a named benchmark ``problem``, the
    reconstruction degree ``order``, the mesh resolution ``n`` (used when
    no mesh is passed to :meth:`fit`), and optional overrides for the
    penalty ``eta``, the patch threshold ``patch_size``, the volume
    quadrature order ``quad_order``, and the classification tolerance
    ``geom_tol``. Unset overrides fall back to the problem's tabulated
    defaults for the given degree.
    """

    def __init__(self, problem="example1", order=2, n=10, eta=None,
                 patch_size=None, quad_order=None, geom_tol=1e-3):
        self.problem = problem
        self.order = order
        self.n = n
        self.eta = eta
        self.patch_size = patch_size
        self.quad_order = quad_order
        self.geom_tol = geom_tol

    # ------------------------------------------------------------------
    def _resolved(self):
        prob = self.problem
        if isinstance(prob, str):
            prob = get_problem(prob)
        if not isinstance(prob, NamedProblem):
            raise PatchDGError(f"unknown problem {self.problem!r}")
        eta, size = prob.recommended(self.order)
        if self.eta is not None:
            eta = float(self.eta)
        if self.patch_size is not None:
            size = int(self.patch_size)
        return prob, eta, size

    def fit(self, X=None, y=None):
        """Solve the problem on ``X`` (a Mesh) or on a structured n x n mesh.

        ``y`` is ignored; it exists for estimator-API compatibility.
        """
        prob, eta, size = self._resolved()
        mesh = X if isinstance(X, Mesh) else \
            generate_structured(prob.domain, int(self.n))
        t0 = time.perf_counter()
        cls = classify(mesh, make_level_set(prob.level_set),
                       geom_tol=self.geom_tol)
        space = build_space(cls, int(self.order), size)
        system = assemble_system(space, cls, prob.spec, PenaltyConfig(eta),
                                 quad_order=self.quad_order)
        A, b = system.A, system.b
        t1 = time.perf_counter()
        u, report = solve_spd(A, b)
        t2 = time.perf_counter()

        self.problem_ = prob
        self.mesh_ = mesh
        self.classification_ = cls
        self.space_ = space
        self.matrix_ = A
        self.rhs_ = b
        self.coef_ = u
        self.factorization_ = report
        self.assemble_ms_ = 1e3 * (t1 - t0)
        self.solve_ms_ = 1e3 * (t2 - t1)
        self._tree = cKDTree(mesh.barycenters)
        return self

    # ------------------------------------------------------------------
    def _locate(self, pts):
        """Element index containing each point (nearest candidate scan)."""
        mesh = self.mesh_
        k = min(16, mesh.n_elements)
        _, cand = self._tree.query(pts, k=k)
        cand = np.atleast_2d(cand)
        out = np.full(len(pts), -1, dtype=np.int64)
        tri = mesh.vertices[mesh.triangles]  # (nt, 3, 2)
        for i, p in enumerate(pts):
            for K in cand[i]:
                v = tri[K]
                tol = -1e-12 * mesh.h_K[K]
                ok = True
                for a in range(3):
                    e = v[(a + 1) % 3] - v[a]
                    if e[0] * (p[1] - v[a, 1]) - e[1] * (p[0] - v[a, 0]) < tol:
                        ok = False
                        break
                if ok:
                    out[i] = K
                    break
        if np.any(out < 0):
            raise PatchDGError("point outside the mesh in predict()")
        return out

    def predict(self, X):
        """Evaluate the discrete solution at points X of shape (n, 2)."""
        if not hasattr(self, "coef_"):
            raise PatchDGError("estimator is not fitted")
        pts = np.asarray(X, float).reshape(-1, 2)
        cls = self.classification_
        ls = cls.level_set
        elems = self._locate(pts)
        side = (ls.phi(pts) >= 0).astype(int)
        out = np.empty(len(pts))
        for K in np.unique(elems):
            mask = elems == K
            sides = side[mask] if cls.elem_tag[K] == 2 else \
                np.full(mask.sum(), cls.elem_tag[K])
            for s in np.unique(sides):
                sel = np.flatnonzero(mask)[sides == s]
                out[sel] = self.space_.evaluate(self.coef_, int(K), int(s),
                                                pts[sel])
        return out

    # ------------------------------------------------------------------
    def residual(self) -> float:
        """Relative Galerkin residual ||A u - b|| / ||b|| of the solve."""
        return galerkin_residual(self.matrix_, self.rhs_, self.coef_)

    def error_report(self, quad_order=None) -> ErrorReport:
        """Energy/dg/L2 errors against the problem's exact solution."""
        dg, en, terms = energy_norms(self.space_, self.classification_,
                                     self.problem_.spec, self.coef_,
                                     quad_order)
        l2 = l2_error(self.space_, self.classification_, self.problem_.spec,
                      self.coef_, quad_order)
        return ErrorReport(self.mesh_.h, self.space_.n_dofs, en, dg, l2,
                           terms, self.assemble_ms_, self.solve_ms_)

    def score(self, X=None, y=None) -> float:
        """Negative energy error (larger is better, estimator convention)."""
        return -self.error_report().energy_error
