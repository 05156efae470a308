"""Element patches and the constrained least-squares reconstruction space.

One scalar unknown lives at the barycenter of every uncut element. For
each element (and each side of a cut element) a degree-m polynomial is
fitted over a neighborhood patch by least squares, constrained to
interpolate exactly at the anchor element's barycenter; cut elements
inherit the patch of their anchor.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .basis import DerivativeBundle, eval_monomials, space_dim
from .exceptions import EmptyRegion, PatchTooSmall, RankDeficient
from .geometry import CUT, InterfaceClassification
from .mesh import moore_neighbors

_RANK_TOL = 1e-10
_RETRY_STEP = 5
_MAX_RETRIES = 3

# threshold #S per degree m used in the 2D experiments
DEFAULT_PATCH_SIZE = {2: 12, 3: 18, 4: 25, 5: 32, 6: 55}


@dataclass
class ElementPatch:
    """The patch S^i(K) with its collocation points and anchor."""

    owner: int
    side: int
    elements: list[int]            # sorted by distance to the anchor barycenter
    colloc_elements: list[int]     # uncut members of the patch
    colloc_points: np.ndarray      # (n, 2) barycenters
    anchor: int
    anchor_point: np.ndarray


def build_patch(cls: InterfaceClassification, K: int, side: int,
                threshold: int) -> ElementPatch:
    """Construct S^side(K) by Moore-recursion (or inherit from the anchor)."""
    tag = cls.elem_tag[K]
    if tag == CUT:
        anchor = cls.cut_info[K].anchors[side]
        patch = build_patch(cls, anchor, side, threshold)
        if K not in patch.elements:
            raise PatchTooSmall(
                f"cut element {K} not contained in the inherited patch of "
                f"anchor {anchor}; increase the patch threshold")
        return ElementPatch(K, side, patch.elements, patch.colloc_elements,
                            patch.colloc_points, anchor, patch.anchor_point)
    if tag != side:
        raise EmptyRegion(f"element {K} is not in the side-{side} subdomain")

    mesh = cls.mesh
    in_subdomain = (cls.elem_tag == side) | (cls.elem_tag == CUT)
    current: set[int] = {K}
    frontier: set[int] = {K}
    while len(current) < threshold and frontier:
        grown: set[int] = set()
        for Kp in frontier:
            for Kpp in moore_neighbors(mesh, Kp):
                if in_subdomain[Kpp] and Kpp not in current:
                    grown.add(int(Kpp))
        current |= grown
        frontier = grown

    xK = mesh.barycenters[K]
    members = sorted(current,
                     key=lambda e: (np.linalg.norm(mesh.barycenters[e] - xK), e))
    members = members[:threshold]
    colloc = [e for e in members if cls.elem_tag[e] != CUT]
    return ElementPatch(K, side, members, colloc,
                        mesh.barycenters[colloc].copy(), K, xK.copy())


def _design_matrix(patch: ElementPatch, m: int, scale: float) -> np.ndarray:
    return eval_monomials(patch.colloc_points, patch.anchor_point, scale, m)


def fit_constrained_ls(patch: ElementPatch, m: int, samples,
                       anchor_value: float, scale: float | None = None
                       ) -> np.ndarray:
    """Degree-m LS fit of the patch samples, pinned at the anchor point.

    The constraint is eliminated: in the monomial basis centered at the
    anchor, the constant coefficient equals ``anchor_value`` and the rest
    solve a reduced least-squares problem. Returns the coefficient vector
    of length dim P_m.
    """
    samples = np.asarray(samples, float)
    if scale is None:
        scale = _patch_scale(patch)
    V = _design_matrix(patch, m, scale)
    if len(samples) != V.shape[0]:
        raise ValueError("samples must match the collocation points")
    _check_rank(V)
    coef = np.empty(V.shape[1])
    coef[0] = anchor_value
    sol, *_ = np.linalg.lstsq(V[:, 1:], samples - anchor_value, rcond=None)
    coef[1:] = sol
    return coef


def _check_rank(V: np.ndarray) -> None:
    s = np.linalg.svd(V, compute_uv=False)
    if len(V) < V.shape[1] or s[-1] <= _RANK_TOL * s[0]:
        raise RankDeficient(
            f"design matrix rank-deficient ({V.shape[0]} points, "
            f"dim {V.shape[1]}, sigma ratio "
            f"{s[-1] / s[0] if s[0] > 0 else 0.0:.2e})")


def _patch_scale(patch) -> float:
    # mesh size of the owner element; passed around to avoid a Mesh ref
    return float(np.max(np.ptp(patch.colloc_points, axis=0))) or 1.0


@dataclass
class LocalFit:
    """Linear map from patch DOF values to local polynomial coefficients."""

    dofs: np.ndarray       # global DOF indices of the collocation elements
    coef_map: np.ndarray   # (dim P_m, n) matrix
    center: np.ndarray
    scale: float


@dataclass
class Trace:
    """Per-point derivative matrices of the local polynomial basis."""

    dofs: np.ndarray
    val: np.ndarray
    gx: np.ndarray
    gy: np.ndarray
    lap: np.ndarray
    glx: np.ndarray
    gly: np.ndarray

    @property
    def grad(self):
        return self.gx, self.gy


class ReconstructionSpace:
    """Per element-side linear maps from global DOFs to local polynomials."""

    def __init__(self, cls: InterfaceClassification, m: int, threshold: int):
        if m < 1:
            raise ValueError("reconstruction degree m must be >= 1")
        self.classification = cls
        self.m = m
        self.threshold = threshold
        mesh = cls.mesh

        interior = np.flatnonzero(cls.elem_tag != CUT)
        self.dof_elements = interior
        self.dof_of = np.full(mesh.n_elements, -1, dtype=np.int64)
        self.dof_of[interior] = np.arange(len(interior))
        self.n_dofs = len(interior)

        dim = space_dim(m)
        self.patches: dict[int, ElementPatch] = {}
        self.local: dict[int, LocalFit] = {}
        for K in interior:
            K = int(K)
            side = int(cls.elem_tag[K])
            patch, V = self._build_checked_patch(K, side, dim)
            self.patches[K] = patch
            n = len(patch.colloc_elements)
            a_idx = patch.colloc_elements.index(K)
            P1 = np.linalg.pinv(V[:, 1:])
            C = np.zeros((dim, n))
            C[0, a_idx] = 1.0
            C[1:] = P1
            C[1:, a_idx] -= P1.sum(axis=1)
            self.local[K] = LocalFit(self.dof_of[patch.colloc_elements],
                                     C, mesh.barycenters[K].copy(),
                                     float(mesh.h_K[K]))

        # supp(lambda_{K'}) = elements whose patch contains K'
        self._support: dict[int, set[tuple[int, int]]] = {}
        for K in interior:
            K = int(K)
            for member in self.patches[K].colloc_elements:
                self._support.setdefault(member, set()).add((K, int(cls.elem_tag[K])))
        for K, info in cls.cut_info.items():
            for side in (0, 1):
                for member in self.patches[info.anchors[side]].colloc_elements:
                    self._support.setdefault(member, set()).add((K, side))

    def _build_checked_patch(self, K, side, dim):
        threshold = self.threshold
        err = None
        for _ in range(_MAX_RETRIES + 1):
            patch = build_patch(self.classification, K, side, threshold)
            if len(patch.colloc_elements) < dim:
                total = int(np.sum(self.classification.elem_tag == side))
                if total < dim:
                    raise PatchTooSmall(
                        f"side-{side} subdomain has only {total} interior "
                        f"elements; degree {self.m} needs {dim}")
                threshold += _RETRY_STEP
                err = PatchTooSmall(
                    f"patch of element {K} has too few collocation points")
                continue
            V = _design_matrix(patch, self.m,
                               float(self.classification.mesh.h_K[K]))
            try:
                _check_rank(V)
            except RankDeficient as exc:
                err = exc
                threshold += _RETRY_STEP
                continue
            return patch, V
        raise err

    # ------------------------------------------------------------------
    def side_fit(self, K: int, side: int) -> LocalFit:
        tag = self.classification.elem_tag[K]
        if tag == CUT:
            return self.local[self.classification.cut_info[K].anchors[side]]
        if tag != side:
            raise EmptyRegion(f"element {K} has no side-{side} polynomial")
        return self.local[K]

    def trace(self, K: int, side: int, points) -> Trace:
        """Derivative matrices (n_points x n_patch_dofs) at ``points``."""
        fit = self.side_fit(K, side)
        b = DerivativeBundle(points, fit.center, fit.scale, self.m)
        C = fit.coef_map
        return Trace(fit.dofs, b.val @ C, b.gx @ C, b.gy @ C, b.lap @ C,
                     b.glx @ C, b.gly @ C)

    def evaluate(self, u, K: int, side: int, points, deriv: str = "val"):
        """Evaluate a derivative of the discrete function on (K, side)."""
        tr = self.trace(K, side, points)
        return getattr(tr, deriv) @ np.asarray(u, float)[tr.dofs]

    def support(self, K: int) -> set[tuple[int, int]]:
        """Element-side pairs on which lambda_K may be nonzero."""
        return set(self._support.get(int(K), set()))

    def sample_dofs(self, fn) -> np.ndarray:
        """DOF vector of fn(points, side) at interior barycenters."""
        u = np.empty(self.n_dofs)
        bcs = self.classification.mesh.barycenters
        for side in (0, 1):
            els = self.dof_elements[
                self.classification.elem_tag[self.dof_elements] == side]
            u[self.dof_of[els]] = fn(bcs[els], side)
        return u


def build_space(cls: InterfaceClassification, m: int,
                threshold: int | None = None) -> ReconstructionSpace:
    """Assemble the reconstruction space (one DOF per uncut element)."""
    if threshold is None:
        threshold = DEFAULT_PATCH_SIZE.get(m, 3 * space_dim(m))
    return ReconstructionSpace(cls, m, threshold)


# ---------------------------------------------------------------------------
# stability diagnostics

@dataclass
class ReconstructionDiagnostics:
    """Sampled estimates of the patch stability constants (not bounds)."""

    per_patch: dict[tuple[int, int], float]
    lambda_m: float
    r_estimate: float
    R_estimate: float
    cut_flags: dict[tuple[int, int], int] = field(default_factory=dict)


def estimate_lambda_constants(space: ReconstructionSpace,
                              cls: InterfaceClassification,
                              grid: int = 20) -> ReconstructionDiagnostics:
    """Estimate Lambda(m, S) per patch by a sampled Lebesgue function.

    |p(x)| over the patch is bounded through the LS pseudo-inverse applied
    to values at the collocation points; the maximum of the sampled
    Lebesgue function over a grid covering the patch is the estimate.
    """
    mesh = cls.mesh
    per_patch: dict[tuple[int, int], float] = {}
    cut_flags: dict[tuple[int, int], int] = {}
    lambda_m = 0.0
    r_est = np.inf
    R_est = 0.0
    for K, patch in space.patches.items():
        side = patch.side
        scale = float(mesh.h_K[K])
        V = _design_matrix(patch, space.m, scale)
        P = np.linalg.pinv(V)

        tri_pts = mesh.vertices[mesh.triangles[patch.elements]]  # (ne, 3, 2)
        lo = tri_pts.reshape(-1, 2).min(axis=0)
        hi = tri_pts.reshape(-1, 2).max(axis=0)
        gx, gy = np.meshgrid(np.linspace(lo[0], hi[0], grid),
                             np.linspace(lo[1], hi[1], grid))
        pts = np.column_stack([gx.ravel(), gy.ravel()])
        inside = np.zeros(len(pts), dtype=bool)
        for tv in tri_pts:
            d0 = (tv[1, 0] - tv[0, 0]) * (pts[:, 1] - tv[0, 1]) - \
                 (tv[1, 1] - tv[0, 1]) * (pts[:, 0] - tv[0, 0])
            d1 = (tv[2, 0] - tv[1, 0]) * (pts[:, 1] - tv[1, 1]) - \
                 (tv[2, 1] - tv[1, 1]) * (pts[:, 0] - tv[1, 0])
            d2 = (tv[0, 0] - tv[2, 0]) * (pts[:, 1] - tv[2, 1]) - \
                 (tv[0, 1] - tv[2, 1]) * (pts[:, 0] - tv[2, 0])
            inside |= (d0 >= 0) & (d1 >= 0) & (d2 >= 0)
        sample = pts[inside] if inside.any() else patch.colloc_points

        B = eval_monomials(sample, patch.anchor_point, scale, space.m)
        lebesgue = np.abs(B @ P).sum(axis=1)
        lam = float(max(lebesgue.max(), 1.0))
        per_patch[(K, side)] = lam
        cut_flags[(K, side)] = 3 if any(cls.elem_tag[e] == CUT
                                        for e in patch.elements) else 1
        lambda_m = max(lambda_m,
                       1.0 + lam * np.sqrt(len(patch.colloc_elements)))
        r_est = min(r_est, float(mesh.rho_K[patch.elements].max()) / 2.0)
        R_est = max(R_est, float(np.linalg.norm(
            tri_pts.reshape(-1, 2) - patch.anchor_point, axis=1).max()))
    return ReconstructionDiagnostics(per_patch, lambda_m, r_est, R_est,
                                     cut_flags)
