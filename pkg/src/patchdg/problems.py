"""The benchmark interface problems with hard-coded exact data.

All derivatives (through fourth order for the source term) were derived
by computer algebra and are hard-coded below; ``validate_problem`` checks
them at registration against finite differences and the jump identities,
so a transcription slip cannot survive unnoticed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .exceptions import PatchDGError
from .geometry import (CircleLevelSet, EllipseLevelSet, LevelSet,
                       StarLevelSet, interface_normal, project_to_interface)
from .system import ProblemSpec

# (eta, #S) per degree m used in the experiments; the strong-contrast
# problem needs larger eta
ETA_DEFAULT = {2: 20.0, 3: 20.0, 4: 20.0, 5: 35.0, 6: 35.0}
ETA_STRONG = {2: 50.0, 3: 100.0, 4: 300.0}
PATCH_DEFAULT = {2: 12, 3: 18, 4: 25, 5: 32, 6: 55}


@dataclass
class NamedProblem:
    name: str
    domain: tuple[float, float, float, float]
    level_set: LevelSet
    spec: ProblemSpec
    eta: dict[int, float] = field(default_factory=lambda: dict(ETA_DEFAULT))
    patch_size: dict[int, int] = field(
        default_factory=lambda: dict(PATCH_DEFAULT))
    initial_n: int = 10

    def recommended(self, m: int) -> tuple[float, int]:
        """(eta, #S) for degree m; falls back to generic growth rules."""
        eta = self.eta.get(m, max(self.eta.values()))
        size = self.patch_size.get(m, 3 * (m + 1) * (m + 2) // 2)
        return eta, size


def _sides(f0, f1):
    def fn(pts, side):
        pts = np.atleast_2d(np.asarray(pts, float))
        x, y = pts[:, 0], pts[:, 1]
        out = f0(x, y) if side == 0 else f1(x, y)
        return np.broadcast_to(np.asarray(out, float), x.shape).copy()
    return fn


def _grad_sides(f0, f1):
    def fn(pts, side):
        pts = np.atleast_2d(np.asarray(pts, float))
        x, y = pts[:, 0], pts[:, 1]
        gx, gy = (f0 if side == 0 else f1)(x, y)
        return np.column_stack([np.broadcast_to(gx, x.shape),
                                np.broadcast_to(gy, x.shape)])
    return fn


def _guard_origin(x, y):
    r2 = x * x + y * y
    if np.any(r2 <= 0.01):
        raise PatchDGError(
            "outer-branch formula evaluated too close to the origin")
    return r2


# ---------------------------------------------------------------------------
# closed forms (computer-algebra output)

def _spec_example1() -> ProblemSpec:
    e = lambda x, y: np.exp(x ** 2 + y ** 2)

    def u1(x, y):
        r2 = _guard_origin(x, y)
        return r2 ** 2 / 10 - np.log(r2) / 200

    def g1(x, y):
        r2 = _guard_origin(x, y)
        d = x * (40 * r2 ** 2 - 1) / (100 * r2)
        return d, y * (40 * r2 ** 2 - 1) / (100 * r2)

    u = _sides(lambda x, y: e(x, y), u1)
    grad_u = _grad_sides(
        lambda x, y: (2 * x * e(x, y), 2 * y * e(x, y)), g1)
    lap_u = _sides(lambda x, y: 4 * (x ** 2 + y ** 2 + 1) * e(x, y),
                   lambda x, y: 1.6 * (x ** 2 + y ** 2))
    grad_lap_u = _grad_sides(
        lambda x, y: (8 * x * (x ** 2 + y ** 2 + 2) * e(x, y),
                      8 * y * (x ** 2 + y ** 2 + 2) * e(x, y)),
        lambda x, y: (3.2 * x, 3.2 * y))
    f = _sides(
        lambda x, y: 16 * (x ** 4 + 2 * x ** 2 * y ** 2 + 4 * x ** 2
                           + y ** 4 + 4 * y ** 2 + 2) * e(x, y),
        lambda x, y: 64.0)
    return ProblemSpec.from_exact((1.0, 10.0), u, grad_u, lap_u,
                                  grad_lap_u, f)


def _spec_example2() -> ProblemSpec:
    s, c = np.sin, np.cos
    u = _sides(lambda x, y: s(2 * x) ** 2 * s(2 * y) ** 2,
               lambda x, y: s(2 * x) * s(2 * y))
    grad_u = _grad_sides(
        lambda x, y: (4 * s(2 * x) * c(2 * x) * s(2 * y) ** 2,
                      4 * s(2 * x) ** 2 * s(2 * y) * c(2 * y)),
        lambda x, y: (2 * c(2 * x) * s(2 * y), 2 * s(2 * x) * c(2 * y)))
    lap_u = _sides(
        lambda x, y: 8 * c(4 * x) * s(2 * y) ** 2 + 8 * c(4 * y) * s(2 * x) ** 2,
        lambda x, y: -8 * s(2 * x) * s(2 * y))
    grad_lap_u = _grad_sides(
        lambda x, y: (
            32 * (16 * s(y) ** 4 - 16 * s(y) ** 2 + 1) * s(2 * x) * c(2 * x),
            32 * (16 * s(x) ** 4 - 16 * s(x) ** 2 + 1) * s(2 * y) * c(2 * y)),
        lambda x, y: (-16 * c(2 * x) * s(2 * y), -16 * s(2 * x) * c(2 * y)))
    f = _sides(
        lambda x, y: (384 * s(2 * x) ** 2 * s(2 * y) ** 2
                      - 256 * s(2 * x) ** 2 * c(2 * y) ** 2
                      - 256 * s(2 * y) ** 2 * c(2 * x) ** 2
                      + 128 * c(2 * x) ** 2 * c(2 * y) ** 2),
        lambda x, y: 640 * s(2 * x) * s(2 * y))
    return ProblemSpec.from_exact((1.0, 10.0), u, grad_u, lap_u,
                                  grad_lap_u, f)


def _sincos_inner():
    """Closed forms for u = x + sin(2x^2 + y^2 + 2) (used by two problems)."""
    s, c = np.sin, np.cos
    q = lambda x, y: 2 * x ** 2 + y ** 2 + 2
    u0 = lambda x, y: x + s(q(x, y))
    g0 = lambda x, y: (4 * x * c(q(x, y)) + 1, 2 * y * c(q(x, y)))
    lap0 = lambda x, y: (-(16 * x ** 2 + 4 * y ** 2) * s(q(x, y))
                         + 6 * c(q(x, y)))
    gl0 = lambda x, y: (
        -8 * x * ((8 * x ** 2 + 2 * y ** 2) * c(q(x, y)) + 7 * s(q(x, y))),
        -4 * y * ((8 * x ** 2 + 2 * y ** 2) * c(q(x, y)) + 5 * s(q(x, y))))
    f0 = lambda x, y: (
        (256 * x ** 4 + 128 * x ** 2 * y ** 2 + 16 * y ** 4) * s(q(x, y))
        - (448 * x ** 2 + 80 * y ** 2) * c(q(x, y)) - 76 * s(q(x, y)))
    return u0, g0, lap0, gl0, f0


def _cos_outer(beta1: float):
    """Closed forms for u = cos(x^2 + y^2 - 1)/10 with f scaled by beta."""
    s, c = np.sin, np.cos
    q = lambda x, y: x ** 2 + y ** 2 - 1
    u1 = lambda x, y: c(q(x, y)) / 10
    g1 = lambda x, y: (-x * s(q(x, y)) / 5, -y * s(q(x, y)) / 5)
    lap1 = lambda x, y: -(2 * (x ** 2 + y ** 2) * c(q(x, y))
                          + 2 * s(q(x, y))) / 5
    gl1 = lambda x, y: (
        0.8 * x * ((x ** 2 + y ** 2) * s(q(x, y)) - 2 * c(q(x, y))),
        0.8 * y * ((x ** 2 + y ** 2) * s(q(x, y)) - 2 * c(q(x, y))))
    scale = beta1 / 100.0
    f1 = lambda x, y: scale * (
        (160 * (x ** 2 + y ** 2) ** 2 - 320) * c(q(x, y))
        + 640 * (x ** 2 + y ** 2) * s(q(x, y)))
    return u1, g1, lap1, gl1, f1


def _spec_example34(beta1: float) -> ProblemSpec:
    u0, g0, lap0, gl0, f0 = _sincos_inner()
    u1, g1, lap1, gl1, f1 = _cos_outer(beta1)
    return ProblemSpec.from_exact(
        (1.0, beta1),
        _sides(u0, u1), _grad_sides(g0, g1), _sides(lap0, lap1),
        _grad_sides(gl0, gl1), _sides(f0, f1))


def _spec_cubic() -> ProblemSpec:
    """Global u = x^3 + y^3 with a beta jump: the patch-test problem."""
    u = lambda x, y: x ** 3 + y ** 3
    g = lambda x, y: (3 * x ** 2, 3 * y ** 2)
    lap = lambda x, y: 6 * x + 6 * y
    gl = lambda x, y: (6.0 + 0 * x, 6.0 + 0 * y)
    zero = lambda x, y: 0.0 * x
    return ProblemSpec.from_exact(
        (1.0, 10.0), _sides(u, u), _grad_sides(g, g), _sides(lap, lap),
        _grad_sides(gl, gl), _sides(zero, zero))


# ---------------------------------------------------------------------------
# validation oracles

def _fd_lap(fn, pts, side, step=1e-3):
    """4th-order finite-difference Laplacian of a per-side callback."""
    acc = np.zeros(len(pts))
    coeffs = ((-1.0 / 12, 2), (4.0 / 3, 1), (-2.5, 0), (4.0 / 3, -1),
              (-1.0 / 12, -2))
    for dim in (0, 1):
        for cfac, k in coeffs:
            shifted = pts.copy()
            shifted[:, dim] += k * step
            acc += cfac * fn(shifted, side)
    return acc / step ** 2


def _interface_points(ls: LevelSet, domain, count, seed=0):
    rng = np.random.default_rng(seed)
    xmin, ymin, xmax, ymax = domain
    pts = []
    while len(pts) < count:
        cand = rng.uniform((xmin, ymin), (xmax, ymax), (4 * count, 2))
        cand = 0.55 * cand / np.maximum(
            np.linalg.norm(cand, axis=1), 1e-9)[:, None]
        try:
            proj = project_to_interface(ls, cand)
        except PatchDGError:
            continue
        keep = ((proj[:, 0] > xmin) & (proj[:, 0] < xmax)
                & (proj[:, 1] > ymin) & (proj[:, 1] < ymax))
        pts.extend(proj[keep][: count - len(pts)])
    return np.array(pts)


def validate_problem(prob: NamedProblem, n_points: int = 100,
                     tol_jump: float = 1e-8, tol_f: float = 1e-5) -> None:
    """Check jump identities and the source term against the exact solution."""
    spec = prob.spec
    pts = _interface_points(prob.level_set, prob.domain, n_points)
    n0 = interface_normal(prob.level_set, pts)
    b0, b1 = spec.beta

    a1 = spec.u(pts, 0) - spec.u(pts, 1)
    a2 = np.einsum("ij,ij->i", spec.grad_u(pts, 0) - spec.grad_u(pts, 1), n0)
    a3 = b0 * spec.lap_u(pts, 0) - b1 * spec.lap_u(pts, 1)
    a4 = np.einsum("ij,ij->i", b0 * spec.grad_lap_u(pts, 0)
                   - b1 * spec.grad_lap_u(pts, 1), n0)
    scale = 1.0 + np.abs(spec.u(pts, 0)).max()
    for got, ref, name in ((spec.a1(pts, n0), a1, "a1"),
                           (spec.a2(pts, n0), a2, "a2"),
                           (spec.a3(pts, n0), a3, "a3"),
                           (spec.a4(pts, n0), a4, "a4")):
        if np.abs(got - ref).max() > tol_jump * scale:
            raise PatchDGError(
                f"{prob.name}: jump callback {name} inconsistent with the "
                "exact solution")

    # f = lap(beta lap u), checked by finite differences away from both
    # the interface and the region boundary
    rng = np.random.default_rng(1)
    for side, beta in ((0, b0), (1, b1)):
        cand = rng.uniform(-0.9, 0.9, (50 * n_points, 2))
        phi = prob.level_set.phi(cand)
        sgn = -1.0 if side == 0 else 1.0
        cand = cand[sgn * phi > 0.05][:n_points]
        blap = lambda p, s: beta * spec.lap_u(p, s)
        fd = _fd_lap(blap, cand, side)
        ref = spec.f(cand, side)
        err = np.abs(fd - ref).max() / (1.0 + np.abs(ref).max())
        if err > tol_f:
            raise PatchDGError(
                f"{prob.name}: source term disagrees with the FD "
                f"bi-Laplacian on side {side} (rel err {err:.2e})")


# ---------------------------------------------------------------------------
# registry

@lru_cache(maxsize=None)
def example1() -> NamedProblem:
    prob = NamedProblem("example1", (-1, -1, 1, 1), CircleLevelSet(0.5),
                        _spec_example1())
    validate_problem(prob)
    return prob


@lru_cache(maxsize=None)
def example2() -> NamedProblem:
    prob = NamedProblem("example2", (-1, -1, 1, 1), CircleLevelSet(0.5),
                        _spec_example2())
    validate_problem(prob)
    return prob


@lru_cache(maxsize=None)
def example3() -> NamedProblem:
    prob = NamedProblem("example3", (-1, -1, 1, 1), EllipseLevelSet(2, 3, 1),
                        _spec_example34(100.0), eta=dict(ETA_STRONG))
    validate_problem(prob)
    return prob


@lru_cache(maxsize=None)
def example4() -> NamedProblem:
    prob = NamedProblem("example4", (-1, -1, 1, 1), StarLevelSet(),
                        _spec_example34(10.0))
    validate_problem(prob)
    return prob


@lru_cache(maxsize=None)
def cubic_patch() -> NamedProblem:
    """u = x^3 + y^3 on both sides of the circle; f = 0 (consistency test)."""
    prob = NamedProblem("cubic_patch", (-1, -1, 1, 1), CircleLevelSet(0.5),
                        _spec_cubic())
    validate_problem(prob)
    return prob


_REGISTRY = {
    "example1": example1,
    "example2": example2,
    "example3": example3,
    "example4": example4,
    "cubic_patch": cubic_patch,
}


def get_problem(name: str) -> NamedProblem:
    try:
        factory = _REGISTRY[name]
    except KeyError:
        raise PatchDGError(
            f"unknown problem {name!r}; choose from {sorted(_REGISTRY)}"
        ) from None
    return factory()


def problem_names() -> list[str]:
    return sorted(_REGISTRY)
