"""Reference quadrature rules: segments, triangles, and curved triangles."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np


@dataclass(frozen=True)
class QuadratureRule:
    """Points and weights over a physical region.

    ``region`` tags the region kind: "bulk-side-0", "bulk-side-1",
    "interface-segment", "face-segment-side-0" or "face-segment-side-1".
    Face and interface weights are strictly positive; bulk rules over cut
    elements may carry signed strip corrections between the chord polygon
    and the curved interface, so only finiteness is required there.
    """

    points: np.ndarray  # (n, 2)
    weights: np.ndarray  # (n,)
    region: str
    order: int

    def __post_init__(self):
        if not np.all(np.isfinite(self.weights)):
            raise ValueError("quadrature weights must be finite")
        if not self.region.startswith("bulk") and np.any(self.weights <= 0):
            raise ValueError("quadrature weights must be positive")

    @property
    def total(self) -> float:
        return float(self.weights.sum())


@lru_cache(maxsize=None)
def gauss_legendre_01(n: int):
    """n-point Gauss-Legendre rule on [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


def segment_rule(a, b, order: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss rule on the segment [a, b], exact to polynomial ``order``."""
    a = np.asarray(a, float)
    b = np.asarray(b, float)
    n = max(1, (order + 2) // 2)
    t, w = gauss_legendre_01(n)
    pts = a[None, :] + t[:, None] * (b - a)[None, :]
    return pts, w * np.linalg.norm(b - a)


@lru_cache(maxsize=None)
def reference_triangle_rule(order: int):
    """Rule on the unit triangle {x,y >= 0, x+y <= 1}, exact to ``order``.

    Built from a tensor Gauss rule through the Duffy transform; the extra
    Jacobian factor raises the required 1D order by one.
    """
    n = max(1, (order + 3) // 2)
    t, w = gauss_legendre_01(n)
    xi = np.repeat(t, n)
    eta = np.tile(t, n)
    ww = np.outer(w, w).ravel()
    x = xi
    y = eta * (1.0 - xi)
    weights = ww * (1.0 - xi)
    return np.column_stack([x, y]), weights


def triangle_rule(v0, v1, v2, order: int):
    """Affine-mapped Gauss rule over the triangle (v0, v1, v2)."""
    ref, w = reference_triangle_rule(order)
    v0 = np.asarray(v0, float)
    e1 = np.asarray(v1, float) - v0
    e2 = np.asarray(v2, float) - v0
    det = e1[0] * e2[1] - e1[1] * e2[0]
    pts = v0[None, :] + np.outer(ref[:, 0], e1) + np.outer(ref[:, 1], e2)
    return pts, w * abs(det)
