"""Scaled monomial bases and their derivatives.

Each element-side polynomial is expressed in monomials of the local
coordinate t = (x - center) / scale, which keeps least-squares condition
numbers essentially mesh-size independent.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np


def space_dim(m: int) -> int:
    """Dimension of bivariate polynomials of degree <= m."""
    return (m + 1) * (m + 2) // 2


@lru_cache(maxsize=None)
def exponents(m: int) -> np.ndarray:
    """Monomial exponent pairs (p, q), ordered by total degree.

    Index 0 is the constant monomial; this ordering is relied on by the
    constrained least-squares fit (the anchor constraint pins index 0).
    """
    exps = [(d - q, q) for d in range(m + 1) for q in range(d + 1)]
    return np.array(exps, dtype=np.int64)


def eval_monomials(points, center, scale, m, dx=0, dy=0):
    """Evaluate d^dx/dx^dx d^dy/dy^dy of all monomials at ``points``.

    Returns an array of shape (n_points, space_dim(m)).
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    exps = exponents(m)
    tx = (pts[:, 0] - center[0]) / scale
    ty = (pts[:, 1] - center[1]) / scale

    # power tables t^k for k = 0..m
    px = np.ones((m + 1, len(pts)))
    py = np.ones((m + 1, len(pts)))
    for k in range(1, m + 1):
        px[k] = px[k - 1] * tx
        py[k] = py[k - 1] * ty

    out = np.zeros((len(pts), len(exps)))
    inv = scale ** (-(dx + dy))
    for j, (p, q) in enumerate(exps):
        if p < dx or q < dy:
            continue
        cx = 1.0
        for a in range(dx):
            cx *= p - a
        for b in range(dy):
            cx *= q - b
        out[:, j] = cx * inv * px[p - dx] * py[q - dy]
    return out


class DerivativeBundle:
    """All derivative combinations of the monomial basis needed by the scheme.

    Attributes are (n_points, D) matrices: val, gx, gy, lap, glx, gly, where
    (glx, gly) is the gradient of the Laplacian (third derivatives).
    """

    __slots__ = ("val", "gx", "gy", "lap", "glx", "gly")

    def __init__(self, points, center, scale, m):
        e = lambda a, b: eval_monomials(points, center, scale, m, a, b)
        self.val = e(0, 0)
        self.gx = e(1, 0)
        self.gy = e(0, 1)
        self.lap = e(2, 0) + e(0, 2)
        self.glx = e(3, 0) + e(1, 2)
        self.gly = e(2, 1) + e(0, 3)
