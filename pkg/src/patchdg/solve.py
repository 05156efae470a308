"""Direct factorization of the assembled symmetric positive-definite system."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .exceptions import NotPositiveDefinite, SingularMatrix


@dataclass
class FactorizationReport:
    success: bool
    dimension: int
    nnz: int
    fill_nnz: int
    min_pivot: float


def solve_spd(A: sp.spmatrix, b: np.ndarray):
    """Solve A x = b by sparse LU restricted to symmetric pivoting.

    With diagonal pivoting suppressed the factorization is LDL^T-like;
    a nonpositive diagonal entry of U certifies that A is not positive
    definite (the penalty eta is too small).
    """
    A = A.tocsc()
    b = np.asarray(b, float)
    try:
        lu = splu(A, diag_pivot_thresh=0.0, permc_spec="MMD_AT_PLUS_A",
                  options=dict(SymmetricMode=True))
    except RuntimeError as exc:
        raise SingularMatrix(f"sparse factorization failed: {exc}") from None
    diag = lu.U.diagonal()
    bad = np.flatnonzero(diag <= 0)
    if len(bad):
        i = int(bad[0])
        raise NotPositiveDefinite(i, float(diag[i]))
    x = lu.solve(b)
    report = FactorizationReport(True, A.shape[0], A.nnz,
                                 lu.L.nnz + lu.U.nnz, float(diag.min()))
    return x, report


def write_system(path, A: sp.spmatrix, b: np.ndarray) -> None:
    """Dump A ('i j value' lines) and b ('i value' lines) as text."""
    A = A.tocoo()
    with open(path, "w") as fh:
        fh.write(f"# matrix {A.shape[0]} x {A.shape[1]}, nnz {A.nnz}\n")
        for i, j, v in zip(A.row, A.col, A.data):
            fh.write(f"{i} {j} {float(v)!r}\n")
        fh.write(f"# rhs {len(b)}\n")
        for i, v in enumerate(b):
            fh.write(f"{i} {float(v)!r}\n")
