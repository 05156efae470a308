"""Assembled bilinear/linear forms: symmetry, consistency, reproducibility."""

import numpy as np
import pytest
import scipy.sparse as sp

from patchdg.exceptions import PatchDGError
from patchdg.problems import get_problem
from patchdg.reconstruction import build_space
from patchdg.solve import solve_spd
from patchdg.system import (PenaltyConfig, ProblemSpec, assemble_bilinear,
                            assemble_linear, assemble_system,
                            galerkin_residual)


@pytest.fixture(scope="module")
def system10(circle10):
    space = build_space(circle10, 2)
    prob = get_problem("example1")
    sys_ = assemble_system(space, circle10, prob.spec, PenaltyConfig(20.0))
    return space, prob, sys_


def test_matrix_symmetric(system10):
    _, _, sys_ = system10
    A = sys_.A
    d = sp.coo_matrix(A - A.T)
    amax = np.abs(A.data).max()
    assert (np.abs(d.data).max() if d.nnz else 0.0) <= 1e-12 * amax


def test_matrix_positive_definite(system10):
    _, _, sys_ = system10
    x, report = solve_spd(sys_.A, sys_.b)
    assert report.min_pivot > 0
    assert galerkin_residual(sys_.A, sys_.b, x) < 1e-12


def test_assembly_reproducible(circle10):
    space = build_space(circle10, 2)
    prob = get_problem("example1")
    s1 = assemble_system(space, circle10, prob.spec, PenaltyConfig(20.0))
    s2 = assemble_system(space, circle10, prob.spec, PenaltyConfig(20.0))
    assert np.array_equal(s1.A.indptr, s2.A.indptr)
    assert np.array_equal(s1.A.indices, s2.A.indices)
    assert np.array_equal(s1.A.data, s2.A.data)
    assert np.array_equal(s1.b, s2.b)


def test_quadratic_form_positive(system10, rng):
    _, _, sys_ = system10
    for _ in range(10):
        v = rng.standard_normal(sys_.A.shape[0])
        assert v @ (sys_.A @ v) > 0


def test_consistency_on_polynomial_data(circle10):
    # with the exact solution in the discrete space, interpolation DOFs
    # solve the Galerkin system up to roundoff (no discretization error)
    prob = get_problem("cubic_patch")
    space = build_space(circle10, 3)
    sys_ = assemble_system(space, circle10, prob.spec, PenaltyConfig(100.0))
    u_i = space.sample_dofs(lambda p, s: prob.spec.u(p, s))
    r = sys_.A @ u_i - sys_.b
    scale = max(np.abs(sys_.A @ u_i).max(), np.abs(sys_.b).max())
    assert np.abs(r).max() < 1e-8 * scale


def test_penalty_scaling_shifts_spectrum(circle10):
    # B_eta2 - B_eta1 is the penalty part scaled by (eta2 - eta1) / eta1
    space = build_space(circle10, 2)
    prob = get_problem("example1")
    a20 = assemble_bilinear(space, circle10, prob.spec, PenaltyConfig(20.0))
    a40 = assemble_bilinear(space, circle10, prob.spec, PenaltyConfig(40.0))
    d = (a40 - a20).toarray()
    # penalty difference is itself positive semidefinite
    w = np.linalg.eigvalsh(0.5 * (d + d.T))
    assert w.min() > -1e-9 * max(abs(w).max(), 1.0)


def test_rhs_independent_of_matrix_path(circle10):
    space = build_space(circle10, 2)
    prob = get_problem("example1")
    b1 = assemble_linear(space, circle10, prob.spec, PenaltyConfig(20.0))
    b2 = assemble_system(space, circle10, prob.spec, PenaltyConfig(20.0)).b
    assert np.array_equal(b1, b2)


def test_penalty_config_validation():
    with pytest.raises(PatchDGError):
        PenaltyConfig(0.0)
    with pytest.raises(PatchDGError):
        ProblemSpec((1.0, -1.0), None, None, None, None, None, None, None)
    cfg = PenaltyConfig(20.0)
    assert np.isclose(cfg.mu1_face(0.5), 20.0 / 0.125)
    assert np.isclose(cfg.mu2_interface(0.5), 40.0)
