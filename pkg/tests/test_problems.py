"""Benchmark problem data against finite-difference and jump oracles."""

import numpy as np
import pytest

from patchdg.exceptions import PatchDGError
from patchdg.geometry import interface_normal, project_to_interface
from patchdg.problems import (ETA_DEFAULT, ETA_STRONG, PATCH_DEFAULT,
                              get_problem, problem_names, validate_problem)


def test_registry_names():
    assert problem_names() == ["cubic_patch", "example1", "example2",
                               "example3", "example4"]
    with pytest.raises(PatchDGError):
        get_problem("example9")


@pytest.mark.parametrize("name", problem_names())
def test_all_problems_validate(name):
    # jump identities at projected interface points plus an FD check of
    # f = lap(beta lap u) on both sides
    validate_problem(get_problem(name))


def test_recommended_tables():
    p1 = get_problem("example1")
    assert p1.recommended(2) == (20.0, 12)
    assert p1.recommended(5) == (35.0, 32)
    p3 = get_problem("example3")
    assert p3.recommended(2) == (50.0, 12)
    assert p3.recommended(3) == (100.0, 18)
    assert p3.recommended(4) == (300.0, 25)
    assert set(ETA_DEFAULT) == {2, 3, 4, 5, 6}
    assert set(ETA_STRONG) == {2, 3, 4}
    assert PATCH_DEFAULT[6] == 55


def test_coefficients():
    assert get_problem("example1").spec.beta == (1.0, 10.0)
    assert get_problem("example3").spec.beta == (1.0, 100.0)
    assert get_problem("example4").spec.beta == (1.0, 10.0)


def test_cubic_patch_has_zero_source_and_no_jumps():
    prob = get_problem("cubic_patch")
    rng = np.random.default_rng(3)
    pts = rng.uniform(-0.9, 0.9, (50, 2))
    assert np.all(prob.spec.f(pts, 0) == 0.0)
    assert np.all(prob.spec.f(pts, 1) == 0.0)
    gpts = project_to_interface(prob.level_set, pts)
    n0 = interface_normal(prob.level_set, gpts)
    assert np.abs(prob.spec.a1(gpts, n0)).max() < 1e-14
    assert np.abs(prob.spec.a2(gpts, n0)).max() < 1e-14
    # beta jumps, so [beta lap u] does not vanish
    assert np.abs(prob.spec.a3(gpts, n0)).max() > 0.1


def test_example1_solution_values():
    # closed forms: u0 = exp(x^2 + y^2) inside r = 0.5,
    # u1 = r^4 / 10 - ln(r^2) / 200 outside
    spec = get_problem("example1").spec
    p = np.array([[0.3, 0.0]])
    assert np.isclose(spec.u(p, 0)[0], np.exp(0.09))
    q = np.array([[0.8, 0.0]])
    r2 = 0.64
    assert np.isclose(spec.u(q, 1)[0], r2 ** 2 / 10 - np.log(r2) / 200)


def test_corrupted_problem_detected():
    # perturbing one jump callback must trip the validator
    prob = get_problem("example1")
    broken = type(prob.spec)(
        prob.spec.beta, prob.spec.f, prob.spec.g1, prob.spec.g2,
        lambda p, n: prob.spec.a1(p, n) + 1e-4,
        prob.spec.a2, prob.spec.a3, prob.spec.a4,
        u=prob.spec.u, grad_u=prob.spec.grad_u, lap_u=prob.spec.lap_u,
        grad_lap_u=prob.spec.grad_lap_u)
    bad = type(prob)(prob.name, prob.domain, prob.level_set, broken,
                     prob.eta, prob.patch_size, prob.initial_n)
    with pytest.raises(PatchDGError):
        validate_problem(bad)
