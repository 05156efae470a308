"""Error norms, EOC computation, and the norm-equivalence machinery."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from patchdg.analysis import (DG_TERMS, EXTRA_TERMS, ConvergenceTable,
                              ErrorReport, energy_norms, eoc, l2_error,
                              norm_terms)
from patchdg.exceptions import NonMonotoneH
from patchdg.problems import get_problem
from patchdg.reconstruction import build_space


def test_eoc_exact_powers():
    hs = np.array([0.4, 0.2, 0.1, 0.05])
    for p in (0.5, 1.0, 2.0, 3.5):
        rates = eoc(hs, 7.3 * hs ** p)
        assert np.allclose(rates, p, rtol=1e-12)


def test_eoc_rejects_nonmonotone():
    with pytest.raises(NonMonotoneH):
        eoc([0.1, 0.2], [1.0, 2.0])


@settings(deadline=None, max_examples=25)
@given(p=st.floats(min_value=0.25, max_value=6.0),
       c=st.floats(min_value=1e-6, max_value=1e6))
def test_eoc_power_property(p, c):
    hs = np.array([0.8, 0.4, 0.2])
    assert np.allclose(eoc(hs, c * hs ** p), p, rtol=1e-9)


def test_convergence_table_guards_h():
    table = ConvergenceTable()
    table.append(ErrorReport(0.2, 10, 1.0, 0.5, 0.1))
    with pytest.raises(NonMonotoneH):
        table.append(ErrorReport(0.2, 40, 0.5, 0.2, 0.01))
    table.append(ErrorReport(0.1, 40, 0.5, 0.2, 0.01))
    assert np.array_equal(table.column("dofs"), [10, 40])


def test_dg_below_energy_on_random_vectors(space20_m2, rng):
    # the extended norm adds nonnegative terms to the plain dg norm
    cls = space20_m2.classification
    for _ in range(5):
        u = rng.standard_normal(space20_m2.n_dofs)
        dg, en, terms = energy_norms(space20_m2, cls, None, u, 6)
        assert dg <= en
        assert all(terms[t] >= 0 for t in DG_TERMS + EXTRA_TERMS)


def test_zero_error_for_exact_dofs(space20_m3):
    # u = x^3 + y^3 lies in the space; all error norms vanish
    cls = space20_m3.classification
    prob = get_problem("cubic_patch")
    u = space20_m3.sample_dofs(prob.spec.u)
    dg, en, _ = energy_norms(space20_m3, cls, prob.spec, u, 8)
    assert en < 1e-9
    assert l2_error(space20_m3, cls, prob.spec, u, 8) < 1e-11


def test_l2_norm_oracle(space20_m2):
    # with u_h = 0 the broken L2 error is the L2 norm of the exact
    # solution; for cubic_patch u = x^3 + y^3 on the square:
    # int (x^3+y^3)^2 = 2 * (2/7 * 2) + 0 (odd cross term) = 8/7
    cls = space20_m2.classification
    prob = get_problem("cubic_patch")
    val = l2_error(space20_m2, cls, prob.spec, np.zeros(space20_m2.n_dofs), 8)
    exact = np.sqrt(8.0 / 7.0)
    assert np.isclose(val, exact, rtol=1e-10)


def test_norm_terms_scale_quadratically(space20_m2, rng):
    cls = space20_m2.classification
    u = rng.standard_normal(space20_m2.n_dofs)
    t1 = norm_terms(space20_m2, cls, None, u, 6)
    t2 = norm_terms(space20_m2, cls, None, 3.0 * u, 6)
    for name in t1:
        assert np.isclose(t2[name], 9.0 * t1[name], rtol=1e-10)
