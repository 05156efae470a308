"""Interface classification and cut-cell quadrature against area/length oracles.

Analytic oracles: circle r=0.5 (area pi/4, length pi), ellipse
2x^2+3y^2=1 (area pi/sqrt(6)), star r = 0.5 + sin(5 theta)/7
(area pi (1/4 + 1/98)). Lengths without closed forms come from adaptive
1D integration of the polar arc-length element.
"""

import numpy as np
import pytest
from scipy.integrate import quad

from patchdg.exceptions import EmptyRegion, PatchDGError
from patchdg.geometry import (CircleLevelSet, EllipseLevelSet, StarLevelSet,
                              classify, edge_root, interface_length,
                              interface_normal, make_level_set,
                              project_to_interface, quad_bulk, quad_face,
                              quad_interface)
from patchdg.mesh import generate_structured

DOMAIN = (-1.0, -1.0, 1.0, 1.0)

STAR_AREA = np.pi * (0.25 + 1.0 / 98.0)
ELLIPSE_AREA = np.pi / np.sqrt(6.0)


def _polar_length(r, dr):
    val, err = quad(lambda t: np.hypot(r(t), dr(t)), 0.0, 2 * np.pi,
                    limit=400)
    assert err < 1e-7
    return val


STAR_LENGTH = _polar_length(lambda t: 0.5 + np.sin(5 * t) / 7.0,
                            lambda t: 5 * np.cos(5 * t) / 7.0)
# ellipse in polar form r(t) = 1/sqrt(2 cos^2 + 3 sin^2)
ELLIPSE_LENGTH = _polar_length(
    lambda t: (2 * np.cos(t) ** 2 + 3 * np.sin(t) ** 2) ** -0.5,
    lambda t: -0.5 * (2 * np.cos(t) ** 2 + 3 * np.sin(t) ** 2) ** -1.5
    * 2 * np.sin(t) * np.cos(t))


def _areas(cls, side, order=8):
    total = 0.0
    for K in range(cls.mesh.n_elements):
        if side in cls.element_sides(K):
            total += quad_bulk(cls, K, side, order).total
    return total


def _length(cls, order=8):
    return sum(interface_length(cls, int(K), order)
               for K in cls.cut_elements)


@pytest.mark.parametrize("ls,n,area,length", [
    (CircleLevelSet(), 24, np.pi / 4, np.pi),
    (EllipseLevelSet(), 24, ELLIPSE_AREA, ELLIPSE_LENGTH),
    # n=40 is dip-free for the star; dipped resolutions are tested below
    (StarLevelSet(), 40, STAR_AREA, STAR_LENGTH),
])
def test_area_and_length_oracles(ls, n, area, length):
    mesh = generate_structured(DOMAIN, n)
    cls = classify(mesh, ls)
    assert cls.tolerated_dips == 0
    assert abs(_areas(cls, 0) - area) < 1e-7
    assert abs(_areas(cls, 1) - (4.0 - area)) < 1e-7
    assert abs(_length(cls) - length) < 1e-6


def test_tolerated_dip_area_defect_is_small():
    # at n=24 the star grazes a diagonal face between same-sign vertices;
    # the lens beyond the face is attributed to the vertex-sign side and
    # costs a bounded area defect (no hard failure)
    cls = classify(generate_structured(DOMAIN, 24), StarLevelSet())
    assert cls.tolerated_dips == 1
    assert abs(_areas(cls, 0) - STAR_AREA) < 5e-5
    # additivity is unaffected: the defect is pure side attribution
    assert abs(_areas(cls, 0) + _areas(cls, 1) - 4.0) < 1e-10


def test_monte_carlo_area_oracle():
    # independent check of the cut-cell bulk rules with random sampling
    rng = np.random.default_rng(7)
    pts = rng.uniform(-1, 1, size=(400_000, 2))
    ls = StarLevelSet()
    mc = 4.0 * np.mean(ls.phi(pts) < 0)
    cls = classify(generate_structured(DOMAIN, 20), ls)
    sigma = 4.0 * np.sqrt(STAR_AREA / 4 * (1 - STAR_AREA / 4) / len(pts))
    assert abs(_areas(cls, 0) - mc) < 4 * sigma


def test_partition_additivity():
    # |K^0| + |K^1| = |K| for every element
    cls = classify(generate_structured(DOMAIN, 16), CircleLevelSet())
    for K in map(int, cls.cut_elements):
        s = quad_bulk(cls, K, 0, 6).total + quad_bulk(cls, K, 1, 6).total
        assert abs(s - cls.mesh.areas[K]) < 1e-13


def test_classification_tags_match_barycenter_signs():
    cls = classify(generate_structured(DOMAIN, 12), CircleLevelSet())
    phi = cls.level_set.phi(cls.mesh.barycenters)
    for K in range(cls.mesh.n_elements):
        tag = cls.elem_tag[K]
        if tag == 0:
            assert phi[K] < 0
        elif tag == 1:
            assert phi[K] > 0


def test_interface_points_lie_on_curve(circle20):
    ls = circle20.level_set
    for K in map(int, circle20.cut_elements[:10]):
        rule = quad_interface(circle20, K, 6)
        assert np.max(np.abs(ls.phi(rule.points))) < 1e-11
        n = interface_normal(ls, rule.points)
        assert np.allclose(np.linalg.norm(n, axis=1), 1.0, atol=1e-13)


def test_face_rule_positive_and_additive(circle20):
    mesh = circle20.mesh
    for e in range(len(mesh.faces)):
        acc = 0.0
        for side in circle20.face_sides(e):
            rule = quad_face(circle20, e, side, 4)
            assert np.all(rule.weights > 0)
            acc += rule.total
        assert abs(acc - mesh.h_e[e]) < 1e-12


def test_empty_region_raised(circle20):
    K = int(circle20.interior_elements(0)[0])
    with pytest.raises(EmptyRegion):
        quad_bulk(circle20, K, 1, 4)
    with pytest.raises(EmptyRegion):
        quad_interface(circle20, K, 4)


def test_edge_root_and_projection():
    ls = CircleLevelSet()
    root = edge_root(ls, np.array([0.0, 0.0]), np.array([1.0, 0.0]))
    assert np.allclose(root, [0.5, 0.0], atol=1e-12)
    pts = np.array([[0.3, 0.1], [0.9, -0.4], [-0.2, 0.6]])
    proj = project_to_interface(ls, pts)
    assert np.max(np.abs(ls.phi(proj))) < 1e-12


def test_star_classification_resolutions():
    # star tips need anchor-ring relaxation at n=20 and a tolerated dip
    # at n=80; both must classify without a hard violation
    for n in (20, 40, 80):
        cls = classify(generate_structured(DOMAIN, n), StarLevelSet())
        assert abs(_areas(cls, 0) + _areas(cls, 1) - 4.0) < 1e-10


def test_vertex_grazing_circle_is_perturbed():
    # r = 0.5 passes exactly through lattice points of the n=40 grid
    # (3-4-5 triples); classification must fall back to a shifted level set
    cls = classify(generate_structured(DOMAIN, 40), CircleLevelSet())
    assert abs(_areas(cls, 0) - np.pi / 4) < 1e-6


def test_make_level_set_names():
    assert isinstance(make_level_set("circle"), CircleLevelSet)
    assert isinstance(make_level_set("ellipse"), EllipseLevelSet)
    assert isinstance(make_level_set("star"), StarLevelSet)
    ls = CircleLevelSet()
    assert make_level_set(ls) is ls
    with pytest.raises(PatchDGError):
        make_level_set("hexagon")


def test_bulk_rule_polynomial_oracle():
    # integrate x^2 + y over the inside of the circle; closed form by
    # polar coordinates: int x^2 = pi r^4 / 4, int y = 0
    cls = classify(generate_structured(DOMAIN, 16), CircleLevelSet())
    acc = 0.0
    for K in range(cls.mesh.n_elements):
        if 0 in cls.element_sides(K):
            rule = quad_bulk(cls, K, 0, 6)
            acc += rule.weights @ (rule.points[:, 0] ** 2 + rule.points[:, 1])
    assert abs(acc - np.pi * 0.5 ** 4 / 4) < 1e-9
