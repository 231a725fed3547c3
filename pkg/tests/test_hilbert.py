import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hilbertflow.domains import Ellipsoid, PsdCone, Simplex, named_domain, smat, svec
from hilbertflow.errors import NotInterior, ZeroDirection
from hilbertflow.hilbert import (TangentVector, ball_homothety_check, distance, distances,
                                 endpoints, flow, flow_many, tangent_at, tangent_distance,
                                 tangent_towards, transform_vector)
from hilbertflow.models import random_automorphism
from hilbertflow.projective import ProjPoint, angle_distance

DOMAINS = ["disk", "ball", "triangle", "tetrahedron", "square", "cube", "psd3"]


def test_distance_examples():
    disk = Ellipsoid(2)
    assert distance(disk, [0, 0], [0, 0]) == 0.0
    assert distance(disk, [0, 0], [0.5, 0]) == pytest.approx(0.5 * np.log(3), abs=1e-15)
    cone = PsdCone(3)
    assert distance(cone, svec(np.eye(3)), svec(np.diag([9.0, 3.0, 1.0]))) == pytest.approx(np.log(3), abs=1e-13)


def test_distance_rejects_exterior():
    with pytest.raises(NotInterior):
        distance(Ellipsoid(2), [0, 0], [1.0, 0])


def test_psd_distance_matches_eigenvalues(rng):
    for n in (3, 4, 5):
        cone = PsdCone(n)
        xs, ys = cone.sample_interior(rng, 100), cone.sample_interior(rng, 100)
        ref = []
        for x, y in zip(xs, ys):
            lam = np.linalg.eigvals(np.linalg.solve(smat(x), smat(y))).real
            ref.append(0.5 * np.log(lam.max() / lam.min()))
        assert np.allclose(distances(cone, xs, ys), ref, atol=1e-9)


def test_simplex_distance_is_hexagonal_norm(rng):
    tri = Simplex(2)
    xs, ys = tri.sample_interior(rng, 1000), tri.sample_interior(rng, 1000)
    logs = np.log(ys) - np.log(xs)
    ref = 0.5 * (logs.max(axis=1) - logs.min(axis=1))
    assert np.allclose(distances(tri, xs, ys), ref, atol=1e-9)


@pytest.mark.parametrize("name", DOMAINS)
def test_metric_axioms(name, rng):
    dom = named_domain(name)
    x, y, z = (dom.sample_interior(rng, 500) for _ in range(3))
    dxy, dyx = distances(dom, x, y), distances(dom, y, x)
    assert np.max(np.abs(dxy - dyx)) < 1e-10
    assert np.all(distances(dom, x, z) <= dxy + distances(dom, y, z) + 1e-9)
    assert np.all(distances(dom, x, x) == 0)


@pytest.mark.parametrize("name", ["disk", "ball", "triangle", "square", "psd3"])
def test_automorphism_invariance(name, rng):
    dom = named_domain(name)
    x, y = dom.sample_interior(rng, 200), dom.sample_interior(rng, 200)
    for _ in range(5):
        g = random_automorphism(dom, rng)
        assert np.allclose(distances(dom, x @ g.T, y @ g.T), distances(dom, x, y), atol=1e-9)


def test_disk_flow_is_tanh():
    disk = Ellipsoid(2)
    v = tangent_at(disk, [0, 0], [1, 0])
    assert flow(disk, v, 0) is v
    for t in (-2.0, 0.3, 1.5):
        assert disk.chart.to_chart(flow(disk, v, t).base) == pytest.approx([np.tanh(t), 0], abs=1e-14)


@pytest.mark.parametrize("name", DOMAINS)
def test_flow_unit_speed_and_additivity(name, rng):
    dom = named_domain(name)
    x = dom.sample_interior(rng, 1)[0]
    v = tangent_at(dom, x, rng.normal(size=dom.dim))
    for t in (0.1, 1.0, 5.0, -3.0):
        assert distance(dom, v.base, flow(dom, v, t).base) == pytest.approx(abs(t), abs=1e-9)
    for s, t in ((1.0, 2.0), (-4.0, 1.5), (3.0, -3.0)):
        a = dom.chart.to_chart(flow(dom, flow(dom, v, s), t).base)
        b = dom.chart.to_chart(flow(dom, v, s + t).base)
        assert np.linalg.norm(a - b) < 1e-9


def test_flow_many_matches_flow(rng):
    dom = named_domain("square")
    v = tangent_at(dom, [0.1, -0.2], [0.3, 1.0])
    times = np.linspace(-5, 5, 11)
    rows = flow_many(dom, v, times)
    for t, row in zip(times, rows):
        assert angle_distance(row, flow(dom, v, t).base) < 1e-12


def test_endpoint_examples():
    disk = Ellipsoid(2)
    a, b = endpoints(disk, tangent_at(disk, [0, 0], [1, 0]))
    assert a == ProjPoint([-1, 0, 1]) and b == ProjPoint([1, 0, 1])
    cone = PsdCone(3)
    d = cone.chart.basis.T @ svec(np.diag([1.0, -1.0, 0.0]))
    a, b = endpoints(cone, tangent_at(cone, svec(np.eye(3)), d))
    assert a == ProjPoint(svec(np.diag([0.0, 2.0, 1.0])))
    assert b == ProjPoint(svec(np.diag([2.0, 0.0, 1.0])))


def test_endpoints_invariant_under_flow(rng):
    dom = named_domain("psd3")
    v = tangent_at(dom, dom.sample_interior(rng, 1)[0], rng.normal(size=dom.dim))
    a, b = endpoints(dom, v)
    for t in (-3.0, 0.7, 4.0):
        a2, b2 = endpoints(dom, flow(dom, v, t))
        assert a == a2 and b == b2


def test_tangent_distance_examples(rng):
    disk = Ellipsoid(2)
    v = tangent_at(disk, [0.1, 0.2], [1, 1])
    assert tangent_distance(disk, v, v) == 0.0
    assert tangent_distance(disk, v, flow(disk, v, 0.3)) == pytest.approx(0.3, abs=1e-9)
    w = tangent_at(disk, [0.1, 0.2], rng.normal(size=2))
    coarse, fine = tangent_distance(disk, v, w, 64), tangent_distance(disk, v, w, 4096)
    assert coarse <= fine + 1e-15
    assert abs(fine - coarse) < 1e-6


def test_tangent_vector_validation():
    with pytest.raises(ZeroDirection):
        TangentVector(ProjPoint([0, 0, 1]), [0.0, 0.0])
    v = TangentVector(ProjPoint([0, 0, 1]), [3.0, 4.0])
    assert np.allclose(v.direction, [0.6, 0.8])
    assert np.allclose(v.reversed().direction, [-0.6, -0.8])


def test_tangent_towards_points_at_target():
    disk = Ellipsoid(2)
    v = tangent_towards(disk, [0, 0], [1, 0])
    assert endpoints(disk, v)[1] == ProjPoint([1, 0, 1])


def test_transform_vector_commutes_with_flow(rng):
    dom = named_domain("disk")
    g = random_automorphism(dom, rng)
    v = tangent_at(dom, [0.2, -0.1], [1, 2])
    gv = transform_vector(dom, g, v)
    for t in (-1.0, 2.0):
        lhs = flow(dom, gv, t).base
        rhs = g @ flow(dom, v, t).base.coords
        assert angle_distance(lhs, rhs) < 1e-10


def test_ball_homothety_examples():
    disk = ball_homothety_check(Ellipsoid(2), [0, 0], 1.0, samples=10_000)
    assert disk.violations == 0
    assert disk.ratio == pytest.approx(1 - np.exp(-2), abs=1e-15)
    tri = Simplex(2)
    rep = ball_homothety_check(tri, np.ones(3) / 3, 2.0, samples=10_000)
    assert rep.violations == 0
    tiny = ball_homothety_check(Ellipsoid(2), [0, 0], 1e-14, samples=100)
    assert tiny.ratio < 1e-13


@given(st.floats(-5, 5), st.floats(-5, 5))
def test_flow_group_law_on_square(s, t):
    dom = named_domain("square")
    v = tangent_at(dom, [0.3, 0.1], [1.0, -0.4])
    a = dom.chart.to_chart(flow(dom, flow(dom, v, s), t).base)
    b = dom.chart.to_chart(flow(dom, v, s + t).base)
    assert np.linalg.norm(a - b) < 1e-9
