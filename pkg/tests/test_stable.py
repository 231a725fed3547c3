import numpy as np
import pytest

from hilbertflow.domains import Ellipsoid, PsdCone, Simplex, named_domain, unit_square
from hilbertflow.errors import (EndpointsDiffer, NotSmoothEndpoint, PreconditionAxisMeetsDomain,
                                PreconditionViolated)
from hilbertflow.hilbert import distance, flow, tangent_at, tangent_distance, tangent_towards
from hilbertflow.models import random_rotation, schottky_pair
from hilbertflow.schottky import GeneratorFamily, extend_family, group_gap, pingpong_certify
from hilbertflow.stable import (brute_force_sync, crampon_campaign, crampon_check, fz,
                                fz_by_cross_ratio, interval_fz_check, late_distance,
                                mixing_witness, monotonicity_check, stable_limit_delta, sync_time)

XI = np.array([1.0, 0.0])
E1 = np.array([1.0, 0.0, 0.0])


@pytest.fixture(scope="module")
def cert():
    return pingpong_certify(GeneratorFamily.from_matrices(schottky_pair()))


def hexagonal_delta(x, y, vertex: int):
    """Limit distance of two rays into a simplex vertex, from log coordinates."""
    x, y = np.asarray(x, float), np.asarray(y, float)
    diff = np.log(y / y[vertex]) - np.log(x / x[vertex])
    return 0.5 * (diff.max() - diff.min())


def test_monotone_along_one_chord():
    disk = Ellipsoid(2)
    v = tangent_at(disk, [0.1, 0.1], [1, 0.3])
    rep = monotonicity_check(disk, v, flow(disk, v, 0.4))
    assert rep.passed
    assert np.allclose(rep.values, 0.4, atol=1e-9)


def test_disk_rays_on_one_horocycle_converge():
    disk = Ellipsoid(2)
    v = tangent_towards(disk, [0.0, 0.0], XI)
    w = tangent_towards(disk, [0.0, 0.6], XI)
    w = flow(disk, w, sync_time(disk, v, w).t0)
    rep = monotonicity_check(disk, v, w, T=10.0)
    assert rep.passed
    assert np.all(np.diff(rep.values) < 0)
    assert rep.values[-1] < 1e-3


def test_triangle_vertex_rays_decrease_to_positive_limit():
    tri = Simplex(2)
    x, y = [0.2, 0.5, 0.3], [0.3, 0.2, 0.5]
    v, w = tangent_towards(tri, x, E1), tangent_towards(tri, y, E1)
    rep = monotonicity_check(tri, v, w, T=10.0)
    assert rep.passed
    assert rep.values[-1] == pytest.approx(hexagonal_delta(x, y, 0), abs=1e-6)
    assert rep.values[-1] > 0.1


def test_monotonicity_needs_shared_endpoint():
    disk = Ellipsoid(2)
    with pytest.raises(EndpointsDiffer):
        monotonicity_check(disk, tangent_at(disk, [0, 0], [1, 0]), tangent_at(disk, [0, 0], [0, 1]))


def test_delta_vanishes_on_disk():
    # at a smooth point the hypothesis only holds for synchronized rays
    disk = Ellipsoid(2)
    v = tangent_towards(disk, [0.0, 0.0], XI)
    w = tangent_towards(disk, [0.0, 0.5], XI)
    with pytest.raises(PreconditionAxisMeetsDomain):
        stable_limit_delta(disk, v, w)
    w = flow(disk, w, sync_time(disk, v, w).t0)
    assert stable_limit_delta(disk, v, w).delta == 0.0


@pytest.mark.parametrize("x, y", [([0.27, 0.67, 0.06], [0.66, 0.14, 0.2]),
                                  ([0.31, 0.63, 0.06], [0.34, 0.05, 0.61]),
                                  ([0.26, 0.2, 0.54], [0.25, 0.57, 0.18])])
def test_delta_at_triangle_vertex(x, y):
    tri = Simplex(2)
    v, w = tangent_towards(tri, x, E1), tangent_towards(tri, y, E1)
    rep = stable_limit_delta(tri, v, w)
    assert rep.delta == pytest.approx(hexagonal_delta(x, y, 0), abs=1e-8)
    assert late_distance(tri, v, w, t=25.0) == pytest.approx(rep.delta, abs=1e-4)


def test_delta_at_square_vertex():
    sq = unit_square()
    corner = [1.0, 1.0]
    v, w = tangent_towards(sq, [-0.5, 0.2], corner), tangent_towards(sq, [0.3, -0.6], corner)
    rep = stable_limit_delta(sq, v, w)
    assert rep.delta > 0
    assert late_distance(sq, v, w, t=25.0) == pytest.approx(rep.delta, abs=1e-3)


def test_delta_rejects_same_chord():
    disk = Ellipsoid(2)
    v = tangent_towards(disk, [0.0, 0.0], XI)
    with pytest.raises(PreconditionViolated):
        stable_limit_delta(disk, v, flow(disk, v, 0.5))


def test_sync_time_same_chord():
    disk = Ellipsoid(2)
    v = tangent_at(disk, [0.1, -0.2], [1, 1])
    assert sync_time(disk, v, flow(disk, v, 0.7)).t0 == pytest.approx(-0.7, abs=1e-10)


def test_sync_time_mirror_symmetry():
    disk = Ellipsoid(2)
    v = tangent_towards(disk, [0.0, 0.3], XI)
    w = tangent_towards(disk, [0.0, -0.3], XI)
    assert sync_time(disk, v, w).t0 == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("y", [[0.0, 0.5], [-0.4, 0.3], [0.5, -0.5]])
def test_sync_time_matches_brute_force(y):
    disk = Ellipsoid(2)
    v = tangent_towards(disk, [0.0, 0.0], XI)
    w = tangent_towards(disk, y, XI)
    res = sync_time(disk, v, w)
    assert res.t0 == pytest.approx(brute_force_sync(disk, v, w), abs=1e-3)
    assert res.late_distance < 1e-4


def test_sync_time_matches_horocycle_formula():
    # in the Klein disk the horocycle coordinate at xi = (1, 0) is log((1 - x) / (1 - |p|^2))
    disk = Ellipsoid(2)
    x, y = np.array([0.0, 0.0]), np.array([-0.4, 0.3])

    def busemann(p):
        return 0.5 * np.log((1 - p[0]) ** 2 / (1 - p @ p))

    v, w = tangent_towards(disk, x, XI), tangent_towards(disk, y, XI)
    assert sync_time(disk, v, w).t0 == pytest.approx(busemann(y) - busemann(x), abs=1e-9)


def test_sync_time_needs_smooth_endpoint():
    tri = Simplex(2)
    v = tangent_towards(tri, [0.2, 0.5, 0.3], E1)
    w = tangent_towards(tri, [0.3, 0.2, 0.5], E1)
    with pytest.raises(NotSmoothEndpoint):
        sync_time(tri, v, w)


def test_crampon_examples(rng):
    disk = Ellipsoid(2)
    v = tangent_at(disk, [0.1, 0.2], [1, 0])
    same = crampon_check(disk, (v, 1.0), (v, 1.0), 0.5, 1.0)
    assert same.violations == 0 and same.max_excess <= 0
    w = tangent_at(disk, [0.1, 0.2], [0, 1])
    rep = crampon_check(disk, (v, 1.0), (w, 1.0), 0.7, 2.0)
    shared = distance(disk, flow(disk, v, 0.7).base, flow(disk, w, 0.7).base)
    assert shared <= distance(disk, flow(disk, v, 2.0).base, flow(disk, w, 2.0).base)
    assert rep.violations == 0


@pytest.mark.parametrize("name", ["disk", "triangle", "square", "psd3"])
def test_crampon_campaign(name):
    rep = crampon_campaign(named_domain(name), 5000, seed=1)
    assert rep.violations == 0 and not rep.witnesses


def test_crampon_check_agrees_with_campaign_kernel():
    dom = named_domain("square")
    v1 = tangent_at(dom, [0.2, -0.3], [1, 0.2])
    v2 = tangent_at(dom, [-0.4, 0.1], [-0.3, 1])
    rep = crampon_check(dom, (v1, 1.3), (v2, 0.4), 0.8, 2.5)
    lhs = distance(dom, flow(dom, v1, 1.3 * 0.8).base, flow(dom, v2, 0.4 * 0.8).base)
    rhs = distance(dom, v1.base, v2.base) + distance(dom, flow(dom, v1, 1.3 * 2.5).base,
                                                        flow(dom, v2, 0.4 * 2.5).base)
    assert rep.max_excess == pytest.approx(lhs - rhs, abs=1e-12)


def test_fz_examples():
    rep = interval_fz_check([-10, -5, -2, -1, -0.5], 2.0)
    assert rep.monotone and rep.max_formula_gap < 1e-10
    assert np.allclose(fz(np.array([-5.0, -0.1]), 1.0 + 1e-12), 1.0, atol=1e-9)
    assert fz_by_cross_ratio(-3.0, 4.0) == pytest.approx(float(fz(-3.0, 4.0)), abs=1e-12)


def test_mixing_witness_on_disk_pair(cert):
    rep = mixing_witness(Ellipsoid(2), cert, 0, 1, eps=0.05)
    assert rep.passed
    assert rep.n0_first <= 40 and rep.n0_second <= 40
    assert rep.isometry_gap < 1e-6


def test_mixing_witness_same_generator(cert):
    rep = mixing_witness(Ellipsoid(2), cert, 0, 0, eps=0.05)
    assert rep.first_ok and rep.second_ok


def test_mixing_witness_reports_density_failure(cert):
    probe = mixing_witness(Ellipsoid(2), cert, 0, 1, eps=0.05)
    eps = 0.5 * group_gap([probe.tau1, probe.tau2], bound=50)
    rep = mixing_witness(Ellipsoid(2), cert, 0, 1, eps=eps, max_terms=64)
    assert not rep.density_ok and not rep.passed
    assert rep.window_gap > eps


def test_mixing_witness_needs_smooth_endpoints(cert):
    with pytest.raises(PreconditionViolated):
        mixing_witness(PsdCone(3), cert, 0, 1)
    vertex_cert = pingpong_certify(extend_family(np.diag([4.0, 2.0, 1.0]),
                                                 lambda rng: random_rotation(rng, 3)),
                                   radii=0.05)
    with pytest.raises(PreconditionViolated):
        mixing_witness(Simplex(2), vertex_cert, 0, 1)


def test_tangent_distance_along_synchronized_pair_is_small():
    disk = Ellipsoid(2)
    v = tangent_towards(disk, [0.0, 0.0], XI)
    w = tangent_towards(disk, [0.2, 0.4], XI)
    t0 = sync_time(disk, v, w).t0
    late = tangent_distance(disk, flow(disk, v, 12.0), flow(disk, w, 12.0 + t0))
    assert late < 1e-4
