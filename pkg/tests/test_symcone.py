import numpy as np
import pytest

from hilbertflow.domains import PsdCone, smat, svec
from hilbertflow.errors import BadIndex, NotPositiveDefinite, RankAmbiguous, WrongStratum
from hilbertflow.hilbert import chart_gap, distance, distances, flow
from hilbertflow.symcone import (StratumLabel, a_flow_check, a_matrix, action_on_vector,
                                 basepoint, endpoint_matrices, eigen_distance,
                                 footpoint_matrix, nonwandering_classify, numerical_rank,
                                 psd_tangent, rank_one_chord_search, reduce_to_basepoint,
                                 stratum, stratum_campaign, stratum_report, sym_from_json,
                                 sym_to_json)


def diag(*entries):
    return np.diag(np.asarray(entries, dtype=float))


def test_stratum_examples():
    assert stratum(3, psd_tangent(np.eye(3), diag(1, -1, 0))) == StratumLabel(2, 2)
    back, fwd = endpoint_matrices(3, psd_tangent(np.eye(3), diag(1, -1, 0)))
    assert np.allclose(back, diag(0, 2, 1) / 3) and np.allclose(fwd, diag(2, 0, 1) / 3)
    label = stratum(3, psd_tangent(np.eye(3), diag(2, -1, -1)))
    assert label.i + label.j >= 3
    assert label == StratumLabel(2, 1)


def test_kernels_are_orthogonal_on_the_boundary_stratum(rng):
    a = rng.normal(size=(3, 3)) + 2 * np.eye(3)
    v = action_on_vector(3, a, basepoint(3, 1))
    rep = stratum_report(3, v)
    assert rep.rank_sum_ok and rep.kernels_transverse and rep.kernels_orthogonal


@pytest.mark.parametrize("eps", [0.5, 1e-3, 1e-6])
def test_stratum_closure(eps):
    inside = stratum(3, psd_tangent(np.eye(3), diag(1, -1, -1 + eps)))
    limit = stratum(3, psd_tangent(np.eye(3), diag(1, -1, -1)))
    assert inside == StratumLabel(2, 2)
    assert limit.i <= inside.i and limit.j <= inside.j
    assert limit == StratumLabel(2, 1)


def test_rank_ambiguity_is_loud():
    with pytest.raises(RankAmbiguous):
        numerical_rank(diag(1, 1, 1e-9))
    assert numerical_rank(diag(1, 1, 1e-6)) == 3
    assert numerical_rank(diag(1, 1, 1e-13)) == 2


def test_stratum_campaign_small():
    for n in (3, 4):
        rep = stratum_campaign(n, 4000, seed=2)
        assert rep.violations == 0 and rep.ambiguous == 0
        labels = [tuple(map(int, key.split(","))) for key in rep.counts]
        assert all(i + j >= n for i, j in labels)
        assert any(i + j == n for i, j in labels)
        assert sum(rep.counts.values()) == 4000
        assert rep.rank_one_pairs == 0


def test_basepoint_examples():
    v = basepoint(3, 1)
    back, fwd = endpoint_matrices(3, v)
    assert np.allclose(back, diag(1, 0, 0)) and np.allclose(fwd, diag(0, 1, 1) / 2)
    assert np.allclose(footpoint_matrix(v), np.eye(3) / 3)
    assert stratum(3, basepoint(3, 2)) == StratumLabel(2, 1)
    assert stratum(3, v) == StratumLabel(1, 2)
    assert stratum(4, basepoint(4, 2)) == StratumLabel(2, 2)
    for bad in ((3, 0), (3, 3), (1, 1)):
        with pytest.raises(BadIndex):
            basepoint(*bad)


def test_a_flow_examples():
    assert np.allclose(a_matrix(3, 1, 0.0), np.eye(3))
    rep = a_flow_check(3, 1, [0.0, 1.0, -2.0])
    assert rep.passed
    cone = PsdCone(3)
    assert distance(cone, svec(np.eye(3)), svec(diag(np.e, 1 / np.e, 1 / np.e))) == pytest.approx(1.0, abs=1e-12)
    for n in range(2, 6):
        for i in range(1, n):
            assert a_flow_check(n, i, np.linspace(-5, 5, 11)).passed


def test_literal_diagonal_element_runs_the_flow_backwards():
    # congruence by diag(e^{t/2} I_i, e^{-t/2} I_{N-i}) pushes v_{i,N-i} toward its backward endpoint
    cone = PsdCone(3)
    v = basepoint(3, 1)
    t = 1.5
    literal = np.diag([np.exp(t / 2), np.exp(-t / 2), np.exp(-t / 2)])
    moved = action_on_vector(3, literal, v)
    assert chart_gap(cone, moved, flow(cone, v, -t)) < 1e-9
    assert chart_gap(cone, moved, flow(cone, v, t)) > 0.1
    assert np.allclose(a_matrix(3, 1, t), np.linalg.inv(literal))


def test_reduce_basepoint_is_trivial():
    red = reduce_to_basepoint(3, basepoint(3, 1))
    assert red.residual < 1e-12
    image = action_on_vector(3, red.g, basepoint(3, 1))
    assert chart_gap(PsdCone(3), image, basepoint(3, 1)) < 1e-10


@pytest.mark.parametrize("n,i", [(3, 1), (3, 2), (4, 1), (4, 2), (5, 3)])
def test_reduce_round_trip(n, i, rng):
    for _ in range(10):
        a = rng.normal(size=(n, n))
        v = action_on_vector(n, a, basepoint(n, i))
        red = reduce_to_basepoint(n, v)
        assert red.label == StratumLabel(i, n - i)
        assert red.residual < 1e-8


def test_reduce_rejects_wrong_stratum():
    with pytest.raises(WrongStratum):
        reduce_to_basepoint(3, psd_tangent(np.eye(3), diag(1, -1, 0)))


def test_eigen_distance_examples(rng):
    assert eigen_distance(3, np.eye(3), np.eye(3)) == 0.0
    assert eigen_distance(3, np.eye(3), diag(9, 3, 1)) == pytest.approx(np.log(3), abs=1e-14)
    with pytest.raises(NotPositiveDefinite):
        eigen_distance(3, np.eye(3), diag(1, 0, 1))
    for n in (3, 4, 5):
        cone = PsdCone(n)
        xs, ys = cone.sample_interior(rng, 200), cone.sample_interior(rng, 200)
        ref = [eigen_distance(n, smat(x), smat(y)) for x, y in zip(xs, ys)]
        assert np.max(np.abs(distances(cone, xs, ys) - ref)) < 1e-9


def test_nonwandering_examples(rng):
    nw = nonwandering_classify(3, basepoint(3, 1))
    assert nw.in_nw and nw.witness_residual < 1e-8
    assert nw.as_dict()["InNW"] is True and nw.as_dict()["stratum"] == [1, 2]
    out = nonwandering_classify(3, psd_tangent(np.eye(3), diag(1, -1, 0)))
    assert not out.in_nw and out.witness is None
    v = action_on_vector(4, rng.normal(size=(4, 4)), basepoint(4, 3))
    nw = nonwandering_classify(4, v)
    assert nw.in_nw and nw.witness_residual < 1e-8
    assert reduce_to_basepoint(4, v).residual < 1e-8


def test_no_chord_joins_two_rank_one_points():
    for n in (3, 4):
        rep = rank_one_chord_search(n, 5000, seed=3)
        assert rep.found == 0 and rep.min_other_rank >= n - 1


def test_spectral_congruence_diagonalizes(rng):
    for n in (3, 4, 5):
        a = rng.normal(size=(n, n))
        x = a @ a.T
        _, k = np.linalg.eigh(x)
        d = k.T @ x @ k
        assert np.max(np.abs(d - np.diag(np.diag(d)))) < 1e-10 * np.abs(x).max()


def test_sym_json_round_trip(rng):
    a = rng.normal(size=(4, 4))
    a = a + a.T
    vals = sym_to_json(a)
    assert len(vals) == 10 and vals[1] == a[0, 1]
    assert np.array_equal(sym_from_json(vals), a)
    with pytest.raises(ValueError):
        sym_from_json([1.0, 2.0], n=3)
