"""End-to-end acceptance criteria, one test per criterion.

Each test records a PASS/FAIL line (shown in the terminal summary) before
asserting, so a failing criterion is reported rather than hidden.
Run just these with ``pytest -m acceptance -s``.
"""

import time

import numpy as np
import pytest

from hilbertflow.domains import Ellipsoid, PsdCone, named_domain, smat
from hilbertflow.dynamics import (axis_meets_domain, rank_one_check, translation_length,
                                  translation_length_geometric)
from hilbertflow.errors import CrosscheckMismatch, DisagreementDetected
from hilbertflow.hilbert import chart_gap, distance, distances, flow, tangent_at
from hilbertflow.models import automorphism_matrix, schottky_pair
from hilbertflow.schottky import GeneratorFamily, pingpong_certify
from hilbertflow.stable import mixing_witness
from hilbertflow.suites import SuiteConfig, klein_distance, run_suite
from hilbertflow.symcone import eigen_distance

pytestmark = pytest.mark.acceptance


def test_criterion_01_hilbert_metric(record_criterion):
    start = time.perf_counter()
    rng = np.random.default_rng(1)
    disk = Ellipsoid(2)
    x, y = disk.sample_interior(rng, 10_000), disk.sample_interior(rng, 10_000)
    cx, cy = disk.chart.to_chart(x), disk.chart.to_chart(y)
    klein_err = float(np.max(np.abs(distances(disk, x, y) - klein_distance(cx, cy))))
    psd_err = 0.0
    for n in (3, 4, 5):
        cone = PsdCone(n)
        xs, ys = cone.sample_interior(rng, 1000), cone.sample_interior(rng, 1000)
        chord = distances(cone, xs, ys)
        eig = np.array([eigen_distance(n, smat(a), smat(b)) for a, b in zip(xs, ys)])
        psd_err = max(psd_err, float(np.max(np.abs(chord - eig))))
    elapsed = time.perf_counter() - start
    passed = klein_err < 1e-9 and psd_err < 1e-9 and elapsed < 10
    record_criterion(1, "hilbert metric vs Klein and eigenvalue formulas", passed,
                     f"klein {klein_err:.1e}, psd {psd_err:.1e}, {elapsed:.1f}s")
    assert passed


def test_criterion_02_metric_axioms(record_criterion):
    worst = {}
    failures = 0
    for name in ("disk", "ball", "triangle", "square", "psd3"):
        rep = run_suite("metric-axioms", SuiteConfig(seed=2, samples=10_000, domain=name))
        failures += rep.failure_count
        for key, val in rep.summary["max_deviation"].items():
            worst[key] = max(worst.get(key, 0.0), val)
    passed = failures == 0
    detail = ", ".join(f"{k} {v:.1e}" for k, v in sorted(worst.items()))
    record_criterion(2, "metric axioms and automorphism invariance", passed, detail)
    assert passed


def test_criterion_03_flow_contract(record_criterion):
    rng = np.random.default_rng(3)
    grid = np.linspace(-5.0, 5.0, 11)
    speed, group = 0.0, 0.0
    for name in ("disk", "ball", "triangle", "square", "psd3"):
        dom = named_domain(name)
        for _ in range(4):
            x = dom.chart.to_chart(dom.sample_interior(rng, 1)[0])
            v = tangent_at(dom, x, rng.standard_normal(dom.dim))
            for t in grid:
                moved = flow(dom, v, t)
                speed = max(speed, abs(distance(dom, v.base, moved.base) - abs(t)))
                for s in grid[::2]:
                    group = max(group, chart_gap(dom, flow(dom, moved, s), flow(dom, v, s + t)))
    passed = speed < 1e-9 and group < 1e-9
    record_criterion(3, "flow has unit speed and is a one-parameter group", passed,
                     f"speed {speed:.1e}, composition {group:.1e}")
    assert passed


def test_criterion_04_geometric_translation_length(record_criterion):
    start = time.perf_counter()
    worst, checked = 0.0, 0
    for case in automorphism_matrix():
        if not axis_meets_domain(case.domain, case.g).meets:
            continue
        checked += 1
        err = abs(translation_length_geometric(case.domain, case.g) - translation_length(case.g))
        worst = max(worst, err)
    elapsed = time.perf_counter() - start
    passed = worst <= 1e-4 and elapsed < 30
    record_criterion(4, "inf d(x, gx) matches the eigenvalue translation length", passed,
                     f"{checked} cases, max error {worst:.1e}, {elapsed:.1f}s")
    assert passed


def test_criterion_05_rank_one_crosschecks(record_criterion):
    cases = automorphism_matrix()
    domains = {type(c.domain).__name__ + str(c.domain.dim) for c in cases}
    events, wrong = [], []
    for case in cases:
        try:
            axis_meets_domain(case.domain, case.g)
            if rank_one_check(case.domain, case.g).verdict != case.rank_one:
                wrong.append(case.name)
        except (CrosscheckMismatch, DisagreementDetected) as exc:
            events.append(f"{case.name}: {exc}")
    passed = not events and not wrong and len(cases) >= 50 and len(domains) >= 5
    record_criterion(5, "axis/smoothness and rank-one conditions agree", passed,
                     f"{len(cases)} cases, {len(domains)} domains, {len(events)} events")
    assert passed, events + wrong


def test_criterion_06_crampon_campaign(record_criterion):
    start = time.perf_counter()
    rep = run_suite("crampon", SuiteConfig(seed=6, samples=100_000))
    fz = run_suite("fz", SuiteConfig(seed=6))
    elapsed = time.perf_counter() - start
    passed = rep.passed and fz.passed and elapsed < 60
    record_criterion(6, "crampon inequality and f_z monotonicity", passed,
                     f"{rep.failure_count} violations, {elapsed:.1f}s")
    assert passed


def test_criterion_07_stable_manifolds(record_criterion):
    stable = run_suite("stable", SuiteConfig(seed=7, samples=1000))
    sync = run_suite("sync", SuiteConfig(seed=7))
    checked = sum(d["delta_checked"] for d in stable.summary["domains"].values())
    delta_err = max(d["max_delta_error"] for d in stable.summary["domains"].values())
    passed = stable.passed and sync.passed and checked > 0
    record_criterion(7, "stable-manifold monotonicity, synchronization and limit distance", passed,
                     f"delta checked {checked} (max error {delta_err:.1e}), "
                     f"sync error {sync.summary['max_error']:.1e}")
    assert passed


def test_criterion_08_pingpong(record_criterion):
    rep = run_suite("pingpong", SuiteConfig(seed=8, samples=100))
    s = rep.summary
    passed = rep.passed and s["N"] <= 32 and s["spot_checked"] >= 100
    record_criterion(8, "ping-pong certification of the disk pair", passed,
                     f"N = {s['N']}, {s['spot_checked']} spot checks, "
                     f"min identity distance {s['min_identity_distance']:.2f}")
    assert passed


def test_criterion_09_length_spectrum_gap(record_criterion):
    rep = run_suite("length-spectrum", SuiteConfig(seed=9, params={"L": 5, "B": 50}))
    gaps = rep.summary["gaps"]
    passed = rep.passed and gaps[-1] < 0.05 and all(b <= a for a, b in zip(gaps, gaps[1:]))
    record_criterion(9, "length-spectrum group gap shrinks below 0.05", passed,
                     "gaps " + ", ".join(f"{g:.3f}" for g in gaps))
    assert passed


def test_criterion_10_psd_strata(record_criterion):
    start = time.perf_counter()
    strata = run_suite("stratum", SuiteConfig(seed=10, samples=100_000))
    base = run_suite("basepoint", SuiteConfig(seed=10))
    elapsed = time.perf_counter() - start
    found = sum(v["rank_one_pairs_found"] for v in strata.summary["N"].values())
    passed = strata.passed and base.passed and found == 0 and elapsed < 120
    record_criterion(10, "psd strata, base-vector reduction and a_t flow", passed,
                     f"round trip {base.summary['max_residual']['round_trip']:.1e}, "
                     f"rank-one chords {found}, {elapsed:.1f}s")
    assert passed


def test_criterion_11_mixing_witness(record_criterion):
    cert = pingpong_certify(GeneratorFamily.from_matrices(schottky_pair()))
    rep = mixing_witness(Ellipsoid(2), cert, 0, 1, eps=0.05, n_max=40)
    passed = rep.first_ok and rep.second_ok and rep.density_ok
    record_criterion(11, "mixing witness on the certified disk pair", passed,
                     f"N0 = {rep.n0_first}, {rep.n0_second}; window gap {rep.window_gap:.3f}")
    assert passed
