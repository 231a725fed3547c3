import csv
import json

import numpy as np
import pytest

from hilbertflow.errors import BadConfig, UnknownSuite
from hilbertflow.suites import (MAX_RECORDED, SUITES, SuiteConfig, _Failures, klein_distance,
                                run_chunks, run_suite, worker_count)

SMALL = {
    "metric-axioms": 300,
    "crampon": 2000,
    "stable": 12,
    "sync": 4,
    "pingpong": 10,
    "length-spectrum": 1,
    "stratum": 2000,
    "basepoint": 2,
    "duality": 40,
    "cone-sum": 40,
    "ball-homothety": 500,
    "mixing-witness": 1,
    "fz": 50,
}


def test_every_suite_is_covered():
    assert set(SMALL) == set(SUITES)


@pytest.mark.parametrize("name", sorted(SMALL))
def test_suite_passes_at_small_size(name):
    params = {"L": 3} if name == "length-spectrum" else {}
    tol = 0.2 if name == "length-spectrum" else None
    rep = run_suite(name, SuiteConfig(seed=3, samples=SMALL[name], tol=tol, params=params))
    assert rep.passed, rep.failures[:3]
    out = rep.to_json()
    assert set(out) == {"suite", "seed", "samples", "tolerance", "failures", "failure_count", "summary"}
    json.dumps(out)
    assert "wall_time" in rep.to_json(timing=True)


def test_suite_errors():
    with pytest.raises(UnknownSuite):
        run_suite("no-such-suite")
    with pytest.raises(BadConfig):
        run_suite("fz", SuiteConfig(samples=0))
    with pytest.raises(BadConfig):
        run_suite("fz", SuiteConfig(tol=-1.0))
    with pytest.raises(BadConfig):
        run_suite("metric-axioms", SuiteConfig(samples=10, domain="/no/such/file.json"))


def test_results_do_not_depend_on_thread_count(monkeypatch):
    cfg = SuiteConfig(seed=11, samples=3000)
    monkeypatch.setenv("HD_THREADS", "1")
    one = run_suite("metric-axioms", cfg).to_json()
    crampon_one = run_suite("crampon", cfg).to_json()
    monkeypatch.setenv("HD_THREADS", "3")
    three = run_suite("metric-axioms", cfg).to_json()
    crampon_three = run_suite("crampon", cfg).to_json()
    assert json.dumps(one, sort_keys=True) == json.dumps(three, sort_keys=True)
    assert json.dumps(crampon_one, sort_keys=True) == json.dumps(crampon_three, sort_keys=True)


def test_same_seed_same_report():
    a = run_suite("stratum", SuiteConfig(seed=5, samples=1500, N=3)).to_json()
    b = run_suite("stratum", SuiteConfig(seed=5, samples=1500, N=3)).to_json()
    assert a == b


def test_worker_count_validation(monkeypatch):
    monkeypatch.setenv("HD_THREADS", "2")
    assert worker_count() == 2
    for bad in ("0", "-1", "many"):
        monkeypatch.setenv("HD_THREADS", bad)
        with pytest.raises(BadConfig):
            worker_count()


def test_run_chunks_is_order_stable(monkeypatch):
    def work(rng, n):
        return rng.random(n).sum()

    monkeypatch.setenv("HD_THREADS", "1")
    serial = run_chunks(7, 5000, work, chunk=512)
    monkeypatch.setenv("HD_THREADS", "4")
    parallel = run_chunks(7, 5000, work, chunk=512)
    assert serial == parallel and len(serial) == 10


def test_failure_list_is_capped():
    fails = _Failures()
    for k in range(MAX_RECORDED + 20):
        fails.add({"k": np.int64(k)}, np.float64(1.0), 0.0, 1e-9)
    assert len(fails.items) == MAX_RECORDED and fails.count == MAX_RECORDED + 20
    assert isinstance(fails.items[0]["inputs"]["k"], int)


def test_csv_output(tmp_path):
    rep = run_suite("fz", SuiteConfig(samples=20))
    path = tmp_path / "fz.csv"
    rep.write_csv(str(path))
    rows = list(csv.DictReader(path.open()))
    assert len(rows) == 20 and set(rows[0]) == {"a", "fz"}
    with pytest.raises(BadConfig):
        run_suite("ball-homothety", SuiteConfig(samples=10)).write_csv(str(tmp_path / "x.csv"))


def test_klein_distance_closed_form():
    assert klein_distance(np.array([[0.0, 0.0]]), np.array([[0.5, 0.0]]))[0] == pytest.approx(np.arctanh(0.5))
