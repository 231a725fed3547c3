"""Verification campaigns behind ``hilbertflow verify``.

Every suite draws its samples in fixed-size chunks, each seeded by its own
child of ``SeedSequence(seed)``.  Chunks may run on a thread pool capped by
the HD_THREADS environment variable; since the chunking does not depend on
the number of workers, reports are identical for any worker count.
"""

from __future__ import annotations

import csv
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .domains import (
    ConeSum,
    ConvexDomain,
    Ellipsoid,
    Location,
    PolyhedralDomain,
    Simplex,
    boundary_flags,
    cone_sum,
    contains,
    dual,
    named_domain,
    load_domain,
)
from .errors import (
    BadConfig,
    HilbertFlowError,
    PreconditionAxisMeetsDomain,
    UnknownSuite,
)
from .hilbert import (
    ball_homothety_check,
    distances,
    random_directions,
    tangent_towards,
)
from .models import random_automorphism, schottky_pair
from .projective import ProjPoint
from .schottky import GeneratorFamily, group_gap, pingpong_certify, semigroup_length_spectrum
from .stable import (
    brute_force_sync,
    crampon_campaign,
    interval_fz_check,
    late_distance,
    mixing_witness,
    monotonicity_check,
    stable_limit_delta,
    sync_time,
)
from .symcone import (
    a_flow_check,
    action_on_vector,
    basepoint,
    nonwandering_classify,
    rank_one_chord_search,
    reduce_to_basepoint,
    stratum_campaign,
)

CHUNK = 1024
MAX_RECORDED = 100


@dataclass
class SuiteConfig:
    seed: int = 0
    samples: int | None = None
    domain: ConvexDomain | str | None = None
    tol: float | None = None
    N: int | None = None
    params: dict = field(default_factory=dict)


@dataclass
class SuiteReport:
    suite: str
    seed: int
    samples: int
    tolerance: float
    failures: list
    failure_count: int
    summary: dict
    wall_time: float
    rows: list = field(default_factory=list, repr=False)

    @property
    def passed(self) -> bool:
        return self.failure_count == 0

    def to_json(self, timing: bool = False) -> dict:
        out = {
            "suite": self.suite,
            "seed": self.seed,
            "samples": self.samples,
            "tolerance": self.tolerance,
            "failures": self.failures,
            "failure_count": self.failure_count,
            "summary": self.summary,
        }
        if timing:
            out["wall_time"] = self.wall_time
        return out

    def write_csv(self, path: str):
        if not self.rows:
            raise BadConfig(f"suite {self.suite} records no raw samples")
        keys = list(self.rows[0])
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.DictWriter(fh, fieldnames=keys)
            writer.writeheader()
            writer.writerows(self.rows)


class _Failures:
    def __init__(self):
        self.items: list = []
        self.count = 0

    def add(self, inputs, observed, expected, tolerance):
        self.count += 1
        if len(self.items) < MAX_RECORDED:
            self.items.append({"inputs": _plain(inputs), "observed": _plain(observed),
                               "expected": _plain(expected), "tolerance": tolerance})

    def merge(self, other: "_Failures"):
        for item in other.items:
            if len(self.items) < MAX_RECORDED:
                self.items.append(item)
        self.count += other.count


def _plain(obj):
    """JSON-safe copy of nested numpy values."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def worker_count() -> int:
    raw = os.environ.get("HD_THREADS")
    if raw is None:
        return os.cpu_count() or 1
    try:
        n = int(raw)
    except ValueError:
        raise BadConfig(f"HD_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise BadConfig(f"HD_THREADS must be a positive integer, got {raw!r}")
    return n


def run_chunks(seed, samples: int, work: Callable, chunk: int = CHUNK) -> list:
    """work(rng, n) over fixed chunks; results in chunk order."""
    n_chunks = max(1, math.ceil(samples / chunk))
    seqs = np.random.SeedSequence(seed).spawn(n_chunks)
    sizes = [min(chunk, samples - k * chunk) for k in range(n_chunks)]
    jobs = [(np.random.default_rng(s), n) for s, n in zip(seqs, sizes)]
    workers = min(worker_count(), n_chunks)
    if workers == 1:
        return [work(rng, n) for rng, n in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda job: work(*job), jobs))


def _resolve_domain(domain, default: str | None = None) -> ConvexDomain | None:
    if domain is None:
        return named_domain(default) if default else None
    if isinstance(domain, ConvexDomain):
        return domain
    try:
        return named_domain(domain)
    except HilbertFlowError:
        pass
    try:
        return load_domain(domain)
    except (OSError, ValueError) as exc:
        raise BadConfig(f"cannot read domain {domain!r}: {exc}") from None


def _domain_label(domain: ConvexDomain) -> dict:
    try:
        return domain.to_json()
    except HilbertFlowError:
        return {"repr": repr(domain)}


def _boundary_points(domain: ConvexDomain, rng, n: int) -> np.ndarray:
    """Forward chord endpoints of random interior points and directions (normalized lifts)."""
    x = domain.chart.normalize(domain.sample_interior(rng, n))
    u = domain.chart.direction(random_directions(rng, n, domain.dim))
    _, hi = domain.intervals(x, u)
    hi = np.where(np.isfinite(hi), hi, 0.0)
    return x + hi[:, None] * u


# ----------------------------------------------------------------------------
# suites


def _metric_axioms(cfg: SuiteConfig, samples: int, tol: float):
    dom = _resolve_domain(cfg.domain, "disk")
    klein = isinstance(dom, Ellipsoid) and dom.dim == 2

    def work(rng, n):
        fails = _Failures()
        x, y, z = (dom.chart.normalize(dom.sample_interior(rng, n)) for _ in range(3))
        dxy, dyx = distances(dom, x, y), distances(dom, y, x)
        dyz, dxz = distances(dom, y, z), distances(dom, x, z)
        worst = {"symmetry": 0.0, "triangle": 0.0, "invariance": 0.0, "klein": 0.0}
        sym = np.abs(dxy - dyx)
        tri = dxz - (dxy + dyz)
        worst["symmetry"] = float(sym.max())
        worst["triangle"] = float(max(tri.max(), 0.0))
        for k in np.flatnonzero(sym > tol):
            fails.add({"check": "symmetry", "x": x[k], "y": y[k]}, dyx[k], dxy[k], tol)
        for k in np.flatnonzero(tri > tol):
            fails.add({"check": "triangle", "x": x[k], "y": y[k], "z": z[k]},
                      dxz[k], dxy[k] + dyz[k], tol)
        g = random_automorphism(dom, rng)
        if g is not None:
            gx, gy = dom.orient(x @ g.T), dom.orient(y @ g.T)
            inv = np.abs(distances(dom, gx, gy) - dxy)
            worst["invariance"] = float(inv.max())
            for k in np.flatnonzero(inv > tol):
                fails.add({"check": "invariance", "x": x[k], "y": y[k], "g": g},
                          dxy[k] + inv[k], dxy[k], tol)
        if klein:
            cx, cy = dom.chart.to_chart(x), dom.chart.to_chart(y)
            kl = klein_distance(cx, cy)
            err = np.abs(kl - dxy)
            worst["klein"] = float(err.max())
            for k in np.flatnonzero(err > tol):
                fails.add({"check": "klein", "x": cx[k], "y": cy[k]}, dxy[k], kl[k], tol)
        return fails, worst

    results = run_chunks(cfg.seed, samples, work)
    fails = _Failures()
    worst: dict = {}
    for f, w in results:
        fails.merge(f)
        for key, val in w.items():
            worst[key] = max(worst.get(key, 0.0), val)
    summary = {"domain": _domain_label(dom), "max_deviation": worst,
               "invariance_checked": random_automorphism(dom, np.random.default_rng(0)) is not None,
               "klein_checked": klein}
    return fails, summary, []


def klein_distance(x, y) -> np.ndarray:
    """Hyperbolic distance of the Klein disk, via artanh of the Minkowski angle."""
    x, y = np.atleast_2d(x), np.atleast_2d(y)
    c = 1.0 - np.sum(x * y, axis=1)
    # cosh d = c / sqrt((1 - |x|^2)(1 - |y|^2)), so tanh d = sqrt(c^2 - (1 - |x|^2)(1 - |y|^2)) / c
    diff = x - y
    cross = x[:, 0] * y[:, 1] - x[:, 1] * y[:, 0]
    num = np.sum(diff * diff, axis=1) - cross ** 2     # the same numerator, without cancellation
    return np.arctanh(np.sqrt(np.maximum(num, 0.0)) / c)


CRAMPON_DOMAINS = ("disk", "triangle", "square", "psd3")


def _crampon(cfg: SuiteConfig, samples: int, tol: float):
    if cfg.domain is not None:
        doms = [(_domain_label(_resolve_domain(cfg.domain)), _resolve_domain(cfg.domain))]
    else:
        doms = [(name, named_domain(name)) for name in CRAMPON_DOMAINS]
    share = [samples // len(doms) + (k < samples % len(doms)) for k in range(len(doms))]
    fails = _Failures()
    per = {}
    rows = []
    for k, ((label, dom), n) in enumerate(zip(doms, share)):
        if n == 0:
            continue
        reports = run_chunks([cfg.seed, k], n,
                             lambda rng, m, dom=dom: crampon_campaign(dom, m, seed=rng, tol=tol))
        count = sum(r.violations for r in reports)
        excess = max(r.max_excess for r in reports)
        for r in reports:
            for wit in r.witnesses:
                fails.add({"domain": label, **wit}, wit["excess"], "<= 0", tol)
            fails.count += r.violations - len(r.witnesses)
        key = label if isinstance(label, str) else repr(dom)
        per[key] = {"samples": n, "violations": count, "max_excess": excess}
        rows.append({"domain": key, "samples": n, "violations": count, "max_excess": excess})
    return fails, {"domains": per}, rows


def _shared_endpoint_pair(dom: ConvexDomain, rng, vertex: bool):
    x, y = dom.chart.to_chart(dom.chart.normalize(dom.sample_interior(rng, 2)))
    if vertex:
        verts = dom.vertices()
        xi = verts[int(rng.integers(len(verts)))]
    else:
        xi = dom.chart.to_chart(_boundary_points(dom, rng, 1)[0])
    return tangent_towards(dom, x, xi), tangent_towards(dom, y, xi), xi


def _stable(cfg: SuiteConfig, samples: int, tol: float):
    delta_tol = float(cfg.params.get("delta_tol", 1e-3))
    late_t = float(cfg.params.get("t", 25.0))
    if cfg.domain is not None:
        doms = [_resolve_domain(cfg.domain)]
    else:
        doms = [named_domain(n) for n in ("disk", "triangle", "square")]
    fails = _Failures()
    per = {}
    for k, dom in enumerate(doms):
        polygon = isinstance(dom, PolyhedralDomain) and dom.dim == 2

        def work(rng, n, dom=dom, polygon=polygon):
            f = _Failures()
            stats = {"max_increase": -np.inf, "delta_checked": 0, "delta_refused": 0,
                     "max_delta_error": 0.0}
            for s in range(n):
                vertex = polygon and s % 2 == 1
                v, w, xi = _shared_endpoint_pair(dom, rng, vertex)
                rep = monotonicity_check(dom, v, w, tol=tol)
                stats["max_increase"] = max(stats["max_increase"], rep.max_increase)
                if not rep.passed:
                    f.add({"check": "monotone", "xi": xi, "x": v.base.coords, "y": w.base.coords},
                          rep.max_increase, "<= 0", tol)
                if vertex:
                    try:
                        delta = stable_limit_delta(dom, v, w).delta
                    except PreconditionAxisMeetsDomain:
                        stats["delta_refused"] += 1
                        continue
                    late = late_distance(dom, v, w, late_t)
                    err = abs(late - delta)
                    stats["delta_checked"] += 1
                    stats["max_delta_error"] = max(stats["max_delta_error"], err)
                    if err > delta_tol:
                        f.add({"check": "delta", "xi": xi, "x": v.base.coords,
                               "y": w.base.coords}, late, delta, delta_tol)
            return f, stats

        results = run_chunks([cfg.seed, k], samples, work, chunk=128)
        agg = {"samples": samples, "max_increase": -np.inf, "delta_checked": 0,
               "delta_refused": 0, "max_delta_error": 0.0}
        for f, st in results:
            fails.merge(f)
            agg["max_increase"] = max(agg["max_increase"], st["max_increase"])
            agg["max_delta_error"] = max(agg["max_delta_error"], st["max_delta_error"])
            agg["delta_checked"] += st["delta_checked"]
            agg["delta_refused"] += st["delta_refused"]
        per[repr(dom)] = agg
    return fails, {"domains": per, "delta_tolerance": delta_tol}, []


def _sync(cfg: SuiteConfig, samples: int, tol: float):
    dom = _resolve_domain(cfg.domain, "disk")
    t_check = float(cfg.params.get("t", 20.0))

    def work(rng, n):
        f = _Failures()
        stats = {"checked": 0, "out_of_window": 0, "max_error": 0.0, "max_late": 0.0}
        while stats["checked"] + stats["out_of_window"] < n:
            v, w, xi = _shared_endpoint_pair(dom, rng, False)
            if not boundary_flags(dom, xi).smooth:
                continue
            res = sync_time(dom, v, w)
            if abs(res.t0) > 4.5:
                stats["out_of_window"] += 1
                continue
            bf = brute_force_sync(dom, v, w, t=t_check)
            err = abs(bf - res.t0)
            stats["checked"] += 1
            stats["max_error"] = max(stats["max_error"], err)
            stats["max_late"] = max(stats["max_late"], res.late_distance)
            if err > tol or res.late_distance > 1e-4:
                f.add({"xi": xi, "x": v.base.coords, "y": w.base.coords},
                      {"t0": res.t0, "late_distance": res.late_distance}, bf, tol)
        return f, stats

    results = run_chunks(cfg.seed, samples, work, chunk=64)
    fails = _Failures()
    agg = {"checked": 0, "out_of_window": 0, "max_error": 0.0, "max_late": 0.0}
    for f, st in results:
        fails.merge(f)
        for key in ("checked", "out_of_window"):
            agg[key] += st[key]
        for key in ("max_error", "max_late"):
            agg[key] = max(agg[key], st[key])
    return fails, {"domain": _domain_label(dom), "brute_force_time": t_check, **agg}, []


def _default_certificate(cfg: SuiteConfig, spot_checks: int = 100):
    fam = GeneratorFamily.from_matrices(schottky_pair())
    return pingpong_certify(fam, seed=cfg.seed, n_max=int(cfg.params.get("n_max", 32)),
                            spot_checks=spot_checks)


def _pingpong(cfg: SuiteConfig, samples: int, tol: float):
    cert = _default_certificate(cfg, spot_checks=samples)
    fails = _Failures()
    if not cert.certified:
        fails.add({"N": cert.N}, cert.verdict, "Certified", tol)
    if cert.min_identity_distance <= tol:
        fails.add({"free_length": 6}, cert.min_identity_distance, f"> {tol}", tol)
    summary = {"verdict": cert.verdict, "N": cert.N, "spot_checked": cert.spot_checked,
               "free_words": cert.free_words, "min_identity_distance": cert.min_identity_distance,
               "witness": cert.witness}
    return fails, summary, []


def _length_spectrum(cfg: SuiteConfig, samples: int, tol: float):
    max_l = int(cfg.params.get("L", 5))
    bound = int(cfg.params.get("B", 50))
    cert = _default_certificate(cfg)
    fails = _Failures()
    gaps = []
    sizes = []
    for L in range(1, max_l + 1):
        vals = [s.length_value for s in semigroup_length_spectrum(cert, L=L)]
        sizes.append(len(vals))
        gaps.append(group_gap(vals, bound=bound))
    for L in range(1, max_l):
        if gaps[L] > gaps[L - 1] + 1e-15:
            fails.add({"L": L + 1}, gaps[L], f"<= {gaps[L - 1]}", 0.0)
    if gaps[-1] >= tol:
        fails.add({"L": max_l, "B": bound}, gaps[-1], f"< {tol}", tol)
    rows = [{"L": L + 1, "values": n, "gap": g} for L, (n, g) in enumerate(zip(sizes, gaps))]
    return fails, {"gaps": gaps, "spectrum_sizes": sizes, "B": bound}, rows


def _stratum(cfg: SuiteConfig, samples: int, tol: float):
    Ns = [cfg.N] if cfg.N is not None else [3, 4]
    fails = _Failures()
    per = {}
    for N in Ns:
        if N < 2:
            raise BadConfig("N must be at least 2")
        parts = run_chunks([cfg.seed, N], samples,
                           lambda rng, n, N=N: stratum_campaign(N, n, seed=rng))
        counts: dict = {}
        for p in parts:
            for key, c in p.counts.items():
                counts[key] = counts.get(key, 0) + c
        violations = sum(p.violations for p in parts)
        ambiguous = sum(p.ambiguous for p in parts)
        overlap = max(p.max_kernel_overlap for p in parts)
        search = run_chunks([cfg.seed, N, 11], samples,
                            lambda rng, n, N=N: rank_one_chord_search(N, n, seed=rng))
        found = sum(s.found for s in search)
        if violations:
            fails.add({"N": N, "check": "i+j>=N and kernel orthogonality"}, violations, 0, tol)
            fails.count += violations - 1
        if ambiguous:
            fails.add({"N": N, "check": "rank ambiguity"}, ambiguous, 0, tol)
        if overlap > tol:
            fails.add({"N": N, "check": "kernel overlap"}, overlap, 0.0, tol)
        if found and N >= 3:
            fails.add({"N": N, "check": "Geod_{1,1}"}, found, 0, tol)
        per[str(N)] = {"labels": dict(sorted(counts.items())), "violations": violations,
                       "ambiguous": ambiguous, "max_kernel_overlap": overlap,
                       "rank_one_pairs_found": found,
                       "min_rank_opposite_rank_one": min(s.min_other_rank for s in search)}
    return fails, {"N": per}, []


def _basepoint(cfg: SuiteConfig, samples: int, tol: float):
    Ns = [cfg.N] if cfg.N is not None else [2, 3, 4, 5]
    times = np.linspace(-5.0, 5.0, 21)
    fails = _Failures()
    worst = {"a_flow": 0.0, "round_trip": 0.0, "witness": 0.0}
    for N in Ns:
        for i in range(1, N):
            rep = a_flow_check(N, i, times)
            worst["a_flow"] = max(worst["a_flow"], float(rep.vector_gaps.max()),
                                  float(rep.distance_errors.max()))
            if not rep.passed:
                fails.add({"N": N, "i": i}, float(rep.vector_gaps.max()), 0.0, rep.tol)

            def work(rng, n, N=N, i=i):
                f = _Failures()
                w = {"round_trip": 0.0, "witness": 0.0}
                v0 = basepoint(N, i)
                for _ in range(n):
                    a = rng.standard_normal((N, N))
                    v = action_on_vector(N, a, v0)
                    red = reduce_to_basepoint(N, v, tol=np.inf)
                    w["round_trip"] = max(w["round_trip"], red.residual)
                    if red.residual > tol:
                        f.add({"N": N, "i": i, "A": a}, red.residual, 0.0, tol)
                    nw = nonwandering_classify(N, v)
                    w["witness"] = max(w["witness"], nw.witness_residual)
                    if not nw.in_nw or nw.witness_residual > tol:
                        f.add({"N": N, "i": i, "A": a, "check": "non-wandering"},
                              nw.as_dict()["InNW"], True, tol)
                return f, w

            for f, w in run_chunks([cfg.seed, N, i], samples, work, chunk=256):
                fails.merge(f)
                for key in w:
                    worst[key] = max(worst[key], w[key])
    return fails, {"N": Ns, "times": times.tolist(), "max_residual": worst}, []


DUALITY_DOMAINS = ("disk", "ball", "triangle", "square", "cube", "psd3")


def _duality(cfg: SuiteConfig, samples: int, tol: float):
    if cfg.domain is not None:
        doms = [_resolve_domain(cfg.domain)]
    else:
        doms = [named_domain(n) for n in DUALITY_DOMAINS]
    fails = _Failures()
    per = {}
    for k, dom in enumerate(doms):
        dd = dual(dual(dom))
        star = dual(dom)

        def work(rng, n, dom=dom, dd=dd, star=star):
            f = _Failures()
            w = {"double_dual": 0.0, "hyperplanes": 0}
            x = dom.chart.normalize(dom.sample_interior(rng, n))
            y = dom.chart.normalize(dom.sample_interior(rng, n))
            gap = np.abs(distances(dom, x, y) - distances(dd, x, y))
            w["double_dual"] = float(gap.max())
            for j in np.flatnonzero(gap > tol):
                f.add({"check": "dual(dual)", "x": x[j], "y": y[j]}, gap[j], 0.0, tol)
            for p in _boundary_points(dom, rng, min(n, 64)):
                for cov in boundary_flags(dom, ProjPoint(p)).covectors:
                    w["hyperplanes"] += 1
                    where = contains(star, ProjPoint(np.asarray(cov, dtype=float)))
                    if where is not Location.BOUNDARY:
                        f.add({"check": "supporting hyperplane", "point": p, "covector": cov},
                              where.value, "Boundary", tol)
            return f, w

        agg = {"double_dual": 0.0, "hyperplanes": 0}
        for f, w in run_chunks([cfg.seed, k], samples, work, chunk=256):
            fails.merge(f)
            agg["double_dual"] = max(agg["double_dual"], w["double_dual"])
            agg["hyperplanes"] += w["hyperplanes"]
        per[repr(dom)] = agg
    return fails, {"domains": per}, []


def _cone_sum(cfg: SuiteConfig, samples: int, tol: float):
    dom = _resolve_domain(cfg.domain) if cfg.domain is not None else cone_sum(Ellipsoid(2), Simplex(0))
    if not isinstance(dom, ConeSum):
        raise BadConfig("the cone-sum suite needs a coneSum domain")

    def work(rng, n):
        f = _Failures()
        strong = 0
        for p in _boundary_points(dom, rng, n):
            if boundary_flags(dom, ProjPoint(p)).strongly_extremal:
                strong += 1
                f.add({"check": "strongly extremal", "point": p}, True, False, tol)
        left = dom.left.sample_interior(rng, n)
        right = dom.right.sample_interior(rng, n)
        sums = np.hstack([left, right])
        inside = dom.margins(sums) > 0
        for j in np.flatnonzero(~inside):
            f.add({"check": "interior sum", "lift": sums[j]}, "not Interior", "Interior", tol)
        return f, strong

    fails = _Failures()
    for f, _ in run_chunks(cfg.seed, samples, work, chunk=256):
        fails.merge(f)
    return fails, {"domain": _domain_label(dom)}, []


def _ball_homothety(cfg: SuiteConfig, samples: int, tol: float):
    dom = _resolve_domain(cfg.domain, "disk")
    r = float(cfg.params.get("r", 1.0))
    if not r > 0:
        raise BadConfig("ball radius must be positive")
    centre = np.zeros(dom.dim)
    if contains(dom, dom.chart.point(centre)) is not Location.INTERIOR:
        centre = dom.chart.to_chart(dom.sample_interior(np.random.default_rng(cfg.seed), 1)[0])
    reports = run_chunks(cfg.seed, samples,
                         lambda rng, n: ball_homothety_check(dom, centre, r, n,
                                                             seed=rng, tol=tol))
    fails = _Failures()
    violations = sum(rep.violations for rep in reports)
    worst = max(rep.max_violation for rep in reports)
    if violations:
        fails.add({"centre": centre, "r": r}, worst, 0.0, tol)
        fails.count += violations - 1
    return fails, {"domain": _domain_label(dom), "r": r, "ratio": reports[0].ratio,
                   "max_violation": worst}, []


def _mixing_witness(cfg: SuiteConfig, samples: int, tol: float):
    dom = _resolve_domain(cfg.domain, "disk")
    n_max = int(cfg.params.get("n_max_witness", 40))
    cert = _default_certificate(cfg)
    rep = mixing_witness(dom, cert, 0, 1, eps=tol, n_max=n_max)
    fails = _Failures()
    if not rep.first_ok:
        fails.add({"part": "i", "vector": 1}, rep.n0_first, f"<= {n_max}", tol)
    if not rep.second_ok:
        fails.add({"part": "i", "vector": 2}, rep.n0_second, f"<= {n_max}", tol)
    if not rep.density_ok:
        fails.add({"part": "ii"}, rep.window_gap, f"<= {tol}", tol)
    if rep.isometry_gap > 1e-8:
        fails.add({"part": "isometry route"}, rep.isometry_gap, 0.0, 1e-8)
    summary = {"t1": rep.t1, "t2": rep.t2, "tau1": rep.tau1, "tau2": rep.tau2,
               "N0": [rep.n0_first, rep.n0_second], "window_start": rep.window_start,
               "window_gap": rep.window_gap, "isometry_gap": rep.isometry_gap,
               "terms": rep.details["terms"]}
    return fails, summary, []


def _fz(cfg: SuiteConfig, samples: int, tol: float):
    z = float(cfg.params.get("z", 2.0))
    if not z > 1:
        raise BadConfig("z must exceed 1")
    grid = -np.logspace(-4, 4, samples)[::-1]
    rep = interval_fz_check(grid, z, tol=tol)
    fails = _Failures()
    if not rep.monotone:
        steps = np.diff(rep.values)
        k = int(np.argmin(steps))
        fails.add({"a": [grid[k], grid[k + 1]], "z": z}, float(steps[k]), ">= 0", tol)
    if rep.max_formula_gap > 1e-10:
        fails.add({"z": z, "check": "cross-ratio route"}, rep.max_formula_gap, 0.0, 1e-10)
    rows = [{"a": float(a), "fz": float(f)} for a, f in zip(grid, rep.values)]
    return fails, {"z": z, "max_formula_gap": rep.max_formula_gap,
                   "range": [float(rep.values.min()), float(rep.values.max())]}, rows


# name -> (runner, default samples, default tolerance)
SUITES: dict = {
    "metric-axioms": (_metric_axioms, 10_000, 1e-9),
    "crampon": (_crampon, 100_000, 1e-9),
    "stable": (_stable, 1000, 1e-7),
    "sync": (_sync, 100, 1e-3),
    "pingpong": (_pingpong, 100, 1e-6),
    "length-spectrum": (_length_spectrum, 1, 0.05),
    "stratum": (_stratum, 100_000, 1e-7),
    "basepoint": (_basepoint, 20, 1e-8),
    "duality": (_duality, 1000, 1e-9),
    "cone-sum": (_cone_sum, 1000, 1e-9),
    "ball-homothety": (_ball_homothety, 10_000, 1e-12),
    "mixing-witness": (_mixing_witness, 1, 0.05),
    "fz": (_fz, 200, 1e-12),
}


def run_suite(name: str, config: SuiteConfig | None = None) -> SuiteReport:
    """Run one named campaign; failures empty means it passed."""
    if name not in SUITES:
        raise UnknownSuite(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    cfg = config or SuiteConfig()
    runner, default_samples, default_tol = SUITES[name]
    samples = default_samples if cfg.samples is None else cfg.samples
    if not isinstance(samples, (int, np.integer)) or samples <= 0:
        raise BadConfig(f"samples must be a positive integer, got {samples!r}")
    tol = default_tol if cfg.tol is None else float(cfg.tol)
    if not tol > 0:
        raise BadConfig("tolerance must be positive")
    start = time.perf_counter()
    fails, summary, rows = runner(cfg, int(samples), tol)
    elapsed = time.perf_counter() - start
    return SuiteReport(name, cfg.seed, int(samples), tol, fails.items, fails.count,
                       _plain(summary), elapsed, rows)

