"""Strong stable manifolds of the geodesic flow.

Vectors sharing a forward endpoint xi are compared long after they have
crowded into xi.  Whenever the domain can be re-centred at xi exactly, the
comparison runs in that localized frame: footpoints become tiny chart vectors
with full relative precision, so t = 25 (footpoints e^-50 from xi) or even
t = 100 is unproblematic.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .domains import ConvexDomain, boundary_flags, chord, line_meets_domain
from .dynamics import proximal_analysis, translation_length
from .errors import (
    EndpointsDiffer,
    NotSmoothEndpoint,
    PreconditionAxisMeetsDomain,
    PreconditionViolated,
)
from .hilbert import (
    TangentVector,
    _flow_lifts,
    _pair_distances,
    distance,
    flow,
    tangent_at,
    tangent_distance,
    transform_vector,
)
from .projective import (
    TOL_PROJ,
    ProjPoint,
    angle_distance,
    cross_ratio_lines,
    cross_ratio_points,
    join,
    meet,
)
from .schottky import PingPongCertificate

LATE_TIME = 25.0
WINDOW_GRID = 33


def shared_forward_endpoint(domain: ConvexDomain, v: TangentVector, w: TangentVector):
    """Common forward endpoint of v and w, with both chords; EndpointsDiffer otherwise."""
    cv = chord(domain, v.base, v.direction)
    cw = chord(domain, w.base, w.direction)
    if angle_distance(cv.b, cw.b) > 1e3 * TOL_PROJ:
        raise EndpointsDiffer(f"forward endpoints differ by {angle_distance(cv.b, cw.b):.3e}")
    return cv.b, cv, cw


class EndpointFrame:
    """Flows of vectors aimed at a common boundary point xi.

    In a localized domain xi is the chart origin and every flowed footpoint is
    written as an offset from it; otherwise the global chart is used with xi
    as the exact forward anchor.
    """

    def __init__(self, domain: ConvexDomain, xi: ProjPoint):
        self.source = domain
        self.xi_lift = domain.chart.normalize(domain.orient(xi.coords)[0])
        self.xi_chart = domain.chart.to_chart(self.xi_lift)
        local = domain.localized(xi)
        self.domain = local if local is not None else domain
        self.localized = local is not None

    def embed(self, v: TangentVector):
        """(footpoint lift, direction lift) with the direction aimed exactly at xi."""
        c = self.source.chart.to_chart(v.base) - self.xi_chart
        aim = -c / np.linalg.norm(c)
        if self.localized:
            base = np.append(c, 1.0)
            return base, np.append(aim, 0.0)
        base = self.source.chart.from_chart(c + self.xi_chart)
        return base, self.source.chart.direction(aim)

    @property
    def anchor(self) -> np.ndarray:
        if self.localized:
            out = np.zeros(self.domain.ambient_dim)
            out[-1] = 1.0
            return out
        return self.xi_lift

    def footpoints(self, v: TangentVector, times) -> np.ndarray:
        times = np.atleast_1d(np.asarray(times, dtype=float))
        base, u = self.embed(v)
        n = times.size
        return _flow_lifts(self.domain, np.repeat(base[None], n, 0), np.repeat(u[None], n, 0),
                           times, anchor_b=np.repeat(self.anchor[None], n, 0))

    def distances(self, v: TangentVector, w: TangentVector, times, shift: float = 0.0):
        """d(pi phi_t v, pi phi_{t+shift} w) for every t in ``times``."""
        times = np.atleast_1d(np.asarray(times, dtype=float))
        return _pair_distances(self.domain, self.footpoints(v, times),
                               self.footpoints(w, times + shift))

    def tangent_distance(self, v, w, t: float, shift: float = 0.0, grid: int = WINDOW_GRID):
        """Grid value of the tangent-bundle distance between phi_t v and phi_{t+shift} w."""
        return float(np.max(self.distances(v, w, t + np.linspace(0.0, 1.0, grid), shift)))


# ----------------------------------------------------------------------------
# monotonicity along a shared endpoint


@dataclass
class MonotonicityReport:
    times: np.ndarray
    values: np.ndarray
    max_increase: float
    passed: bool


def monotonicity_check(domain: ConvexDomain, v: TangentVector, w: TangentVector,
                       T: float = 10.0, steps: int = 101, tol: float = 1e-7,
                       resolution: int = 64) -> MonotonicityReport:
    """Tangent-bundle distance between phi_t v and phi_t w on a grid of t in [0, T].

    The pointwise distance is sampled every 1/resolution on [0, T + 1], and the
    tangent distance at t is the maximum over the window [t, t + 1].
    """
    xi, _, _ = shared_forward_endpoint(domain, v, w)
    frame = EndpointFrame(domain, xi)
    fine = np.arange(0.0, T + 1.0 + 0.5 / resolution, 1.0 / resolution)
    pointwise = frame.distances(v, w, fine)
    times = np.linspace(0.0, T, steps)
    starts = np.rint(times * resolution).astype(int)
    values = np.array([pointwise[s:s + resolution + 1].max() for s in starts])
    increase = float(np.max(np.diff(values), initial=-np.inf))
    return MonotonicityReport(times, values, increase, bool(increase <= tol))


# ----------------------------------------------------------------------------
# the limit delta


def _backward_points(domain, v, w):
    xi, cv, cw = shared_forward_endpoint(domain, v, w)
    if angle_distance(cv.a, cw.a) < 1e3 * TOL_PROJ:
        raise PreconditionViolated("backward endpoints coincide: v and w share a chord")
    return xi, cv, cw


def _one_sided_angles(domain, xi_chart, e, n, h0):
    """Limits of the secant angles on both sides of the ray xi + s e (s > 0).

    The chart line through xi + h e parallel to n cuts the boundary at
    offsets hi (towards +n) and lo (towards -n); the secant angles are
    extrapolated to h = 0 with two Richardson steps.
    """
    chart = domain.chart
    hs = h0 / np.array([1.0, 2.0, 4.0])
    base = chart.from_chart(xi_chart + hs[:, None] * e)
    u = np.repeat(chart.direction(n)[None], 3, axis=0)
    lo, hi = domain.intervals(base, u)
    plus = np.arctan2(hi, hs)
    minus = np.arctan2(-lo, hs)

    def richardson(a):
        r1 = 2 * a[1:] - a[:-1]
        return (4 * r1[1] - r1[0]) / 3

    return richardson(minus), richardson(plus)


@dataclass
class DeltaReport:
    delta: float
    tangent_minus: float
    tangent_plus: float
    smooth: bool
    a: ProjPoint | None = field(default=None, repr=False)


def stable_limit_delta(domain: ConvexDomain, v: TangentVector, w: TangentVector,
                       h: float = 1e-4) -> DeltaReport:
    """Half the log cross-ratio of the lines D, xi+x, xi+y, D' through xi.

    D and D' are the one-sided tangent lines at xi of the section of the
    boundary by the plane through x, y and xi.
    """
    xi, cv, cw = _backward_points(domain, v, w)
    x, y = ProjPoint(cv.base), ProjPoint(cw.base)
    a_line = meet(join([x, y]), join([cv.a, cw.a]))
    if a_line.rank != 1:
        raise PreconditionViolated("x + y and the backward line do not meet in a point")
    a = ProjPoint(a_line.basis[:, 0])
    if line_meets_domain(domain, a, xi):
        raise PreconditionAxisMeetsDomain("the line a + xi meets the domain")

    chart = domain.chart
    xi_c = chart.to_chart(xi)
    dx = chart.to_chart(x) - xi_c
    dy = chart.to_chart(y) - xi_c
    e = dx / np.linalg.norm(dx)
    n = dy - (dy @ e) * e
    if np.linalg.norm(n) < 1e-12:
        raise PreconditionViolated("x and y lie on one line through xi")
    n /= np.linalg.norm(n)

    if boundary_flags(domain, xi).smooth:
        return DeltaReport(0.0, np.pi / 2, np.pi / 2, True, a)
    minus, plus = _one_sided_angles(domain, xi_c, e, n, h * min(1.0, np.linalg.norm(dx)))
    if minus + plus >= np.pi - 1e-9:
        return DeltaReport(0.0, float(minus), float(plus), True, a)

    def line(direction):
        return join([chart.from_chart(xi_c), chart.from_chart(xi_c + direction)])

    theta_y = np.arctan2(dy @ n, dy @ e)
    lines = [line(np.cos(minus) * e - np.sin(minus) * n), line(e),
             line(np.cos(theta_y) * e + np.sin(theta_y) * n),
             line(np.cos(plus) * e + np.sin(plus) * n)]
    plane = join([xi.coords, x.coords, y.coords])
    cr = cross_ratio_lines(*lines, plane)
    return DeltaReport(float(0.5 * np.log(cr)), float(minus), float(plus), False, a)


def late_distance(domain: ConvexDomain, v: TangentVector, w: TangentVector,
                  t: float = LATE_TIME, shift: float = 0.0) -> float:
    """d(pi phi_t v, pi phi_{t+shift} w) for vectors with a shared forward endpoint."""
    xi, _, _ = shared_forward_endpoint(domain, v, w)
    return float(EndpointFrame(domain, xi).distances(v, w, [t], shift)[0])


# ----------------------------------------------------------------------------
# synchronization


@dataclass
class SyncResult:
    t0: float
    intersection_point: ProjPoint | None
    residual: float
    late_distance: float


def sync_time(domain: ConvexDomain, v: TangentVector, w: TangentVector,
              check_time: float = LATE_TIME) -> SyncResult:
    """The unique t0 putting v and phi_{t0} w on one strong stable manifold.

    The line through the two backward endpoints meets the tangent hyperplane
    at xi in a point p; phi_{t0} w is where the line from pi v through p
    crosses the chord of w.
    """
    xi, cv, cw = shared_forward_endpoint(domain, v, w)
    flags = boundary_flags(domain, xi)
    if not flags.smooth:
        raise NotSmoothEndpoint("the shared forward endpoint is not a smooth boundary point")
    frame = EndpointFrame(domain, xi)
    x, y = cv.base, cw.base

    if angle_distance(cv.a, cw.a) < 1e3 * TOL_PROJ:
        # same chord: w = phi_s v with s the signed offset along it
        s = _signed_offset(domain, x, y, cv.direction)
        t0 = -s
        late = frame.tangent_distance(v, w, check_time, t0)
        return SyncResult(t0, None, 0.0, late)

    phi = np.asarray(flags.covectors[0], dtype=float)
    phi = phi / np.linalg.norm(phi)
    ea, eb = cv.a.coords, cw.a.coords
    p = (phi @ eb) * ea - (phi @ ea) * eb
    p = p / np.linalg.norm(p)
    hit = meet(join([x, p]), join([cw.a, xi]))
    if hit.rank != 1:
        raise PreconditionViolated("the line from pi v through p misses the chord of w")
    z = hit.basis[:, 0]
    if not domain.chart.representable(z):
        raise PreconditionViolated("synchronizing point is not in the chart")
    z = domain.chart.normalize(z)
    s = _signed_offset(domain, y, z, cw.direction)
    t0 = s
    residual = max(abs(phi @ p), join([x, z]).residual(p))
    late = frame.tangent_distance(v, w, check_time, t0)
    return SyncResult(float(t0), ProjPoint(p), float(residual), late)


def brute_force_sync(domain: ConvexDomain, v: TangentVector, w: TangentVector,
                     t: float = 20.0, span: float = 5.0, grid: int = 4001) -> float:
    """Minimizer over t0 in [-span, span] of d(pi phi_t v, pi phi_{t+t0} w), by grid then refinement."""
    xi, _, _ = shared_forward_endpoint(domain, v, w)
    frame = EndpointFrame(domain, xi)
    shifts = np.linspace(-span, span, grid)
    fv = frame.footpoints(v, [t])
    vals = _pair_distances(frame.domain, np.repeat(fv, grid, 0), frame.footpoints(w, t + shifts))
    k = int(np.argmin(vals))
    step = shifts[1] - shifts[0]

    def objective(s):
        return float(_pair_distances(frame.domain, fv, frame.footpoints(w, [t + s]))[0])

    res = minimize_scalar(objective, bounds=(shifts[k] - step, shifts[k] + step),
                          method="bounded", options={"xatol": 1e-10})
    return float(res.x)


def _signed_offset(domain, start, end, direction) -> float:
    """Signed Hilbert distance from start to end along the chord direction."""
    gap = end - start
    if np.linalg.norm(gap) == 0:
        return 0.0
    d = float(_pair_distances(domain, start[None], end[None])[0])
    return d if gap @ direction >= 0 else -d


# ----------------------------------------------------------------------------
# the crampon inequality and the one-dimensional f_z check


@dataclass
class CramponReport:
    samples: int
    violations: int
    max_excess: float
    tol: float
    witnesses: list = field(default_factory=list)


def crampon_check(domain: ConvexDomain, c1, c2, t: float, T: float, tol: float = 1e-9) -> CramponReport:
    """d(c1(t), c2(t)) <= d(c1(0), c2(0)) + d(c1(T), c2(T)) for geodesics c_i(s) = pi phi_{speed_i s} v_i."""
    (v1, s1), (v2, s2) = c1, c2
    if not 0 <= t <= T:
        raise ValueError("need 0 <= t <= T")
    if not (s1 > 0 and s2 > 0):
        raise ValueError("speeds must be positive")

    def point(v, s):
        return flow(domain, v, s).base

    lhs = distance(domain, point(v1, s1 * t), point(v2, s2 * t))
    rhs = (distance(domain, point(v1, 0.0), point(v2, 0.0))
           + distance(domain, point(v1, s1 * T), point(v2, s2 * T)))
    excess = lhs - rhs
    return CramponReport(1, int(excess > tol), float(excess), tol)


def crampon_campaign(domain: ConvexDomain, samples: int, seed=0, max_travel: float = 6.0,
                     tol: float = 1e-9, max_witnesses: int = 5) -> CramponReport:
    """Vectorized random instances of the four-point inequality."""
    rng = np.random.default_rng(seed)
    dim = domain.dim
    x1 = domain.chart.normalize(domain.sample_interior(rng, samples))
    x2 = domain.chart.normalize(domain.sample_interior(rng, samples))
    u1 = domain.chart.direction(_unit_rows(rng, samples, dim))
    u2 = domain.chart.direction(_unit_rows(rng, samples, dim))
    speeds = rng.uniform(0.1, 2.0, (2, samples))
    T = rng.uniform(0.0, 1.0, samples) * max_travel / speeds.max(axis=0)
    t = rng.uniform(0.0, 1.0, samples) * T

    def pts(x, u, s):
        return _flow_lifts(domain, x, u, s)

    d0 = _pair_distances(domain, x1, x2)
    dt = _pair_distances(domain, pts(x1, u1, speeds[0] * t), pts(x2, u2, speeds[1] * t))
    dT = _pair_distances(domain, pts(x1, u1, speeds[0] * T), pts(x2, u2, speeds[1] * T))
    excess = dt - (d0 + dT)
    bad = ~np.isfinite(excess) | (excess > tol)
    witnesses = [{"x1": x1[k].tolist(), "x2": x2[k].tolist(), "u1": u1[k].tolist(),
                  "u2": u2[k].tolist(), "speeds": speeds[:, k].tolist(), "t": float(t[k]),
                  "T": float(T[k]), "excess": float(excess[k])}
                 for k in np.flatnonzero(bad)[:max_witnesses]]
    return CramponReport(samples, int(np.sum(bad)), float(np.nanmax(excess)), tol, witnesses)


def _unit_rows(rng, n, dim):
    g = rng.standard_normal((n, dim))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def fz(a, z: float):
    """Closed form of d_(a,inf)(0,1) / d_(a,inf)(0,z) for a < 0 < 1 < z."""
    a = np.asarray(a, dtype=float)
    return np.log1p(-1.0 / a) / np.log1p(-z / a)


def fz_by_cross_ratio(a: float, z: float) -> float:
    """Same ratio evaluated from interval Hilbert distances on P^1."""
    inf = np.array([1.0, 0.0])

    def pt(s):
        return np.array([s, 1.0])

    d1 = 0.5 * np.log(cross_ratio_points(pt(a), pt(0.0), pt(1.0), inf))
    dz = 0.5 * np.log(cross_ratio_points(pt(a), pt(0.0), pt(z), inf))
    return float(d1 / dz)


@dataclass
class FzReport:
    values: np.ndarray
    monotone: bool
    max_formula_gap: float


def interval_fz_check(a_grid, z: float, tol: float = 1e-12) -> FzReport:
    a = np.sort(np.asarray(a_grid, dtype=float))
    if np.any(a >= 0) or not z > 1:
        raise ValueError("need a < 0 and z > 1")
    vals = fz(a, z)
    monotone = bool(np.all(np.diff(vals) >= -tol))
    gap = max(abs(fz_by_cross_ratio(ai, z) - vi) for ai, vi in zip(a, vals))
    return FzReport(vals, monotone, float(gap))


# ----------------------------------------------------------------------------
# the mixing witness


@dataclass
class MixingReport:
    t1: float
    t2: float
    tau1: float
    tau2: float
    n0_first: int
    n0_second: int
    first_ok: bool
    second_ok: bool
    window_start: float
    window_gap: float
    density_ok: bool
    isometry_gap: float
    eps: float
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.first_ok and self.second_ok and self.density_ok


def axis_vector(domain: ConvexDomain, data) -> TangentVector:
    """Unit vector on the axis, at the point of the chord nearest the chart origin, pointing at x+."""
    chart = domain.chart
    a = chart.to_chart(domain.orient(data.x_minus.coords)[0])
    b = chart.to_chart(domain.orient(data.x_plus.coords)[0])
    seg = b - a
    s = np.clip(-(a @ seg) / (seg @ seg), 0.1, 0.9)
    return tangent_at(domain, a + s * seg, seg)


def _first_entry(values: np.ndarray, eps: float) -> int:
    """Least index from which every value stays within eps (or -1)."""
    inside = values <= eps
    if not inside[-1]:
        return -1
    k = len(values) - 1
    while k > 0 and inside[k - 1]:
        k -= 1
    return k


def witness_window(shift: float, tau1: float, tau2: float, n0: int, count: int):
    """Largest gap of {shift + n1 tau1 + n2 tau2 : n1, n2 >= n0} inside [T, T + tau1).

    T is chosen so that every n2 in n0..n0+count contributes exactly one
    point with n1 >= n0; the set is tau1-periodic beyond T, so gaps wrap.
    """
    n2 = np.arange(n0, n0 + count + 1)
    start = shift + n0 * tau1 + (n0 + count) * tau2
    base = shift + n2 * tau2
    n1 = np.ceil((start - base) / tau1)
    assert np.all(n1 >= n0)
    pts = np.sort(base + n1 * tau1)
    gaps = np.diff(np.concatenate([pts, [pts[0] + tau1]]))
    return float(start), float(gaps.max())


def mixing_witness(domain: ConvexDomain, cert: PingPongCertificate, i1: int, i2: int,
                   eps: float = 0.05, n_max: int = 40, tail: int = 20,
                   max_terms: int = 20000) -> MixingReport:
    """Orbit of a connecting vector w entering eps-balls around two periodic vectors.

    v_k sits on the axis of gamma_k^N (period tau_k = l(gamma_k^N)); w runs from
    the backward endpoint of v1 to the forward endpoint of v2.  Using the
    isometry gamma^{nN}, closeness of phi_{t1 - n tau1} w to v1 in the quotient
    is closeness to phi_{-n tau1} v1 upstairs, which is measured in the frame
    localized at the shared endpoint.
    """
    cert.require_certified()
    if cert.family.dim != domain.ambient_dim:
        raise PreconditionViolated("certificate and domain live in different dimensions")
    mats = []
    for i in (i1, i2):
        g = np.linalg.matrix_power(cert.family.mats[i] / np.linalg.norm(cert.family.mats[i], 2),
                                   cert.N)
        mats.append(g)
    datas = [proximal_analysis(g) for g in mats]
    for d in datas:
        for pt in (d.x_plus, d.x_minus):
            if not boundary_flags(domain, pt).smooth:
                raise PreconditionViolated("an axis endpoint is not smooth")
        if not line_meets_domain(domain, d.x_plus, d.x_minus):
            raise PreconditionViolated("an axis does not meet the domain")
    tau1, tau2 = translation_length(mats[0]), translation_length(mats[1])
    v1, v2 = axis_vector(domain, datas[0]), axis_vector(domain, datas[1])

    chart = domain.chart
    start = chart.to_chart(domain.orient(datas[0].x_minus.coords)[0])
    end = chart.to_chart(domain.orient(datas[1].x_plus.coords)[0])
    mid = 0.5 * (start + end)
    w = tangent_at(domain, mid, end - start)

    t1 = -sync_time(domain, v1.reversed(), w.reversed()).t0
    t2 = sync_time(domain, v2, w).t0

    # (i) d_T(phi_{t1 - s} w, phi_{-s} v1) and d_T(phi_{t2 + s} w, phi_s v2) for s = n tau
    ns = np.arange(0, n_max + tail + 1)
    back = EndpointFrame(domain, ProjPoint(domain.orient(datas[0].x_minus.coords)[0]))
    fwd = EndpointFrame(domain, ProjPoint(domain.orient(datas[1].x_plus.coords)[0]))
    window = np.linspace(0.0, 1.0, WINDOW_GRID)
    first = np.array([np.max(back.distances(v1.reversed(), w.reversed(), n * tau1 - window, -t1))
                      for n in ns])
    second = np.array([np.max(fwd.distances(v2, w, n * tau2 + window, t2)) for n in ns])
    n0a, n0b = _first_entry(first, eps), _first_entry(second, eps)
    first_ok = 0 <= n0a <= n_max
    second_ok = 0 <= n0b <= n_max

    # dual route for small n: push the flowed w forward by the group element
    iso = 0.0
    for n in range(1, 3):
        g = np.linalg.matrix_power(mats[0], n)
        moved = transform_vector(domain, g, flow(domain, w, t1 - n * tau1))
        direct = tangent_distance(domain, moved, v1, steps=WINDOW_GRID)
        iso = max(iso, abs(direct - first[n]))

    # (ii) density of -t1 + t2 + n1 tau1 + n2 tau2 (n1, n2 >= N0) in a window of length tau1
    n0 = max(n0a, n0b, 0)
    count = 64
    while True:
        window_start, gap = witness_window(-t1 + t2, tau1, tau2, n0, count)
        if gap <= eps or count >= max_terms:
            break
        count *= 2
    return MixingReport(float(t1), float(t2), float(tau1), float(tau2), int(n0a), int(n0b),
                        bool(first_ok), bool(second_ok), float(window_start), float(gap),
                        bool(gap <= eps), float(iso), eps,
                        {"first": first.tolist(), "second": second.tolist(), "terms": count})
