"""Hilbert distance, the straight geodesic flow and the tangent-bundle distance.

Distances are evaluated from the chord parameters of the segment [x, y]: with
x at parameter 0, y at 1 and the chord endpoints at t- < 0 < 1 < t+,

    d(x, y) = 1/2 * log1p(p + q + p q),   p = -1/t-,  q = 1/(t+ - 1),

which is half the log of the cross-ratio [a, x, y, b] written without
subtracting nearby numbers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .domains import ConvexDomain, chord, require_interior
from .errors import NotInterior, ZeroDirection
from .projective import ProjPoint

TANGENT_GRID = 256


@dataclass(frozen=True)
class TangentVector:
    """Footpoint in the domain plus a unit chart direction."""

    base: ProjPoint
    direction: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.direction, dtype=float)
        n = np.linalg.norm(d)
        if not n > 0:
            raise ZeroDirection("tangent vector needs a nonzero direction")
        d = d / n
        d.setflags(write=False)
        object.__setattr__(self, "direction", d)

    def reversed(self) -> "TangentVector":
        return TangentVector(self.base, -self.direction)


def tangent_at(domain: ConvexDomain, x, direction) -> TangentVector:
    """Build a tangent vector from a chart point (or ProjPoint) and a chart direction."""
    base = require_interior(domain, x)
    return TangentVector(ProjPoint(base), direction)


def tangent_towards(domain: ConvexDomain, x, y) -> TangentVector:
    """Unit vector at x pointing at the (interior or boundary) point y."""
    base = require_interior(domain, x)
    cx = domain.chart.to_chart(base)
    cy = domain.chart.to_chart(domain.lift_of(y))
    return TangentVector(ProjPoint(base), cy - cx)


# ----------------------------------------------------------------------------
# vectorized kernels on chart-normalized lifts


def _pair_distances(domain: ConvexDomain, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    x = np.atleast_2d(x)
    y = np.atleast_2d(y)
    u = y - x
    still = np.linalg.norm(u, axis=1) == 0
    u = np.where(still[:, None], domain.chart.direction(np.eye(domain.dim)[0]) if domain.dim else u, u)
    lo, hi = domain.intervals(x, u)
    with np.errstate(divide="ignore", invalid="ignore"):
        behind = -1.0 / lo
        ahead = 1.0 / (hi - 1.0)
        d = 0.5 * np.log1p(behind + ahead + behind * ahead)
    return np.where(still, 0.0, d)


def _checked(domain: ConvexDomain, lifts) -> np.ndarray:
    arr = np.atleast_2d(np.asarray(lifts, dtype=float))
    if arr.shape[1] == domain.dim and domain.dim != domain.ambient_dim:
        arr = domain.chart.from_chart(arr)
    margins = domain.unit_margins(arr)
    if not np.all(margins > domain.interior_floor):
        bad = int(np.argmin(margins))
        raise NotInterior(f"row {bad} has margin {margins[bad]:.3e}")
    return domain.chart.normalize(arr)


def distances(domain: ConvexDomain, xs, ys) -> np.ndarray:
    """Row-wise Hilbert distances between interior lifts (or chart points)."""
    return _pair_distances(domain, _checked(domain, xs), _checked(domain, ys))


def distance(domain: ConvexDomain, x, y) -> float:
    """Hilbert distance between two interior points."""
    xl = require_interior(domain, x)
    yl = require_interior(domain, y)
    return float(_pair_distances(domain, xl, yl)[0])


def flow_positions(lo, hi, t):
    """Chord parameter of the flowed footpoint, relative to each endpoint.

    The footpoint starts at parameter 0 of a chord [lo, hi]; returns
    (offset_from_a, offset_from_b) so callers can anchor on whichever endpoint
    is nearer without cancellation.
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    t = np.asarray(t, dtype=float)
    length = hi - lo
    p = -lo                     # distance from a
    q = hi                      # distance from b
    with np.errstate(over="ignore"):
        fwd = np.exp(-2.0 * np.abs(t))
        # t >= 0: distance to b shrinks like e^{-2t}
        to_b_fwd = length * q * fwd / (p + q * fwd)
        # t < 0: distance to a shrinks like e^{2t}
        to_a_bwd = length * p * fwd / (q + p * fwd)
    to_b = np.where(t >= 0, to_b_fwd, length - to_a_bwd)
    to_a = np.where(t >= 0, length - to_b_fwd, to_a_bwd)
    return to_a, to_b


def _flow_lifts(domain: ConvexDomain, base: np.ndarray, direction: np.ndarray, t,
                anchor_a=None, anchor_b=None):
    """Flowed chart-normalized footpoints for rows of (base, direction, t).

    ``anchor_a``/``anchor_b`` optionally supply the exact chord endpoints; the
    new footpoint is written as an offset from the nearer endpoint.
    """
    base = np.atleast_2d(base)
    direction = np.atleast_2d(direction)
    t = np.broadcast_to(np.asarray(t, dtype=float), (base.shape[0],))
    lo, hi = domain.intervals(base, direction)
    to_a, to_b = flow_positions(lo, hi, t)
    a = base + lo[:, None] * direction if anchor_a is None else np.atleast_2d(anchor_a)
    b = base + hi[:, None] * direction if anchor_b is None else np.atleast_2d(anchor_b)
    from_b = b - to_b[:, None] * direction
    from_a = a + to_a[:, None] * direction
    return np.where((t >= 0)[:, None], from_b, from_a)


def flow(domain: ConvexDomain, v: TangentVector, t: float) -> TangentVector:
    """The geodesic flow: move the footpoint by Hilbert length t along its chord."""
    if t == 0:
        return v
    base = require_interior(domain, v.base)
    u = domain.chart.direction(v.direction)
    new = _flow_lifts(domain, base, u, t)[0]
    return TangentVector(ProjPoint(new), v.direction)


def flow_many(domain: ConvexDomain, v: TangentVector, times) -> np.ndarray:
    """Chart-normalized footpoint lifts of flow(v, t) for every t in ``times``."""
    times = np.asarray(times, dtype=float)
    base = require_interior(domain, v.base)
    u = domain.chart.direction(v.direction)
    reps = np.repeat(base[None, :], times.size, axis=0)
    dirs = np.repeat(u[None, :], times.size, axis=0)
    return _flow_lifts(domain, reps, dirs, times)


def endpoints(domain: ConvexDomain, v: TangentVector):
    """(phi_{-inf} v, phi_{+inf} v), the chord endpoints behind and ahead of v."""
    c = chord(domain, v.base, v.direction)
    return c.a, c.b


def tangent_distance_profile(domain: ConvexDomain, v: TangentVector, w: TangentVector,
                             steps: int = TANGENT_GRID):
    """Grid times in [0, 1] and the distances d(pi phi_t v, pi phi_t w)."""
    if steps < 2:
        raise ValueError("steps must be at least 2")
    times = np.linspace(0.0, 1.0, steps)
    pv = flow_many(domain, v, times)
    pw = flow_many(domain, w, times)
    return times, _pair_distances(domain, pv, pw)


def tangent_distance(domain: ConvexDomain, v: TangentVector, w: TangentVector,
                     steps: int = TANGENT_GRID) -> float:
    """Grid approximation of max over t in [0,1] of d(pi phi_t v, pi phi_t w)."""
    return float(np.max(tangent_distance_profile(domain, v, w, steps)[1]))


def chart_gap(domain: ConvexDomain, v: TangentVector, w: TangentVector) -> float:
    """Euclidean chart distance between footpoints plus direction mismatch."""
    cv = domain.chart.to_chart(v.base)
    cw = domain.chart.to_chart(w.base)
    return float(np.linalg.norm(cv - cw) + np.linalg.norm(v.direction - w.direction))


def transform_vector(domain: ConvexDomain, g, v: TangentVector) -> TangentVector:
    """Image of v under the projective map g (assumed to preserve the domain)."""
    g = np.asarray(g, dtype=float)
    c = chord(domain, v.base, v.direction)
    base = g @ c.base
    ahead = g @ (c.base + c.t_plus * c.direction)
    behind = g @ (c.base + c.t_minus * c.direction)
    cb = domain.chart.to_chart(base)
    # direction from the image footpoint towards the image of the forward endpoint;
    # use the backward endpoint when the forward one leaves the chart
    if domain.chart.representable(ahead):
        d = domain.chart.to_chart(ahead) - cb
    else:
        d = cb - domain.chart.to_chart(behind)
    return TangentVector(ProjPoint(base), d)


def random_directions(rng: np.random.Generator, n: int, dim: int) -> np.ndarray:
    g = rng.standard_normal((n, dim))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


@dataclass
class HomothetyReport:
    samples: int
    violations: int
    max_violation: float
    ratio: float


def ball_homothety_check(domain: ConvexDomain, x, r: float, samples: int = 10_000,
                         seed: int = 0, tol: float = 1e-12) -> HomothetyReport:
    """Sample the closed ball B(x, r) and test the inclusion
    B(x, r) in (1 - e^{-2r}) (closure(domain) - x) + x in the chart."""
    rng = np.random.default_rng(seed)
    base = require_interior(domain, x)
    dirs = random_directions(rng, samples, domain.dim)
    times = rng.uniform(0.0, r, samples)
    times[: min(samples, 8)] = r            # always probe the sphere itself
    lifts = domain.chart.direction(dirs)
    pts = _flow_lifts(domain, np.repeat(base[None, :], samples, axis=0), lifts, times)
    ratio = -np.expm1(-2.0 * r)
    cx = domain.chart.to_chart(base)
    cy = domain.chart.to_chart(pts)
    if ratio == 0:
        worst = np.max(np.linalg.norm(cy - cx, axis=1))
        return HomothetyReport(samples, int(worst > tol), float(worst), ratio)
    pulled = cx + (cy - cx) / ratio
    margins = domain.unit_margins(domain.chart.from_chart(pulled))
    violation = np.maximum(-margins, 0.0)
    return HomothetyReport(samples, int(np.sum(violation > tol)), float(np.max(violation)), ratio)
