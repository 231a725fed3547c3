"""Eigen-analysis of projective transformations.

Log-moduli of eigenvalues give the Jordan projection; the top and bottom
eigenlines give the attracting and repelling points, and the hyperplane x0 is
cut out by the two matching left eigenvectors (so it is the sum of every
other generalized eigenspace without ever forming a Jordan basis).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .domains import (
    ConvexDomain,
    Location,
    boundary_flags,
    contains,
    line_meets_domain,
)
from .errors import (
    CrosscheckMismatch,
    DisagreementDetected,
    NearDegenerate,
    NotAnAutomorphism,
    NotBiproximal,
    NotConverged,
    NotProximal,
    Singular,
)
from .hilbert import _pair_distances
from .projective import (
    TOL_BND,
    TOL_GAP,
    TOL_PROJ,
    ProjPoint,
    ProjSubspace,
    _null_space,
    angle_distance,
)

SINGULAR_DET = 1e-12


def _unit_scaled(g) -> np.ndarray:
    g = np.asarray(g, dtype=float)
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise ValueError("expected a square matrix")
    norm = np.linalg.norm(g, 2)
    if not norm > 0:
        raise Singular("zero matrix")
    return g / norm


def _check_invertible(g) -> np.ndarray:
    gn = _unit_scaled(g)
    if abs(np.linalg.det(gn)) <= SINGULAR_DET:
        raise Singular(f"|det| of the unit-norm matrix is {abs(np.linalg.det(gn)):.3e}")
    return gn


def _sorted_spectrum(g: np.ndarray):
    vals, vecs = np.linalg.eig(g)
    order = np.argsort(-np.abs(vals), kind="stable")
    return vals[order], vecs[:, order]


def jordan_projection(g) -> np.ndarray:
    """Non-increasing log-moduli of the eigenvalues of g."""
    g = np.asarray(g, dtype=float)
    gn = _check_invertible(g)
    mods = np.sort(np.abs(np.linalg.eigvals(gn)))[::-1]
    return np.log(mods) + np.log(np.linalg.norm(g, 2))


def translation_length(g) -> float:
    """Half the spread between the top and bottom log-moduli."""
    lam = jordan_projection(g)
    return float(0.5 * (lam[0] - lam[-1]))


@dataclass
class ProximalData:
    log_moduli: np.ndarray
    is_proximal: bool
    is_biproximal: bool
    x_plus: ProjPoint | None
    x_minus: ProjPoint | None
    axis: ProjSubspace | None
    x_zero: ProjSubspace | None
    ell: float
    proximality_gap: float
    inverse_gap: float
    # borderline gaps in (tol/100, tol]: reported as not proximal, never guessed
    near_degenerate: bool = False
    # left eigenvectors for the top and bottom eigenvalue
    w_plus: np.ndarray | None = field(default=None, repr=False)
    w_minus: np.ndarray | None = field(default=None, repr=False)

    def require_biproximal(self):
        if not self.is_biproximal:
            raise NotBiproximal(f"gaps {self.proximality_gap:.3e}, {self.inverse_gap:.3e}")
        return self

    def require_proximal(self):
        if not self.is_proximal:
            raise NotProximal(f"top gap {self.proximality_gap:.3e}")
        return self


def _top_real_vector(vals, vecs, k: int) -> np.ndarray:
    v = vecs[:, k]
    # a simple real eigenvalue has an eigenvector real up to a phase
    phase = v[np.argmax(np.abs(v))]
    v = (v / phase).real
    return v / np.linalg.norm(v)


def proximal_analysis(g, inverse=None, tol_gap: float = TOL_GAP,
                      strict: bool = False) -> ProximalData:
    """Proximality data of g.

    ``inverse`` may supply an exact inverse (e.g. for long words whose
    determinant underflows after unit scaling); the bottom eigen-data is then
    read off the top of the inverse.  With ``strict`` a borderline gap raises
    NearDegenerate instead of being flagged.
    """
    g = np.asarray(g, dtype=float)
    if inverse is None:
        gn = _check_invertible(g)
        ginv = np.linalg.inv(gn)
    else:
        gn = _unit_scaled(g)
        ginv = _unit_scaled(inverse)
    d = g.shape[0]

    vals, vecs = _sorted_spectrum(gn)
    lvals, lvecs = _sorted_spectrum(gn.T)
    ivals, ivecs = _sorted_spectrum(ginv)
    ilvals, ilvecs = _sorted_spectrum(ginv.T)

    # long words may underflow their smallest eigenvalues to zero
    with np.errstate(divide="ignore"):
        log_moduli = np.log(np.abs(vals)) + np.log(np.linalg.norm(g, 2))
        top_gap = float(np.log(abs(vals[0])) - np.log(abs(vals[1]))) if d > 1 else np.inf
        bottom_gap = float(np.log(abs(ivals[0])) - np.log(abs(ivals[1]))) if d > 1 else np.inf
    if inverse is not None:
        # the bottom of g's spectrum is unreliable there; mirror the inverse
        log_moduli[-1] = -(np.log(abs(ivals[0])) + np.log(np.linalg.norm(inverse, 2)))
    ell = float(max(0.0, 0.5 * (log_moduli[0] - log_moduli[-1])))

    def decide(gap):
        near = tol_gap / 100 < gap <= tol_gap
        return gap > tol_gap, near

    prox, near_top = decide(top_gap)
    iprox, near_bottom = decide(bottom_gap)
    near = near_top or near_bottom
    if strict and near:
        raise NearDegenerate(f"proximality gaps {top_gap:.3e}, {bottom_gap:.3e}")

    x_plus = x_minus = axis = x_zero = None
    w_plus = w_minus = None
    if prox:
        x_plus = ProjPoint(_top_real_vector(vals, vecs, 0))
        w_plus = _top_real_vector(lvals, lvecs, 0)
    if iprox:
        x_minus = ProjPoint(_top_real_vector(ivals, ivecs, 0))
        w_minus = _top_real_vector(ilvals, ilvecs, 0)
    bip = prox and iprox
    if bip:
        axis = ProjSubspace.span([x_plus.coords, x_minus.coords])
        x_zero = ProjSubspace(_null_space(np.vstack([w_plus, w_minus])), orthonormalize=False)
    return ProximalData(log_moduli, prox, bip, x_plus, x_minus, axis, x_zero, ell,
                        top_gap, bottom_gap, near, w_plus, w_minus)


# ----------------------------------------------------------------------------
# actions on domains


def _image_margins(domain: ConvexDomain, g, lifts) -> np.ndarray:
    return domain.unit_margins(np.atleast_2d(lifts) @ np.asarray(g, dtype=float).T)


def check_automorphism(domain: ConvexDomain, g, samples: int = 1000, seed: int = 0,
                       tol: float = TOL_BND):
    """Sampled test that g and its inverse map the domain into its closure."""
    g = np.asarray(g, dtype=float)
    _check_invertible(g)
    rng = np.random.default_rng(seed)
    pts = domain.sample_interior(rng, samples)
    for mat, name in ((g, "g"), (np.linalg.inv(g), "g^-1")):
        m = _image_margins(domain, mat / np.linalg.norm(mat, 2), pts)
        worst = float(np.min(m))
        if not worst > -tol:
            raise NotAnAutomorphism(f"{name} sends a sample outside (margin {worst:.3e})")


def translation_length_geometric(domain: ConvexDomain, g, tol: float = 1e-4,
                                 random_starts: int = 8, seed: int = 0,
                                 verify: bool = True) -> float:
    """Numerical infimum of d(x, g x) over the domain.

    Multistart Nelder-Mead in chart coordinates, seeded at the chart origin,
    along the axis (when it crosses the domain) and at random interior points.
    """
    g = np.asarray(g, dtype=float)
    if verify:
        check_automorphism(domain, g)
    gn = g / np.linalg.norm(g, 2)
    chart = domain.chart
    rng = np.random.default_rng(seed)

    def objective(y):
        x = chart.from_chart(y)
        m = domain.margins(x[None, :])[0]
        if not m > 1e-14:
            return 1e6 + float(np.linalg.norm(y))
        gx = gn @ x
        gx = gx * np.sign(gx @ chart.functional)
        if not domain.unit_margins(gx)[0] > 1e-14:
            return 1e6 + float(np.linalg.norm(y))
        return float(_pair_distances(domain, x, chart.normalize(gx))[0])

    seeds = [np.zeros(domain.dim)]
    data = proximal_analysis(g)
    if data.is_biproximal:
        a, b = data.x_plus.coords, data.x_minus.coords
        for s in np.linspace(0.1, 0.9, 5):
            p = domain.orient(np.cos(s * np.pi / 2) * a + np.sin(s * np.pi / 2) * b)[0]
            if domain.unit_margins(p)[0] > 1e-9:
                seeds.append(chart.to_chart(p))
            q = domain.orient(np.cos(s * np.pi / 2) * a - np.sin(s * np.pi / 2) * b)[0]
            if domain.unit_margins(q)[0] > 1e-9:
                seeds.append(chart.to_chart(q))
    seeds += list(chart.to_chart(domain.sample_interior(rng, random_starts)))

    best = np.inf
    finals = []
    for y0 in seeds:
        if objective(y0) >= 1e6:
            continue
        res = minimize(objective, y0, method="Nelder-Mead",
                       options={"xatol": 1e-10, "fatol": min(tol, 1e-6) * 1e-3,
                                "maxiter": 4000 * domain.dim, "adaptive": domain.dim > 3})
        best = min(best, float(res.fun), objective(y0))
        finals.append(float(res.fun))
        # stop once three independent starts agree on the minimum
        if sum(f <= best + 1e-2 * tol for f in finals) >= 3:
            break
    return best


@dataclass
class AxisReport:
    meets: bool
    x_plus_smooth: bool
    tangent_residual: float | None


def _tangent_covector(domain, point) -> np.ndarray:
    flags = boundary_flags(domain, point)
    cov = np.asarray(flags.covectors[0], dtype=float)
    return cov / np.linalg.norm(cov)


def axis_meets_domain(domain: ConvexDomain, g, data: ProximalData | None = None) -> AxisReport:
    """Whether axis(g) crosses the domain, crosschecked against smoothness of x+.

    When it does, the tangent hyperplane at x+ must equal x+ + x0.
    """
    data = data or proximal_analysis(g)
    data.require_biproximal()
    if contains(domain, data.x_plus) is not Location.BOUNDARY:
        raise CrosscheckMismatch("attracting point is not on the boundary; g does not preserve the domain")
    meets = line_meets_domain(domain, data.x_plus, data.x_minus)
    smooth = boundary_flags(domain, data.x_plus).smooth
    if meets != smooth:
        raise CrosscheckMismatch(f"axis meets domain = {meets} but x+ smooth = {smooth}")
    residual = None
    if meets:
        phi = _tangent_covector(domain, data.x_plus)
        residual = float(max(abs(phi @ data.x_plus.coords),
                             np.max(np.abs(phi @ data.x_zero.basis), initial=0.0)))
        if residual > TOL_PROJ:
            raise CrosscheckMismatch(f"tangent hyperplane misses x+ + x0 by {residual:.3e}")
    return AxisReport(meets, smooth, residual)


def dual_action(g) -> np.ndarray:
    """Matrix of g acting on covectors (phi -> phi o g^-1)."""
    return np.linalg.inv(np.asarray(g, dtype=float)).T


@dataclass
class RankOneReport:
    a: bool
    b: bool
    c: bool
    d: bool
    e: bool

    @property
    def verdict(self) -> bool:
        return self.a

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in "abcde"}


def _smooth_strong(domain, point) -> bool:
    flags = boundary_flags(domain, point)
    return flags.smooth and flags.strongly_extremal


def _smooth_with_smooth_tangent(domain, dual_domain, point) -> bool:
    # a smooth point is strongly extremal iff its tangent hyperplane is a
    # smooth point of the dual boundary
    flags = boundary_flags(domain, point)
    if not flags.smooth:
        return False
    return boundary_flags(dual_domain, flags.covectors[0]).smooth


def rank_one_check(domain: ConvexDomain, g, dual_domain: ConvexDomain | None = None) -> RankOneReport:
    """Evaluate five equivalent rank-one conditions by separate routes.

    (a) both endpoints smooth and strongly extremal (flags of the domain);
    (b) both endpoints smooth with a smooth dual tangent point;
    (c) x+ strongly extremal;
    (d) condition (a) for the dual action on the dual domain;
    (e) axis meets the domain and the dual axis meets the dual domain.
    """
    g = np.asarray(g, dtype=float)
    data = proximal_analysis(g).require_biproximal()
    dual_domain = dual_domain or domain.dual()
    gd = dual_action(g)
    ddata = proximal_analysis(gd).require_biproximal()

    a = _smooth_strong(domain, data.x_plus) and _smooth_strong(domain, data.x_minus)
    b = (_smooth_with_smooth_tangent(domain, dual_domain, data.x_plus)
         and _smooth_with_smooth_tangent(domain, dual_domain, data.x_minus))
    c = boundary_flags(domain, data.x_plus).strongly_extremal
    d = _smooth_strong(dual_domain, ddata.x_plus) and _smooth_strong(dual_domain, ddata.x_minus)
    e = (line_meets_domain(domain, data.x_plus, data.x_minus)
         and line_meets_domain(dual_domain, ddata.x_plus, ddata.x_minus))
    report = RankOneReport(bool(a), bool(b), bool(c), bool(d), bool(e))
    if len(set(report.as_dict().values())) != 1:
        raise DisagreementDetected(f"rank-one conditions disagree: {report.as_dict()}")
    return report


@dataclass
class ContractionReport:
    limit: np.ndarray
    steps: int
    rank_one_residual: float
    image_error: float
    kernel_error: float
    predicted_error: float


def contraction_limit(g, n_max: int = 100, tol: float = 1e-10) -> ContractionReport:
    """Limit of g^n / |g^n|, which is a rank-one map onto x+ with kernel ker(w+)."""
    g = np.asarray(g, dtype=float)
    data = proximal_analysis(g).require_proximal()
    predicted = float(np.exp(-data.proximality_gap * n_max))
    if predicted > tol:
        raise NotConverged(f"gap {data.proximality_gap:.3e} needs more than {n_max} steps")
    gn = g / np.linalg.norm(g, 2)
    m = np.eye(g.shape[0])
    for _ in range(n_max):
        m = gn @ m
        m /= np.linalg.norm(m, 2)
    s = np.linalg.svd(m, compute_uv=False)
    u = m[:, np.argmax(np.linalg.norm(m, axis=0))]
    image_error = angle_distance(u, data.x_plus)
    kernel = _null_space(data.w_plus[None, :])
    kernel_error = float(np.linalg.norm(m @ kernel, 2)) if kernel.size else 0.0
    # fix the overall sign so the image is the canonical lift of x+
    if u @ data.x_plus.coords < 0:
        m = -m
    return ContractionReport(m, n_max, float(s[1] / s[0]) if s.size > 1 else 0.0,
                             image_error, kernel_error, predicted)
