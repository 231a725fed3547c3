"""Properly convex domains with exact chord oracles.

Each domain is the projectivization of an open convex cone C in V = R^D, and
carries an affine chart whose functional is positive on the closure of C.
Two numerical primitives drive everything:

* ``margins(V)`` is a concave, positively homogeneous function of degree one
  on lifts (rows), positive exactly on the interior of the cone;
* ``intervals(X, U)`` returns, for interior lifts X and arbitrary lifts U, the
  closed parameter range {t : X + tU in closure(C)} (possibly unbounded).

Both are vectorized over rows so the sampling campaigns stay cheap.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.optimize import linprog, minimize_scalar
from scipy.spatial import ConvexHull, HalfspaceIntersection
from scipy.spatial import QhullError

from .errors import (
    InvalidDomain,
    NotInterior,
    NotOnBoundary,
    UnsupportedVariant,
    ZeroDirection,
)
from .projective import (
    TOL_BND,
    TOL_PROJ,
    AffineChart,
    ProjPoint,
    ProjSubspace,
)

# Lifts whose margin is below this floor are refused as interior points: the
# chord parameters would carry no significant digits.
INTERIOR_FLOOR = 1e-12


class Location(Enum):
    INTERIOR = "Interior"
    BOUNDARY = "Boundary"
    EXTERIOR = "Exterior"


@dataclass(frozen=True)
class Chord:
    a: ProjPoint
    b: ProjPoint
    line: ProjSubspace
    # numeric description: a = base + t_minus * direction, b = base + t_plus * direction
    base: np.ndarray = field(repr=False)
    direction: np.ndarray = field(repr=False)
    t_minus: float = 0.0
    t_plus: float = 0.0


@dataclass
class BoundaryFlags:
    smooth: bool
    extremal: bool
    strongly_extremal: bool
    supporting_hyperplanes: list
    covectors: list = field(default_factory=list, repr=False)


# ----------------------------------------------------------------------------
# symmetric matrices as vectors


def sym_dim(n: int) -> int:
    return n * (n + 1) // 2


def _sym_index(n: int):
    rows, cols = np.triu_indices(n)
    weights = np.where(rows == cols, 1.0, np.sqrt(2.0))
    return rows, cols, weights


def svec(mat) -> np.ndarray:
    """Isometric vectorization of symmetric matrices (upper triangle, row-major).

    Off-diagonal entries are scaled by sqrt(2) so the Frobenius pairing becomes
    the dot product; works on stacks of matrices.
    """
    arr = np.asarray(mat, dtype=float)
    n = arr.shape[-1]
    rows, cols, weights = _sym_index(n)
    return arr[..., rows, cols] * weights


def smat(vec) -> np.ndarray:
    arr = np.asarray(vec, dtype=float)
    dim = arr.shape[-1]
    n = int(round((np.sqrt(8 * dim + 1) - 1) / 2))
    rows, cols, weights = _sym_index(n)
    out = np.zeros(arr.shape[:-1] + (n, n))
    vals = arr / weights
    out[..., rows, cols] = vals
    out[..., cols, rows] = vals
    return out


def congruence_matrix(a) -> np.ndarray:
    """Matrix of X -> a X a^T acting on svec coordinates."""
    a = np.asarray(a, dtype=float)
    n = a.shape[0]
    basis = smat(np.eye(sym_dim(n)))
    return svec(a @ basis @ a.T).T


# ----------------------------------------------------------------------------
# base class


class ConvexDomain:
    """Abstract properly convex domain; see the module docstring."""

    chart: AffineChart
    interior_floor: float = INTERIOR_FLOOR

    @property
    def ambient_dim(self) -> int:
        return self.chart.functional.size

    @property
    def dim(self) -> int:
        return self.ambient_dim - 1

    # -- primitives (vectorized) --
    def margins(self, lifts: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def intervals(self, base: np.ndarray, direction: np.ndarray):
        raise NotImplementedError

    def _flags(self, lift: np.ndarray) -> BoundaryFlags:
        raise NotImplementedError

    def dual(self) -> "ConvexDomain":
        raise UnsupportedVariant(f"{type(self).__name__} has no exact dual")

    def to_json(self) -> dict:
        raise UnsupportedVariant(f"{type(self).__name__} has no JSON form")

    def localized(self, xi) -> "ConvexDomain | None":
        """Same domain in a chart whose origin is the boundary point ``xi``.

        Returns None when the variant cannot be re-centred exactly.
        """
        return None

    def sample_interior(self, rng: np.random.Generator, n: int) -> np.ndarray:
        raise NotImplementedError

    # -- helpers --
    def orient(self, lifts) -> np.ndarray:
        """Unit-normalize lifts and flip them to the positive side of the chart."""
        arr = np.atleast_2d(np.asarray(lifts, dtype=float))
        arr = arr / np.linalg.norm(arr, axis=1, keepdims=True)
        side = arr @ self.chart.functional
        return arr * np.where(side < 0, -1.0, 1.0)[:, None]

    def unit_margins(self, lifts) -> np.ndarray:
        """Margins of unit lifts; -inf for points off the chart."""
        arr = self.orient(lifts)
        side = arr @ self.chart.functional
        out = self.margins(arr)
        return np.where(side > TOL_PROJ * np.linalg.norm(self.chart.functional), out, -np.inf)

    def lift_of(self, p) -> np.ndarray:
        if isinstance(p, ProjPoint):
            return p.coords
        arr = np.asarray(p, dtype=float)
        if arr.size == self.dim and arr.size != self.ambient_dim:
            return self.chart.from_chart(arr)
        return arr

    def __repr__(self) -> str:
        return f"{type(self).__name__}(dim={self.dim})"


def _quadratic_roots(a, b, c):
    """Roots of a t^2 + 2 b t + c, vectorized; NaN where not real."""
    with np.errstate(divide="ignore", invalid="ignore"):
        disc = b * b - a * c
        root = np.sqrt(np.where(disc >= 0, disc, np.nan))
        sgn = np.where(b >= 0, 1.0, -1.0)
        q = -(b + sgn * root)
        r1 = q / a
        r2 = c / q
    return r1, r2


def _nearest_roots(roots):
    """Largest negative and smallest positive root among columns of ``roots``."""
    with np.errstate(invalid="ignore"):
        neg = np.where(roots < 0, roots, -np.inf)
        pos = np.where(roots > 0, roots, np.inf)
    return np.max(neg, axis=1), np.min(pos, axis=1)


# ----------------------------------------------------------------------------
# quadric cones


class QuadricDomain(ConvexDomain):
    """Projectivized nappe {v : v^T M v < 0} of a form of signature (d, 1)."""

    def __init__(self, form, chart: AffineChart, interior_floor: float = INTERIOR_FLOOR):
        self.form = np.asarray(form, dtype=float)
        self.chart = chart
        self.interior_floor = interior_floor
        vals, vecs = np.linalg.eigh(self.form)
        if np.sum(vals < 0) != 1 or np.any(np.abs(vals) < 1e-14):
            raise InvalidDomain("quadric form must have signature (d, 1)")
        self._scaled = vecs * np.sqrt(np.abs(vals))   # columns
        self._time = int(np.argmin(vals))
        # M^{-1} f lies inside the double cone because f is inside the dual one;
        # orient the timelike coordinate to be positive on the nappe where f > 0
        axis = np.linalg.solve(self.form, self.chart.functional)
        if axis @ self.chart.functional < 0:
            axis = -axis
        self._time_sign = np.sign(axis @ self._scaled[:, self._time]) or 1.0

    def margins(self, lifts):
        w = np.atleast_2d(lifts) @ self._scaled
        time = self._time_sign * w[:, self._time]
        space = np.linalg.norm(np.delete(w, self._time, axis=1), axis=1)
        q = np.einsum("ij,jk,ik->i", np.atleast_2d(lifts), self.form, np.atleast_2d(lifts))
        with np.errstate(divide="ignore", invalid="ignore"):
            smooth = -q / (time + space)
        return np.where(time > 0, smooth, time - space)

    def intervals(self, base, direction):
        x = np.atleast_2d(base)
        u = np.atleast_2d(direction)
        a = np.einsum("ij,jk,ik->i", u, self.form, u)
        b = np.einsum("ij,jk,ik->i", x, self.form, u)
        c = np.einsum("ij,jk,ik->i", x, self.form, x)
        r1, r2 = _quadratic_roots(a, b, c)
        return _nearest_roots(np.stack([r1, r2], axis=1))

    def _flags(self, lift):
        covector = -(self.form @ lift)
        return BoundaryFlags(True, True, True, [ProjSubspace.hyperplane(covector)], [covector])

    def localized(self, xi):
        lift = self.chart.normalize(self.lift_of(xi))
        frame = np.column_stack([self.chart.basis, lift])
        form = frame.T @ self.form @ frame
        form[-1, -1] = 0.0       # xi lies on the quadric
        return QuadricDomain(form, AffineChart.standard(self.dim), interior_floor=0.0)


class Ellipsoid(QuadricDomain):
    """The unit ball of R^dim in the standard chart (the Klein model)."""

    def __init__(self, dim: int):
        if dim < 1:
            raise InvalidDomain("ellipsoid dimension must be positive")
        form = np.eye(dim + 1)
        form[-1, -1] = -1.0
        super().__init__(form, AffineChart.standard(dim))

    def dual(self):
        return Ellipsoid(self.dim)

    def to_json(self):
        return {"type": "ellipsoid", "dim": self.dim}

    def sample_interior(self, rng, n):
        d = self.dim
        g = rng.standard_normal((n, d))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        r = 0.97 * rng.random(n) ** (1.0 / d)
        return self.chart.from_chart(g * r[:, None])


# ----------------------------------------------------------------------------
# polyhedral cones


def _dedupe_rows(rows: np.ndarray) -> np.ndarray:
    rows = rows / np.linalg.norm(rows, axis=1, keepdims=True)
    keep = []
    for r in rows:
        if not any(np.linalg.norm(r - k) < 1e-9 for k in keep):
            keep.append(r)
    return np.array(keep)


class PolyhedralDomain(ConvexDomain):
    """Projectivized polyhedral cone {v : F v >= 0}; rows of F are facet covectors."""

    def __init__(self, facets, chart: AffineChart, interior_floor: float = INTERIOR_FLOOR):
        self.facets = _dedupe_rows(np.atleast_2d(np.asarray(facets, dtype=float)))
        self.chart = chart
        self.interior_floor = interior_floor

    def margins(self, lifts):
        return np.min(np.atleast_2d(lifts) @ self.facets.T, axis=1)

    def intervals(self, base, direction):
        s = np.atleast_2d(base) @ self.facets.T
        r = np.atleast_2d(direction) @ self.facets.T
        with np.errstate(divide="ignore", invalid="ignore"):
            t = -s / r
        hi = np.min(np.where(r < 0, t, np.inf), axis=1)
        lo = np.max(np.where(r > 0, t, -np.inf), axis=1)
        return lo, hi

    def active_facets(self, lift) -> np.ndarray:
        return np.flatnonzero(self.facets @ lift < TOL_BND)

    def _flags(self, lift):
        active = self.active_facets(lift)
        rows = self.facets[active]
        rank = int(np.sum(np.linalg.svd(rows, compute_uv=False) > 1e-8)) if rows.size else 0
        smooth = rank == 1
        extremal = rank == self.ambient_dim - 1
        # a vertex of a polytope of dimension >= 2 lies on an edge
        strongly = extremal and self.dim == 1
        hyperplanes = [ProjSubspace.hyperplane(r) for r in rows]
        return BoundaryFlags(smooth, extremal, strongly, hyperplanes, list(rows))

    def localized(self, xi):
        lift = self.chart.normalize(self.lift_of(xi))
        frame = np.column_stack([self.chart.basis, lift])
        facets = self.facets @ frame
        incident = np.abs(self.facets @ lift) < TOL_BND * np.linalg.norm(lift)
        facets[incident, -1] = 0.0
        return PolyhedralDomain(facets, AffineChart.standard(self.dim), interior_floor=0.0)

    def chart_halfspaces(self) -> np.ndarray:
        """Rows [a, b] with the domain equal to {x : a.x <= b} in chart coordinates."""
        a = -(self.facets @ self.chart.basis)
        b = self.facets @ self.chart.origin
        return np.column_stack([a, b])

    def vertices(self) -> np.ndarray:
        """Chart coordinates of the vertices."""
        hs = self.chart_halfspaces()
        if self.dim == 1:
            a, b = hs[:, 0], hs[:, 1]
            hi = np.min(b[a > 0] / a[a > 0])
            lo = np.max(b[a < 0] / a[a < 0])
            return np.array([[lo], [hi]])
        centre = _chebyshev_centre(hs)[0]
        his = HalfspaceIntersection(np.column_stack([hs[:, :-1], -hs[:, -1]]), centre)
        pts = his.intersections
        keep = []
        for p in pts:
            if not any(np.linalg.norm(p - k) < 1e-9 for k in keep):
                keep.append(p)
        return np.array(keep)

    def sample_interior(self, rng, n):
        verts = self.vertices()
        weights = rng.dirichlet(np.ones(len(verts)), size=n)
        return self.chart.from_chart(weights @ verts)


def _chebyshev_centre(halfspaces: np.ndarray):
    a, b = halfspaces[:, :-1], halfspaces[:, -1]
    d = a.shape[1]
    norms = np.linalg.norm(a, axis=1)
    cost = np.zeros(d + 1)
    cost[-1] = -1.0
    res = linprog(cost, A_ub=np.column_stack([a, norms]), b_ub=b,
                  bounds=[(None, None)] * d + [(0, None)], method="highs")
    if res.status != 0:
        return None, 0.0
    return res.x[:-1], res.x[-1]


def _positively_spanning(normals: np.ndarray) -> bool:
    """True when the rows positively span R^d (i.e. the H-polytope is bounded)."""
    m, d = normals.shape
    if np.linalg.matrix_rank(normals) < d:
        return False
    res = linprog(np.zeros(m), A_eq=normals.T, b_eq=np.zeros(d),
                  bounds=[(1.0, None)] * m, method="highs")
    return res.status == 0


class Simplex(PolyhedralDomain):
    """Projectivized positive orthant of R^{dim+1}, chart sum(v) = 1."""

    def __init__(self, dim: int):
        if dim < 0:
            raise InvalidDomain("simplex dimension must be non-negative")
        ones = np.ones(dim + 1)
        super().__init__(np.eye(dim + 1), AffineChart(ones))

    def dual(self):
        return Simplex(self.dim)

    def to_json(self):
        return {"type": "simplex", "dim": self.dim}

    def sample_interior(self, rng, n):
        return rng.dirichlet(np.ones(self.ambient_dim), size=n)


class PolytopeH(PolyhedralDomain):
    """Polytope {x : a.x <= b} given by rows [a_1..a_d, b] in the standard chart."""

    def __init__(self, halfspaces):
        self.halfspaces = [list(map(float, row)) for row in halfspaces]
        hs = np.asarray(self.halfspaces, dtype=float)
        if hs.ndim != 2 or hs.shape[1] < 2:
            raise InvalidDomain("halfspaces must be rows [a_1..a_d, b]")
        if not _positively_spanning(hs[:, :-1]):
            raise InvalidDomain("halfspace description is unbounded")
        centre, radius = _chebyshev_centre(hs)
        if centre is None or radius <= 1e-12:
            raise InvalidDomain("halfspace description has empty interior")
        facets = np.column_stack([-hs[:, :-1], hs[:, -1]])
        super().__init__(facets, AffineChart.standard(hs.shape[1] - 1))

    def dual(self):
        hs = np.asarray(self.halfspaces)
        if np.any(hs[:, -1] <= 0):
            raise UnsupportedVariant("dual needs the chart origin inside the polytope")
        return PolytopeV((-hs[:, :-1] / hs[:, -1:] + 0.0).tolist())

    def to_json(self):
        return {"type": "polytopeH", "halfspaces": self.halfspaces}


class PolytopeV(PolyhedralDomain):
    """Convex hull of vertices given in the standard chart.

    The facet description is computed once with Qhull and then shares the
    exact slack-ratio chord oracle of H-polytopes.
    """

    def __init__(self, vertices):
        self.vertex_list = [list(map(float, row)) for row in vertices]
        pts = np.asarray(self.vertex_list, dtype=float)
        if pts.ndim != 2 or len(pts) < pts.shape[1] + 1:
            raise InvalidDomain("need at least dim+1 vertices")
        d = pts.shape[1]
        if d == 1:
            lo, hi = pts.min(), pts.max()
            if hi - lo <= 1e-12:
                raise InvalidDomain("degenerate segment")
            facets = np.array([[1.0, -lo], [-1.0, hi]])
        else:
            try:
                hull = ConvexHull(pts)
            except QhullError as exc:
                raise InvalidDomain(f"vertex set is not full-dimensional: {exc}") from None
            # hull.equations rows n, c with n.x + c <= 0 inside
            facets = -hull.equations
        super().__init__(facets, AffineChart.standard(d))

    def dual(self):
        pts = np.asarray(self.vertex_list)
        return PolytopeH((np.column_stack([-pts, np.ones(len(pts))]) + 0.0).tolist())

    def to_json(self):
        return {"type": "polytopeV", "vertices": self.vertex_list}


def unit_square() -> PolytopeH:
    return PolytopeH([[1, 0, 1], [-1, 0, 1], [0, 1, 1], [0, -1, 1]])


def unit_cube() -> PolytopeH:
    rows = []
    for k in range(3):
        for s in (1.0, -1.0):
            a = [0.0, 0.0, 0.0]
            a[k] = s
            rows.append(a + [1.0])
    return PolytopeH(rows)


# ----------------------------------------------------------------------------
# positive-definite cone


class PsdCone(ConvexDomain):
    """P(positive-definite symmetric N x N matrices) in svec coordinates, chart trace = 1."""

    def __init__(self, n: int):
        if n < 2:
            raise InvalidDomain("PsdCone needs N >= 2")
        self.n = n
        self.chart = AffineChart(svec(np.eye(n)))

    def margins(self, lifts):
        return np.linalg.eigvalsh(smat(np.atleast_2d(lifts)))[:, 0]

    def intervals(self, base, direction):
        x = smat(np.atleast_2d(base))
        d = smat(np.atleast_2d(direction))
        try:
            low = np.linalg.cholesky(x)
        except np.linalg.LinAlgError:
            raise NotInterior("base matrix is not positive definite") from None
        half = np.linalg.solve(low, d)
        whitened = np.linalg.solve(low, np.swapaxes(half, -1, -2))
        whitened = 0.5 * (whitened + np.swapaxes(whitened, -1, -2))
        mu = np.linalg.eigvalsh(whitened)
        lo_mu, hi_mu = mu[:, 0], mu[:, -1]
        with np.errstate(divide="ignore"):
            hi = np.where(lo_mu < 0, -1.0 / lo_mu, np.inf)
            lo = np.where(hi_mu > 0, -1.0 / hi_mu, -np.inf)
        return lo, hi

    def rank_profile(self, lift):
        vals, vecs = np.linalg.eigh(smat(lift))
        top = max(vals[-1], 0.0)
        rank = int(np.sum(vals > 1e-9 * top))
        return rank, vals, vecs

    def _flags(self, lift):
        rank, vals, vecs = self.rank_profile(lift)
        kernel = vecs[:, : self.n - rank]
        covectors = [svec(np.outer(k, k)) for k in kernel.T]
        smooth = rank == self.n - 1
        extremal = rank == 1
        # two rank-one matrices span a boundary segment once N >= 3
        strongly = extremal and self.n <= 2
        return BoundaryFlags(smooth, extremal, strongly,
                             [ProjSubspace.hyperplane(c) for c in covectors], covectors)

    def dual(self):
        return PsdCone(self.n)

    def to_json(self):
        return {"type": "psd", "N": self.n}

    def sample_interior(self, rng, n):
        a = rng.standard_normal((n, self.n, self.n))
        mats = a @ np.swapaxes(a, -1, -2) + 0.05 * np.eye(self.n)
        mats /= np.trace(mats, axis1=1, axis2=2)[:, None, None]
        return svec(mats)

    def matrix_lift(self, mat) -> np.ndarray:
        return svec(mat)

    def __repr__(self):
        return f"PsdCone(N={self.n})"


# ----------------------------------------------------------------------------
# sums of cones


class ConeSum(ConvexDomain):
    """P(C1 + C2) for cones living in complementary subspaces V1 + V2."""

    def __init__(self, left: ConvexDomain, right: ConvexDomain):
        self.left = left
        self.right = right
        self._split = left.ambient_dim
        f = np.concatenate([left.chart.functional, right.chart.functional])
        self.chart = AffineChart(f)

    def _parts(self, lifts):
        arr = np.atleast_2d(lifts)
        return arr[:, : self._split], arr[:, self._split:]

    def margins(self, lifts):
        p1, p2 = self._parts(lifts)
        return np.minimum(self.left.margins(p1), self.right.margins(p2))

    def intervals(self, base, direction):
        x1, x2 = self._parts(base)
        u1, u2 = self._parts(direction)
        lo1, hi1 = self.left.intervals(x1, u1)
        lo2, hi2 = self.right.intervals(x2, u2)
        return np.maximum(lo1, lo2), np.minimum(hi1, hi2)

    def _component_state(self, comp: ConvexDomain, part: np.ndarray) -> str:
        if np.linalg.norm(part) < TOL_BND:
            return "zero"
        return "boundary" if comp.margins(part)[0] < TOL_BND else "interior"

    def _pad(self, covector, side: str) -> np.ndarray:
        out = np.zeros(self.ambient_dim)
        if side == "left":
            out[: self._split] = covector
        else:
            out[self._split:] = covector
        return out

    @staticmethod
    def _dual_generators(comp: ConvexDomain) -> list:
        if isinstance(comp, PolyhedralDomain):
            return list(comp.facets)
        if isinstance(comp, PsdCone):
            return [svec(np.outer(e, e)) for e in np.eye(comp.n)]
        if isinstance(comp, QuadricDomain):
            pts = []
            for k in range(comp.dim):
                for s in (1.0, -1.0):
                    x = np.zeros(comp.dim)
                    x[k] = s
                    pts.append(-(comp.form @ comp.chart.from_chart(x)))
            return pts
        return [comp.chart.functional]

    def _flags(self, lift):
        p1, p2 = self._parts(lift[None, :])
        p1, p2 = p1[0], p2[0]
        s1 = self._component_state(self.left, p1)
        s2 = self._component_state(self.right, p2)
        covectors = []
        smooth = False
        for comp, part, state, side in ((self.left, p1, s1, "left"), (self.right, p2, s2, "right")):
            if state == "boundary":
                sub = comp._flags(part / np.linalg.norm(part))
                covectors += [self._pad(c, side) for c in sub.covectors]
            elif state == "zero":
                covectors += [self._pad(c, side) for c in self._dual_generators(comp)]
        states = (s1, s2)
        if states.count("interior") == 1:
            comp, part, state = (self.left, p1, s1) if s1 != "interior" else (self.right, p2, s2)
            if state == "boundary":
                smooth = comp._flags(part / np.linalg.norm(part)).smooth
            else:
                smooth = comp.ambient_dim == 1
        extremal = False
        if "zero" in states:
            comp, part = (self.right, p2) if s1 == "zero" else (self.left, p1)
            if comp.ambient_dim == 1:
                extremal = True
            elif self._component_state(comp, part) == "boundary":
                extremal = comp._flags(part / np.linalg.norm(part)).extremal
        return BoundaryFlags(smooth, extremal, False,
                             [ProjSubspace.hyperplane(c) for c in covectors], covectors)

    def dual(self):
        return ConeSum(self.left.dual(), self.right.dual())

    def to_json(self):
        return {"type": "coneSum", "left": self.left.to_json(), "right": self.right.to_json()}

    def sample_interior(self, rng, n):
        x1 = _component_samples(self.left, rng, n)
        x2 = _component_samples(self.right, rng, n)
        scale = rng.uniform(0.3, 3.0, size=n)
        return np.column_stack([x1, x2 * scale[:, None]])

    def __repr__(self):
        return f"ConeSum({self.left!r}, {self.right!r})"


def _component_samples(comp: ConvexDomain, rng, n):
    if comp.ambient_dim == 1:
        return np.ones((n, 1))
    return comp.sample_interior(rng, n)


class Dual(ConvexDomain):
    """The dual domain of ``of``, remembered as such for serialization."""

    def __init__(self, of: ConvexDomain):
        self.of = of
        self.inner = of.dual()
        self.chart = self.inner.chart
        self.interior_floor = self.inner.interior_floor

    def margins(self, lifts):
        return self.inner.margins(lifts)

    def intervals(self, base, direction):
        return self.inner.intervals(base, direction)

    def _flags(self, lift):
        return self.inner._flags(lift)

    def localized(self, xi):
        return self.inner.localized(xi)

    def sample_interior(self, rng, n):
        return self.inner.sample_interior(rng, n)

    def dual(self):
        return self.of

    def to_json(self):
        return {"type": "dual", "of": self.of.to_json()}

    def __repr__(self):
        return f"Dual({self.of!r})"


# ----------------------------------------------------------------------------
# public operations


def contains(domain: ConvexDomain, p) -> Location:
    lift = domain.lift_of(p)
    if not domain.chart.representable(lift):
        return Location.EXTERIOR
    m = float(domain.unit_margins(lift)[0])
    if abs(m) < TOL_BND:
        return Location.BOUNDARY
    return Location.INTERIOR if m > 0 else Location.EXTERIOR


def require_interior(domain: ConvexDomain, p) -> np.ndarray:
    """Chart-normalized lift of an interior point, or NotInterior."""
    lift = domain.lift_of(p)
    if not domain.chart.representable(lift):
        raise NotInterior("point is not representable in the domain's chart")
    m = float(domain.unit_margins(lift)[0])
    if not m > domain.interior_floor:
        raise NotInterior(f"point margin {m:.3e} is not inside the domain")
    return domain.chart.normalize(lift)


def chord(domain: ConvexDomain, x, direction) -> Chord:
    """The chord through ``x`` along the chart direction ``direction``."""
    base = require_interior(domain, x)
    d = np.asarray(direction, dtype=float)
    if d.shape != (domain.dim,) or not np.linalg.norm(d) > 0:
        raise ZeroDirection("direction must be a nonzero chart vector")
    u = domain.chart.direction(d / np.linalg.norm(d))
    lo, hi = domain.intervals(base[None, :], u[None, :])
    lo, hi = float(lo[0]), float(hi[0])
    if not (np.isfinite(lo) and np.isfinite(hi)):
        raise InvalidDomain("chord leaves the chart: domain is not properly convex")
    a, b = base + lo * u, base + hi * u
    return Chord(ProjPoint(a), ProjPoint(b), ProjSubspace.span([a, b]), base, u, lo, hi)


def boundary_flags(domain: ConvexDomain, xi) -> BoundaryFlags:
    if contains(domain, xi) is not Location.BOUNDARY:
        raise NotOnBoundary("point is not on the boundary")
    lift = domain.orient(domain.lift_of(xi))[0]
    return domain._flags(lift)


def dual(domain: ConvexDomain) -> ConvexDomain:
    return domain.dual()


def cone_sum(left: ConvexDomain, right: ConvexDomain) -> ConvexDomain:
    for comp in (left, right):
        if not isinstance(comp, ConvexDomain):
            raise UnsupportedVariant("cone_sum needs two domains")
    return ConeSum(left, right)


def line_meets_domain(domain: ConvexDomain, p, q, grid: int = 721) -> bool:
    """Whether the projective line through p and q meets the open domain."""
    u = domain.lift_of(p)
    w = domain.lift_of(q)
    u = u / np.linalg.norm(u)
    w = w - (w @ u) * u
    w = w / np.linalg.norm(w)
    theta = np.linspace(0.0, np.pi, grid)
    pts = np.cos(theta)[:, None] * u + np.sin(theta)[:, None] * w
    vals = domain.unit_margins(pts)
    k = int(np.argmax(vals))

    def neg(th):
        return -float(domain.unit_margins(np.cos(th) * u + np.sin(th) * w)[0])

    step = np.pi / (grid - 1)
    res = minimize_scalar(neg, bounds=(theta[k] - step, theta[k] + step), method="bounded",
                          options={"xatol": 1e-13})
    best = max(float(vals[k]), -res.fun)
    return best > TOL_BND


# ----------------------------------------------------------------------------
# JSON


def from_json(obj) -> ConvexDomain:
    if isinstance(obj, str):
        obj = json.loads(obj)
    kind = obj.get("type")
    if kind == "ellipsoid":
        return Ellipsoid(int(obj["dim"]))
    if kind == "simplex":
        return Simplex(int(obj["dim"]))
    if kind == "polytopeH":
        return PolytopeH(obj["halfspaces"])
    if kind == "polytopeV":
        return PolytopeV(obj["vertices"])
    if kind == "psd":
        return PsdCone(int(obj["N"]))
    if kind == "coneSum":
        return ConeSum(from_json(obj["left"]), from_json(obj["right"]))
    if kind == "dual":
        return Dual(from_json(obj["of"]))
    raise InvalidDomain(f"unknown domain type {kind!r}")


def to_json(domain: ConvexDomain) -> dict:
    return domain.to_json()


def load_domain(path_or_text: str) -> ConvexDomain:
    """Read a domain from a JSON file path or an inline JSON string."""
    text = path_or_text.strip()
    if not text.startswith("{"):
        with open(path_or_text, encoding="utf-8") as fh:
            text = fh.read()
    return from_json(json.loads(text))


def named_domain(name: str) -> ConvexDomain:
    """Short names used by the CLI and demos."""
    table = {
        "disk": lambda: Ellipsoid(2),
        "ball": lambda: Ellipsoid(3),
        "triangle": lambda: Simplex(2),
        "tetrahedron": lambda: Simplex(3),
        "square": unit_square,
        "cube": unit_cube,
        "psd3": lambda: PsdCone(3),
        "psd4": lambda: PsdCone(4),
    }
    if name in table:
        return table[name]()
    raise InvalidDomain(f"unknown domain name {name!r}")
