"""Projective points, flats, affine charts and cross-ratios.

Points of P(V) are stored as unit lifts with a canonical sign; flats are stored
by an orthonormal basis of their lift.  Every rank decision goes through
singular values with the single threshold ``TOL_PROJ``.
"""

from __future__ import annotations

import numpy as np

from .errors import (
    DegeneratePair,
    EmptyInput,
    NotCollinear,
    NotConcurrent,
    NotInPlane,
)

TOL_PROJ = 1e-10   # rank / incidence threshold on unit-normalized data
TOL_BND = 1e-9     # boundary residual
TOL_GAP = 1e-8     # proximality gap


def _as_vector(v) -> np.ndarray:
    arr = np.asarray(v, dtype=float).reshape(-1)
    return arr


def canonical_lift(v) -> np.ndarray:
    """Unit-normalize ``v`` and make its first significant coordinate positive."""
    arr = _as_vector(v)
    norm = np.linalg.norm(arr)
    if not np.isfinite(norm) or norm == 0.0:
        raise ValueError("zero or non-finite vector has no projective class")
    arr = arr / norm
    significant = np.flatnonzero(np.abs(arr) > 1e-12)
    pivot = significant[0] if significant.size else int(np.argmax(np.abs(arr)))
    if arr[pivot] < 0:
        arr = -arr
    return arr


class ProjPoint:
    """A point of P(V) given by a homogeneous lift."""

    __slots__ = ("coords",)

    def __init__(self, coords):
        self.coords = canonical_lift(coords)
        self.coords.setflags(write=False)

    @property
    def ambient_dim(self) -> int:
        return self.coords.size

    def __eq__(self, other) -> bool:
        if not isinstance(other, ProjPoint):
            return NotImplemented
        return angle_distance(self, other) < TOL_PROJ

    __hash__ = None

    def __repr__(self) -> str:
        return f"ProjPoint({np.array2string(self.coords, precision=6)})"


def _orthonormal_span(vectors: np.ndarray, tol: float = TOL_PROJ) -> np.ndarray:
    """Orthonormal basis (columns) of the span of the columns of ``vectors``."""
    if vectors.size == 0:
        return np.zeros((vectors.shape[0], 0))
    cols = vectors / np.maximum(np.linalg.norm(vectors, axis=0), 1e-300)
    u, s, _ = np.linalg.svd(cols, full_matrices=False)
    rank = int(np.sum(s > tol))
    return u[:, :rank]


def _null_space(mat: np.ndarray, tol: float = TOL_PROJ) -> np.ndarray:
    """Orthonormal basis of the kernel of ``mat`` (rows are covectors)."""
    n = mat.shape[1]
    if mat.shape[0] == 0:
        return np.eye(n)
    rows = mat / np.maximum(np.linalg.norm(mat, axis=1, keepdims=True), 1e-300)
    _, s, vt = np.linalg.svd(rows, full_matrices=True)
    rank = int(np.sum(s > tol))
    return vt[rank:].T.copy()


class ProjSubspace:
    """A projective flat P(W) stored by an orthonormal basis of W."""

    __slots__ = ("basis",)

    def __init__(self, basis, orthonormalize: bool = True):
        arr = np.asarray(basis, dtype=float)
        if arr.ndim == 1:
            arr = arr[:, None]
        if orthonormalize:
            arr = _orthonormal_span(arr)
        self.basis = arr
        self.basis.setflags(write=False)

    @classmethod
    def span(cls, vectors) -> "ProjSubspace":
        return cls(np.column_stack([_as_vector(v) for v in vectors]))

    @classmethod
    def hyperplane(cls, covector) -> "ProjSubspace":
        """The kernel of a nonzero covector."""
        return cls(_null_space(_as_vector(covector)[None, :]), orthonormalize=False)

    @property
    def ambient_dim(self) -> int:
        return self.basis.shape[0]

    @property
    def rank(self) -> int:
        """Dimension of the lift W (projective dimension is rank - 1)."""
        return self.basis.shape[1]

    @property
    def dim(self) -> int:
        return self.rank - 1

    def residual(self, v) -> float:
        """Distance from the unit lift of ``v`` to W."""
        u = canonical_lift(v.coords if isinstance(v, ProjPoint) else v)
        return float(np.linalg.norm(u - self.basis @ (self.basis.T @ u)))

    def contains(self, p, tol: float = TOL_PROJ) -> bool:
        return self.residual(p) < tol

    def contains_subspace(self, other: "ProjSubspace", tol: float = TOL_PROJ) -> bool:
        resid = other.basis - self.basis @ (self.basis.T @ other.basis)
        return bool(np.linalg.norm(resid, 2) < tol) if other.rank else True

    def annihilator(self) -> np.ndarray:
        """Rows spanning the covectors vanishing on W."""
        return _null_space(self.basis.T).T

    def __eq__(self, other) -> bool:
        if not isinstance(other, ProjSubspace):
            return NotImplemented
        return (self.rank == other.rank and self.contains_subspace(other)
                and other.contains_subspace(self))

    __hash__ = None

    def __repr__(self) -> str:
        return f"ProjSubspace(dim={self.dim}, ambient={self.ambient_dim})"


def _lift_columns(items) -> np.ndarray:
    cols = []
    for item in items:
        if isinstance(item, ProjSubspace):
            cols.append(item.basis)
        elif isinstance(item, ProjPoint):
            cols.append(item.coords[:, None])
        else:
            cols.append(_as_vector(item)[:, None])
    return np.hstack(cols)


def join(items) -> ProjSubspace:
    """Smallest flat containing every point or flat in ``items``."""
    items = list(items)
    if not items:
        raise EmptyInput("join of an empty collection")
    return ProjSubspace(_lift_columns(items))


def meet(s1: ProjSubspace, s2: ProjSubspace) -> ProjSubspace:
    """Intersection of two flats (possibly empty, i.e. rank 0)."""
    if s1.ambient_dim != s2.ambient_dim:
        raise ValueError("flats live in different ambient spaces")
    stacked = np.vstack([s1.annihilator(), s2.annihilator()])
    return ProjSubspace(_null_space(stacked), orthonormalize=False)


def angle_distance(x, y) -> float:
    """Principal angle in [0, pi/2] between two lines."""
    u = x.coords if isinstance(x, ProjPoint) else canonical_lift(x)
    w = y.coords if isinstance(y, ProjPoint) else canonical_lift(y)
    c = abs(float(u @ w))
    s = float(np.linalg.norm(u - (u @ w) * w))
    return float(np.arctan2(s, c))


def _line_coordinates(lifts: np.ndarray) -> np.ndarray:
    """Affine coordinates of collinear unit lifts in a chart adapted to their line.

    The chart functional is picked on a fine circle of candidates so that no
    point is near the hyperplane at infinity of the chart.
    """
    u, s, _ = np.linalg.svd(lifts, full_matrices=False)
    if s.size > 2 and s[2] > TOL_PROJ:
        raise NotCollinear(f"third singular value {s[2]:.3e} exceeds {TOL_PROJ}")
    planar = u[:, :2].T @ lifts             # 2 x n coordinates on the line
    planar /= np.linalg.norm(planar, axis=0)
    angles = np.linspace(0.0, np.pi, 181)[:-1]
    candidates = np.stack([np.cos(angles), np.sin(angles)], axis=1)
    clearance = np.min(np.abs(candidates @ planar), axis=1)
    phi = candidates[int(np.argmax(clearance))]
    psi = np.array([-phi[1], phi[0]])
    return (psi @ planar) / (phi @ planar)


def _as_lift(p) -> np.ndarray:
    return p.coords if isinstance(p, ProjPoint) else canonical_lift(p)


def cross_ratio_points(a, x, y, b) -> float:
    """The cross-ratio [a, x, y, b], normalised so that [0, 1, t, inf] = t."""
    lifts = np.column_stack([_as_lift(p) for p in (a, x, y, b)])
    if angle_distance(lifts[:, 0], lifts[:, 1]) < TOL_PROJ:
        raise DegeneratePair("a and x coincide")
    if angle_distance(lifts[:, 2], lifts[:, 3]) < TOL_PROJ:
        raise DegeneratePair("y and b coincide")
    sa, sx, sy, sb = _line_coordinates(lifts)
    return float(((sy - sa) * (sb - sx)) / ((sx - sa) * (sb - sy)))


def cross_ratio_lines(l1: ProjSubspace, l2: ProjSubspace, l3: ProjSubspace,
                      l4: ProjSubspace, plane: ProjSubspace,
                      transversal: ProjSubspace | None = None) -> float:
    """Cross-ratio of four concurrent lines of a projective plane.

    Evaluated on the intersections with a transversal; by default the
    transversal is the line of the plane orthogonal to the common point.
    """
    lines = (l1, l2, l3, l4)
    if plane.rank != 3:
        raise NotInPlane("the carrier must be a projective plane")
    for line in lines:
        if line.rank != 2:
            raise NotInPlane("every input must be a projective line")
        if not plane.contains_subspace(line):
            raise NotInPlane("line does not lie in the plane")
    common = meet(l1, l2)
    if common.rank != 1:
        common = meet(l1, l3) if meet(l1, l3).rank == 1 else meet(l2, l4)
    if common.rank != 1:
        raise NotConcurrent("could not isolate a common point")
    centre = common.basis[:, 0]
    for line in lines:
        if not line.contains(centre):
            raise NotConcurrent("the four lines do not pass through one point")
    if transversal is None:
        in_plane = plane.basis
        orth = in_plane - np.outer(centre, centre @ in_plane)
        transversal = ProjSubspace(orth)
    if transversal.contains(centre):
        raise NotConcurrent("transversal passes through the common point")
    pts = []
    for line in lines:
        hit = meet(line, transversal)
        if hit.rank != 1:
            raise NotInPlane("transversal does not cut the line in one point")
        pts.append(hit.basis[:, 0])
    return cross_ratio_points(*pts)


class AffineChart:
    """An affine chart of P(V): the complement of the hyperplane ``functional = 0``.

    Chart coordinates of a point p are ``basis.T @ (lift / (functional . lift) - origin)``
    where ``basis`` is an orthonormal frame of the kernel of ``functional`` and
    ``origin`` is the point of the chart hyperplane closest to 0.
    """

    def __init__(self, functional, basis=None):
        f = _as_vector(functional).copy()
        self.functional = f
        self.origin = f / float(f @ f)
        if basis is None:
            basis = _null_space(f[None, :])
        self.basis = np.asarray(basis, dtype=float)
        for arr in (self.functional, self.origin, self.basis):
            arr.setflags(write=False)

    @classmethod
    def standard(cls, dim: int) -> "AffineChart":
        """Chart x -> [x : 1] on P(R^{dim+1})."""
        f = np.zeros(dim + 1)
        f[-1] = 1.0
        return cls(f, np.vstack([np.eye(dim), np.zeros((1, dim))]))

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def representable(self, p) -> bool:
        u = _as_lift(p)
        return abs(float(self.functional @ u)) > TOL_PROJ

    def normalize(self, lift) -> np.ndarray:
        """Rescale lifts (rows or a single vector) so that functional = 1."""
        arr = np.asarray(lift, dtype=float)
        return arr / (arr @ self.functional)[..., None]

    def to_chart(self, p) -> np.ndarray:
        u = _as_lift(p) if isinstance(p, ProjPoint) else np.asarray(p, dtype=float)
        return (self.normalize(u) - self.origin) @ self.basis

    def from_chart(self, x) -> np.ndarray:
        """Lift with functional = 1 of chart coordinates (rows allowed)."""
        return self.origin + np.asarray(x, dtype=float) @ self.basis.T

    def point(self, x) -> ProjPoint:
        return ProjPoint(self.from_chart(x))

    def direction(self, u) -> np.ndarray:
        """Lift of a chart direction (lies in the kernel of the functional)."""
        return np.asarray(u, dtype=float) @ self.basis.T
