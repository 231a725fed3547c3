"""The projectivized cone of positive-definite symmetric matrices.

Tangent vectors over PsdCone(N) are classified by the ranks (i, j) of their
backward and forward chord endpoints.  Along a chord X + tD the endpoints are
where the extreme generalized eigenvalues of (D, X) get cancelled, so

    i = N - mult(mu_max),   j = N - mult(mu_min)

and the endpoint kernels are the corresponding generalized eigenspaces.  The
module computes the labels numerically from the endpoint matrices (with a
loud ambiguity band), builds the base vectors v_{i,N-i}, reduces vectors of
the stratum i + j = N to them by explicit congruences, and checks that the
diagonal one-parameter group acts as the geodesic flow on v_{i,N-i}.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .domains import PsdCone, chord, congruence_matrix, smat, svec
from .errors import (
    BadIndex,
    CrosscheckMismatch,
    NotPositiveDefinite,
    RankAmbiguous,
    WrongStratum,
)
from .hilbert import TangentVector, chart_gap, distance, flow, transform_vector
from .projective import ProjPoint

RANK_TOL = 1e-9
AMBIGUITY = 10.0
ROUND_TRIP_TOL = 1e-8


@dataclass(frozen=True)
class StratumLabel:
    i: int
    j: int

    def as_list(self) -> list[int]:
        return [self.i, self.j]


# ----------------------------------------------------------------------------
# matrices, JSON and tangent vectors


def sym_to_json(mat) -> list[float]:
    """Row-major upper triangle, unscaled."""
    m = np.asarray(mat, dtype=float)
    rows, cols = np.triu_indices(m.shape[0])
    return [float(x) for x in m[rows, cols]]


def sym_from_json(values, n: int | None = None) -> np.ndarray:
    vals = np.asarray(values, dtype=float)
    if n is None:
        n = int(round((np.sqrt(8 * vals.size + 1) - 1) / 2))
    if vals.size != n * (n + 1) // 2:
        raise ValueError(f"expected {n * (n + 1) // 2} upper-triangle entries, got {vals.size}")
    out = np.zeros((n, n))
    rows, cols = np.triu_indices(n)
    out[rows, cols] = vals
    out[cols, rows] = vals
    return out


def _cholesky(mat) -> np.ndarray:
    m = np.asarray(mat, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or not np.allclose(m, m.T, atol=1e-12):
        raise NotPositiveDefinite("expected a symmetric square matrix")
    try:
        return np.linalg.cholesky(m)
    except np.linalg.LinAlgError:
        raise NotPositiveDefinite("matrix is not positive definite") from None


def psd_tangent(X, D) -> TangentVector:
    """Tangent vector over PsdCone(N) at [X] along the line X + tD."""
    X = np.asarray(X, dtype=float)
    D = np.asarray(D, dtype=float)
    _cholesky(X)
    dom = PsdCone(X.shape[0])
    # derivative of the trace-normalized curve at t = 0
    lift = svec(D - np.trace(D) / np.trace(X) * X)
    u = lift @ dom.chart.basis
    return TangentVector(ProjPoint(svec(X)), u)


def footpoint_matrix(v: TangentVector) -> np.ndarray:
    lift = v.base.coords
    mat = smat(lift)
    return mat / np.trace(mat)


def endpoint_matrices(N: int, v: TangentVector):
    """Backward and forward chord endpoints as trace-one PSD matrices."""
    dom = PsdCone(N)
    c = chord(dom, v.base, v.direction)
    out = []
    for t in (c.t_minus, c.t_plus):
        if not np.isfinite(t):
            raise CrosscheckMismatch("PsdCone chords are bounded")
        m = smat(c.base + t * c.direction)
        out.append(m / np.trace(m))
    return out[0], out[1]


def action_on_vector(N: int, g, v: TangentVector) -> TangentVector:
    """Image of v under the congruence X -> g X g^T."""
    return transform_vector(PsdCone(N), congruence_matrix(g), v)


# ----------------------------------------------------------------------------
# ranks and strata


def numerical_rank(mat, tol: float = RANK_TOL) -> int:
    """Rank with the relative threshold tol * top eigenvalue; RankAmbiguous near it."""
    vals = np.linalg.eigvalsh(np.asarray(mat, dtype=float))
    top = max(vals[-1], 0.0)
    thr = tol * top
    mags = np.abs(vals)
    if np.any((mags > thr / AMBIGUITY) & (mags < thr * AMBIGUITY)):
        raise RankAmbiguous(f"eigenvalue within a factor {AMBIGUITY:g} of the rank threshold")
    return int(np.sum(vals > thr))


def _kernel(mat, rank: int) -> np.ndarray:
    _, vecs = np.linalg.eigh(mat)
    return vecs[:, : mat.shape[0] - rank]


@dataclass
class StratumReport:
    label: StratumLabel
    rank_sum_ok: bool
    kernels_transverse: bool
    kernel_overlap: float
    kernels_orthogonal: bool | None


def stratum_report(N: int, v: TangentVector, tol: float = RANK_TOL) -> StratumReport:
    back, fwd = endpoint_matrices(N, v)
    i, j = numerical_rank(back, tol), numerical_rank(fwd, tol)
    ka, kb = _kernel(back, i), _kernel(fwd, j)
    both = np.hstack([ka, kb])
    if both.shape[1] == 0:
        transverse = True
    elif both.shape[1] > N:
        transverse = False
    else:
        transverse = bool(np.linalg.svd(both, compute_uv=False)[-1] > 1e-6)
    overlap = 0.0
    orthogonal = None
    if i + j == N:
        # the kernels are eigenspaces of (D, X): orthogonal for the footpoint's inner product
        x = footpoint_matrix(v)
        scale = np.sqrt(np.einsum("ik,ij,jk->k", ka, x, ka))[:, None] * \
            np.sqrt(np.einsum("ik,ij,jk->k", kb, x, kb))[None, :]
        overlap = float(np.max(np.abs(ka.T @ x @ kb) / scale))
        orthogonal = overlap < 1e-7
    return StratumReport(StratumLabel(i, j), i + j >= N, transverse, overlap, orthogonal)


def stratum(N: int, v: TangentVector, tol: float = RANK_TOL) -> StratumLabel:
    """Ranks (i, j) of the backward and forward endpoints of v's chord."""
    rep = stratum_report(N, v, tol)
    if not rep.rank_sum_ok or not rep.kernels_transverse or rep.kernels_orthogonal is False:
        raise CrosscheckMismatch(
            f"chord with ranks {rep.label.as_list()} breaks the stratum structure "
            f"(overlap {rep.kernel_overlap:.3g})")
    return rep.label


@dataclass
class StratumCampaign:
    N: int
    samples: int
    counts: dict
    violations: int
    ambiguous: int
    max_kernel_overlap: float
    rank_one_pairs: int


def _random_chords(rng, N: int, samples: int, structured: float):
    """Random footpoints X and directions D; a fraction with repeated extreme eigenvalues."""
    a = rng.standard_normal((samples, N, N))
    X = a @ np.swapaxes(a, 1, 2) + 0.05 * np.eye(N)
    L = np.linalg.cholesky(X)
    mu = rng.standard_normal((samples, N))
    k = int(structured * samples)
    if k:
        # eigenvalues drawn from {-1, 0, 1}, forcing repeated extremes
        mu[:k] = rng.integers(-1, 2, (k, N)).astype(float)
        mu[:k, 0], mu[:k, 1] = -1.0, 1.0
    q, r = np.linalg.qr(rng.standard_normal((samples, N, N)))
    M = q @ (mu[:, :, None] * np.swapaxes(q, 1, 2))
    D = L @ M @ np.swapaxes(L, 1, 2)
    # chart-normalize: shifting D by a multiple of X keeps the eigenvalue multiplicities
    tr = np.trace(X, axis1=1, axis2=2)[:, None, None]
    D = D - np.trace(D, axis1=1, axis2=2)[:, None, None] / tr * X
    return X / tr, D / tr


def stratum_campaign(N: int, samples: int, seed: int = 0, structured: float = 0.5,
                     tol: float = RANK_TOL) -> StratumCampaign:
    """Labels of random chords; counts violations of i + j >= N and of kernel orthogonality."""
    rng = np.random.default_rng(seed)
    X, D = _random_chords(rng, N, samples, structured)
    dom = PsdCone(N)
    lo, hi = dom.intervals(svec(X), svec(D))
    ends = [X + t[:, None, None] * D for t in (lo, hi)]
    ranks, kernels, amb = [], [], np.zeros(samples, dtype=bool)
    for e in ends:
        e = e / np.trace(e, axis1=1, axis2=2)[:, None, None]
        vals, vecs = np.linalg.eigh(e)
        thr = tol * np.maximum(vals[:, -1], 0.0)[:, None]
        mags = np.abs(vals)
        amb |= np.any((mags > thr / AMBIGUITY) & (mags < thr * AMBIGUITY), axis=1)
        ranks.append(np.sum(vals > thr, axis=1))
        kernels.append(vecs)
    i, j = ranks
    bad = (i + j < N) | (i < 1) | (j < 1)
    overlap = np.zeros(samples)
    for r in range(1, N):
        sel = np.flatnonzero((i == r) & (j == N - r) & ~amb)
        if sel.size == 0:
            continue
        ka = kernels[0][sel][:, :, : N - r]
        kb = kernels[1][sel][:, :, : r]
        x = X[sel] / np.trace(X[sel], axis1=1, axis2=2)[:, None, None]
        na = np.sqrt(np.einsum("sik,sij,sjk->sk", ka, x, ka))
        nb = np.sqrt(np.einsum("sik,sij,sjk->sk", kb, x, kb))
        cross = np.einsum("sia,sij,sjb->sab", ka, x, kb) / (na[:, :, None] * nb[:, None, :])
        overlap[sel] = np.max(np.abs(cross), axis=(1, 2))
    bad |= overlap > 1e-7
    bad &= ~amb
    counts: dict = {}
    for a_, b_ in zip(i[~amb], j[~amb]):
        key = f"{a_},{b_}"
        counts[key] = counts.get(key, 0) + 1
    rank_one = int(np.sum((i == 1) & (j == 1) & ~amb))
    return StratumCampaign(N, samples, dict(sorted(counts.items())), int(bad.sum()),
                           int(amb.sum()), float(overlap.max(initial=0.0)), rank_one)


# ----------------------------------------------------------------------------
# base vectors and the diagonal flow


def basepoint_endpoints(N: int, i: int):
    """Orthogonal projectors onto R^i x {0} and {0} x R^{N-i}."""
    top = np.arange(N) < i
    return np.diag(top.astype(float)), np.diag((~top).astype(float))


def basepoint(N: int, i: int) -> TangentVector:
    """v_{i,N-i}: footpoint [I], running from [diag(I_i, 0)] to [diag(0, I_{N-i})]."""
    if not (isinstance(N, (int, np.integer)) and N >= 2 and 1 <= i <= N - 1):
        raise BadIndex(f"need 1 <= i <= N-1, got N={N}, i={i}")
    back, fwd = basepoint_endpoints(N, i)
    v = psd_tangent(np.eye(N), fwd / (N - i) - back / i)
    got_b, got_f = endpoint_matrices(N, v)
    if (np.abs(got_b - back / i).max() > ROUND_TRIP_TOL
            or np.abs(got_f - fwd / (N - i)).max() > ROUND_TRIP_TOL):
        raise CrosscheckMismatch("base vector endpoints are not the coordinate projectors")
    return v


def a_matrix(N: int, i: int, t: float) -> np.ndarray:
    """Diagonal element whose congruence action moves v_{i,N-i} forward by t."""
    return np.diag(np.r_[np.full(i, np.exp(-t / 2)), np.full(N - i, np.exp(t / 2))])


@dataclass
class AFlowReport:
    times: np.ndarray
    vector_gaps: np.ndarray
    distance_errors: np.ndarray
    tol: float

    @property
    def passed(self) -> bool:
        return bool(np.all(self.vector_gaps < self.tol) and np.all(self.distance_errors < self.tol))


def a_flow_check(N: int, i: int, times, tol: float = 1e-9) -> AFlowReport:
    """Compare a_t . v_{i,N-i} with flow(v_{i,N-i}, t), and d([I], a_t [I]) with |t|."""
    v = basepoint(N, i)
    dom = PsdCone(N)
    times = np.atleast_1d(np.asarray(times, dtype=float))
    eye = svec(np.eye(N))
    gaps, errs = [], []
    for t in times:
        a = a_matrix(N, i, t)
        moved = action_on_vector(N, a, v)
        gaps.append(chart_gap(dom, moved, flow(dom, v, t)))
        errs.append(abs(distance(dom, eye, svec(a @ a)) - abs(t)))
    return AFlowReport(times, np.array(gaps), np.array(errs), tol)


# ----------------------------------------------------------------------------
# reduction to the base vector


@dataclass
class Reduction:
    g: np.ndarray
    label: StratumLabel
    footpoint_gap: float
    backward_gap: float
    forward_gap: float

    @property
    def residual(self) -> float:
        return max(self.footpoint_gap, self.backward_gap, self.forward_gap)


def _inv_sqrt(mat) -> np.ndarray:
    vals, vecs = np.linalg.eigh(mat)
    return (vecs / np.sqrt(vals)) @ vecs.T


def reduce_to_basepoint(N: int, v: TangentVector, tol: float = ROUND_TRIP_TOL) -> Reduction:
    """Congruence g with g . v = v_{i,N-i}, for v in the stratum i + j = N.

    First X^{-1/2} moves the footpoint to [I]; then a rotation takes the
    kernel of the backward endpoint onto {0} x R^{N-i}.
    """
    label = stratum(N, v)
    if label.i + label.j != N:
        raise WrongStratum(f"stratum {label.as_list()} has i + j > N")
    i = label.i
    g1 = _inv_sqrt(footpoint_matrix(v))
    back, _ = endpoint_matrices(N, action_on_vector(N, g1, v))
    _, vecs = np.linalg.eigh(back)
    # columns: range of the backward endpoint, then its kernel
    q = np.hstack([vecs[:, N - i:], vecs[:, : N - i]])
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    g = q.T @ g1
    g = g / np.abs(np.linalg.det(g)) ** (1.0 / N)

    image = action_on_vector(N, g, v)
    target_b, target_f = basepoint_endpoints(N, i)
    got_b, got_f = endpoint_matrices(N, image)
    red = Reduction(
        g, label,
        float(np.abs(footpoint_matrix(image) - np.eye(N) / N).max()),
        float(np.abs(got_b - target_b / i).max()),
        float(np.abs(got_f - target_f / (N - i)).max()),
    )
    if red.residual > tol:
        raise CrosscheckMismatch(f"reduction residual {red.residual:.3g} exceeds {tol:g}")
    return red


# ----------------------------------------------------------------------------
# distances and the non-wandering set


def eigen_distance(N: int, X, Y) -> float:
    """1/2 log(lambda_max / lambda_min) of X^{-1} Y."""
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    if X.shape != (N, N) or Y.shape != (N, N):
        raise ValueError(f"expected {N}x{N} matrices")
    low = _cholesky(X)
    _cholesky(Y)
    half = np.linalg.solve(low, Y)
    w = np.linalg.solve(low, half.T)
    lam = np.linalg.eigvalsh(0.5 * (w + w.T))
    return 0.5 * float(np.log(lam[-1] / lam[0]))


@dataclass
class NonWandering:
    in_nw: bool
    label: StratumLabel
    witness: np.ndarray | None = None
    witness_residual: float | None = None
    details: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        out = {"InNW": self.in_nw, "stratum": self.label.as_list()}
        if self.witness is not None:
            out["witness"] = [[float(x) for x in row] for row in self.witness]
            out["witness_residual"] = self.witness_residual
        return out


def nonwandering_classify(N: int, v: TangentVector, check_times=(1.0, -2.0)) -> NonWandering:
    """v is non-wandering iff i + j = N; the witness conjugates the diagonal flow onto v's orbit.

    For i + j = N the reduction g gives g^{-1} a_t g . v = phi_t v, an unbounded
    one-parameter group preserving the orbit; its residual is reported.
    """
    label = stratum(N, v)
    if label.i + label.j != N:
        return NonWandering(False, label)
    red = reduce_to_basepoint(N, v)
    dom = PsdCone(N)
    ginv = np.linalg.inv(red.g)
    worst = 0.0
    for t in check_times:
        h = ginv @ a_matrix(N, label.i, t) @ red.g
        worst = max(worst, chart_gap(dom, action_on_vector(N, h, v), flow(dom, v, t)))
    return NonWandering(True, label, red.g, worst, {"reduction_residual": red.residual})


@dataclass
class RankOneSearch:
    N: int
    samples: int
    found: int
    min_other_rank: int


def rank_one_chord_search(N: int, samples: int, seed: int = 0) -> RankOneSearch:
    """Chords starting at a random rank-one matrix: count those ending at rank one.

    Lifts are trace-normalized, so the chord parameters are finite and the
    backward endpoint sits at t = -1.
    """
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((samples, N, N))
    X = a @ np.swapaxes(a, 1, 2) + 0.05 * np.eye(N)
    X /= np.trace(X, axis1=1, axis2=2)[:, None, None]
    u = rng.standard_normal((samples, N))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    P = u[:, :, None] * u[:, None, :]
    dom = PsdCone(N)
    D = X - P
    lo, hi = dom.intervals(svec(X), svec(D))
    fwd = X + hi[:, None, None] * D
    back = X + lo[:, None, None] * D
    ranks = []
    for e in (back, fwd):
        vals = np.linalg.eigvalsh(e / np.trace(e, axis1=1, axis2=2)[:, None, None])
        ranks.append(np.sum(vals > RANK_TOL * vals[:, -1:], axis=1))
    found = int(np.sum((ranks[0] == 1) & (ranks[1] == 1)))
    return RankOneSearch(N, samples, found, int(ranks[1].min()))
