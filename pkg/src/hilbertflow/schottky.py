"""Free Schottky groups built from biproximal generators.

Words are tuples of letters; letter 2i stands for the i-th generator power
and 2i+1 for its inverse.  Products are formed together with their inverses
so the repelling data of long words never has to be read off a matrix whose
smallest singular value has underflowed.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import ceil

import numpy as np
from scipy.spatial import cKDTree

from .domains import ConvexDomain, Location, contains
from .dynamics import ProximalData, proximal_analysis
from .errors import (
    EmptyInput,
    ExhaustedTries,
    NoNFound,
    NoneFound,
    NotBiproximal,
    NotCertified,
    OverlappingNeighborhoods,
)
from .projective import TOL_PROJ, angle_distance, canonical_lift

IDENTITY_TOL = 1e-6


@dataclass
class GeneratorFamily:
    mats: list
    analyses: list = field(repr=False)

    @classmethod
    def from_matrices(cls, mats) -> "GeneratorFamily":
        mats = [np.asarray(m, dtype=float) for m in mats]
        if len(mats) < 2:
            raise ValueError("a family needs at least two generators")
        analyses = []
        for k, m in enumerate(mats):
            data = proximal_analysis(m)
            if not data.is_biproximal:
                raise NotBiproximal(f"generator {k} is not biproximal")
            analyses.append(data)
        return cls(mats, analyses)

    @property
    def k(self) -> int:
        return len(self.mats)

    @property
    def dim(self) -> int:
        return self.mats[0].shape[0]


# ----------------------------------------------------------------------------
# irreducibility


@dataclass
class IrreducibilityReport:
    holds: bool
    span: bool
    zero_meet: bool
    general_position: bool
    details: dict


def irreducibility_criterion(fam: GeneratorFamily, tol: float = 1e-10) -> IrreducibilityReport:
    """Rank tests for strong irreducibility of a biproximal family.

    (a) the attracting and repelling points span V;
    (b) the hyperplanes x0 intersect trivially;
    (c) no x_i^a lies in x_j^b + x_j^0 for i != j.
    """
    d = fam.dim
    pts = np.array([p for a in fam.analyses for p in (a.x_plus.coords, a.x_minus.coords)])
    s = np.linalg.svd(pts, compute_uv=False)
    span = bool(s.size >= d and s[d - 1] > tol)

    covs = np.array([c / np.linalg.norm(c) for a in fam.analyses for c in (a.w_plus, a.w_minus)])
    sc = np.linalg.svd(covs, compute_uv=False)
    zero_meet = bool(sc.size >= d and sc[d - 1] > tol)

    worst = np.inf
    for i, j in itertools.permutations(range(fam.k), 2):
        ai, aj = fam.analyses[i], fam.analyses[j]
        # x_j^+ + x_j^0 = ker w_j^-, x_j^- + x_j^0 = ker w_j^+
        for x in (ai.x_plus.coords, ai.x_minus.coords):
            for w in (aj.w_plus, aj.w_minus):
                worst = min(worst, abs(x @ w) / np.linalg.norm(w))
    general = bool(worst > tol)
    details = {"span_sigma_min": float(s[min(d, s.size) - 1]),
               "zero_meet_sigma_min": float(sc[min(d, sc.size) - 1]),
               "position_min_pairing": float(worst)}
    return IrreducibilityReport(span and zero_meet and general, span, zero_meet, general, details)


def extend_family(gamma1, conjugators, max_tries: int = 100, k: int = 2,
                  seed: int = 0) -> GeneratorFamily:
    """Grow gamma1 into a family of k conjugates passing the irreducibility test.

    ``conjugators`` is a callable rng -> invertible matrix.
    """
    gamma1 = np.asarray(gamma1, dtype=float)
    if not proximal_analysis(gamma1).is_biproximal:
        raise NotBiproximal("gamma1 must be biproximal")
    rng = np.random.default_rng(seed)
    mats = [gamma1]
    tries = 0
    while len(mats) < k:
        if tries >= max_tries:
            raise ExhaustedTries(f"no admissible conjugate after {max_tries} draws")
        tries += 1
        h = np.asarray(conjugators(rng), dtype=float)
        cand = h @ gamma1 @ np.linalg.inv(h)
        fam = GeneratorFamily.from_matrices(mats + [cand])
        if irreducibility_criterion(fam).holds:
            mats.append(cand)
    return GeneratorFamily.from_matrices(mats)


# ----------------------------------------------------------------------------
# words


def inverse_letter(letter: int) -> int:
    return letter ^ 1


def reduced_words(k: int, max_len: int, min_len: int = 1):
    """All freely reduced words of length min_len..max_len over 2k letters."""
    layer = [(a,) for a in range(2 * k)]
    for n in range(1, max_len + 1):
        if n >= min_len:
            yield from layer
        layer = [w + (a,) for w in layer for a in range(2 * k) if a != inverse_letter(w[-1])]


def cyclically_reduced(word) -> bool:
    return len(word) == 1 or word[0] != inverse_letter(word[-1])


class WordAlgebra:
    """Powers gamma_i^{+-N} and word products with their inverses."""

    def __init__(self, fam: GeneratorFamily, power: int):
        self.fam = fam
        self.power = power
        self.letters = []
        self.log_norms = []        # letter = exp(-log_norm) * true power
        for m in fam.mats:
            mn = m / np.linalg.norm(m, 2)
            p = np.linalg.matrix_power(mn, power)
            q = np.linalg.matrix_power(np.linalg.inv(mn), power)
            for mat in (p, q):
                norm = np.linalg.norm(mat, 2)
                self.letters.append(mat / norm)
                self.log_norms.append(float(np.log(norm)))

    def scaled_product(self, word):
        """(w, w_inv, log_scale, inv_log_scale) with exp(log_scale) * w the true product."""
        w = np.eye(self.fam.dim)
        winv = np.eye(self.fam.dim)
        ls = lsi = 0.0
        for a in word:
            w = w @ self.letters[a]
            winv = self.letters[inverse_letter(a)] @ winv
            ls += self.log_norms[a]
            lsi += self.log_norms[inverse_letter(a)]
            nw, ni = np.linalg.norm(w, 2), np.linalg.norm(winv, 2)
            w, winv = w / nw, winv / ni
            ls += np.log(nw)
            lsi += np.log(ni)
        return w, winv, ls, lsi

    def product(self, word):
        w, winv, _, _ = self.scaled_product(word)
        return w, winv

    def analysis(self, word) -> ProximalData:
        w, winv = self.product(word)
        return proximal_analysis(w, inverse=winv)

    def translation_length(self, word) -> float:
        """Half of log|top eigenvalue| of the word plus that of its inverse."""
        w, winv, ls, lsi = self.scaled_product(word)
        return 0.5 * float(_log_top_modulus(w) + ls + _log_top_modulus(winv) + lsi)


def _log_top_modulus(mats: np.ndarray) -> np.ndarray:
    return np.log(np.max(np.abs(np.linalg.eigvals(mats)), axis=-1))


# ----------------------------------------------------------------------------
# ping-pong certification


@dataclass
class Ball:
    label: str
    center: np.ndarray
    radius: float

    def distance(self, pts: np.ndarray) -> np.ndarray:
        """Angle distance from each unit row to the centre."""
        c = np.abs(pts @ self.center)
        s = np.linalg.norm(pts - np.outer(pts @ self.center, self.center), axis=1)
        return np.arctan2(s, c)

    def sample(self, rng, n: int) -> np.ndarray:
        """Centre plus n points on the boundary sphere of the ball."""
        d = self.center.size
        u = rng.standard_normal((n, d))
        u -= np.outer(u @ self.center, self.center)
        norms = np.linalg.norm(u, axis=1, keepdims=True)
        if np.any(norms < 1e-12):
            raise ValueError("sample direction parallel to the ball centre")
        u /= norms
        pts = np.cos(self.radius) * self.center + np.sin(self.radius) * u
        return np.vstack([self.center, pts])


@dataclass
class PingPongCertificate:
    family: GeneratorFamily
    N: int
    neighborhoods: list
    reference: Ball
    margin: float
    sample_count: int
    verdict: str
    witness: dict | None = None
    spot_checked: int = 0
    free_words: int = 0
    min_identity_distance: float = float("nan")

    @property
    def certified(self) -> bool:
        return self.verdict == "Certified"

    def ball(self, letter: int) -> Ball:
        """Neighbourhood of the attracting point of the letter's generator power."""
        return self.neighborhoods[letter]

    def require_certified(self):
        if not self.certified:
            raise NotCertified(f"certificate verdict is {self.verdict}")
        return self

    def to_json(self) -> dict:
        def hexmat(m):
            return [[float(x).hex() for x in row] for row in np.asarray(m)]

        def ball(b):
            return {"label": b.label, "center": [float(x).hex() for x in b.center],
                    "radius": float(b.radius).hex()}

        return {
            "generators": [hexmat(m) for m in self.family.mats],
            "N": self.N,
            "neighborhoods": [ball(b) for b in self.neighborhoods],
            "reference": ball(self.reference),
            "margin": float(self.margin).hex(),
            "sample_count": self.sample_count,
            "verdict": self.verdict,
            "witness": self.witness,
            "spot_checked": self.spot_checked,
            "free_words": self.free_words,
            "min_identity_distance": float(self.min_identity_distance).hex(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "PingPongCertificate":
        def unhex(v):
            return float.fromhex(v) if isinstance(v, str) else float(v)

        def ball(b):
            return Ball(b["label"], np.array([unhex(x) for x in b["center"]]), unhex(b["radius"]))

        mats = [np.array([[unhex(x) for x in row] for row in m]) for m in obj["generators"]]
        return cls(GeneratorFamily.from_matrices(mats), int(obj["N"]),
                   [ball(b) for b in obj["neighborhoods"]], ball(obj["reference"]),
                   unhex(obj["margin"]), int(obj["sample_count"]), obj["verdict"],
                   obj.get("witness"), int(obj.get("spot_checked", 0)),
                   int(obj.get("free_words", 0)),
                   unhex(obj.get("min_identity_distance", "nan")))


def _neighborhoods(fam: GeneratorFamily, radii) -> list:
    radii = np.broadcast_to(np.asarray(radii, dtype=float), (2 * fam.k,))
    balls = []
    for i, a in enumerate(fam.analyses):
        balls.append(Ball(f"U{i + 1}+", a.x_plus.coords.copy(), float(radii[2 * i])))
        balls.append(Ball(f"U{i + 1}-", a.x_minus.coords.copy(), float(radii[2 * i + 1])))
    return balls


def _hyperplane_angle(covector: np.ndarray, pts: np.ndarray) -> np.ndarray:
    c = covector / np.linalg.norm(covector)
    return np.arcsin(np.clip(np.abs(pts @ c), 0.0, 1.0))


def choose_reference(fam: GeneratorFamily, balls: list, grid: int = 4000, seed: int = 0) -> Ball:
    """A ball far from every neighbourhood and from every hyperplane x^a + x^0."""
    # own stream: sharing one with the ball samples can reproduce the centre as a sample direction
    rng = np.random.default_rng([seed, 1])
    pts = rng.standard_normal((grid, fam.dim))
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    clearance = np.full(grid, np.inf)
    for b in balls:
        clearance = np.minimum(clearance, b.distance(pts) - b.radius)
    for a in fam.analyses:
        for w in (a.w_plus, a.w_minus):
            clearance = np.minimum(clearance, _hyperplane_angle(w, pts))
    k = int(np.argmax(clearance))
    return Ball("U", canonical_lift(pts[k]), float(min(0.5 * clearance[k], 0.2)))


def _check_disjoint(balls: list, margin: float):
    for b1, b2 in itertools.combinations(balls, 2):
        gap = angle_distance(b1.center, b2.center)
        if gap < TOL_PROJ:
            raise NoNFound(f"{b1.label} and {b2.label} share a centre; no power separates them")
        if gap - b1.radius - b2.radius < margin:
            raise OverlappingNeighborhoods(f"{b1.label} and {b2.label} overlap")


def _images_inside(mat: np.ndarray, pts: np.ndarray, target: Ball, margin: float) -> float:
    img = pts @ mat.T
    img /= np.linalg.norm(img, axis=1, keepdims=True)
    excess = float(np.max(target.distance(img)) - (target.radius - margin))
    # NaN must read as a failed inclusion, never as a pass
    return excess if np.isfinite(excess) else np.inf


def identity_distance(w: np.ndarray) -> float:
    """Relative Frobenius distance from w to the nearest scalar matrix."""
    c = np.trace(w) / w.shape[0]
    return float(np.linalg.norm(w - c * np.eye(w.shape[0])) / np.linalg.norm(w))


def pingpong_certify(fam: GeneratorFamily, radii=0.2, samples: int = 200, seed: int = 0,
                     n_max: int = 32, margin: float = 1e-3, spot_checks: int = 100,
                     free_length: int = 6) -> PingPongCertificate:
    """Find the least N making gamma_i^{+-N} play ping-pong on angle balls.

    For each letter the source set is every neighbourhood except the one
    around the letter's repelling point, plus a reference ball.  Certified
    verdicts additionally pass a word spot-check and a short-word freeness
    check.
    """
    balls = _neighborhoods(fam, radii)
    _check_disjoint(balls, margin)
    reference = choose_reference(fam, balls, seed=seed)
    rng = np.random.default_rng(seed)
    sampled = [b.sample(rng, samples) for b in balls]
    ref_pts = reference.sample(rng, samples)
    n_points = sum(len(p) for p in sampled) + len(ref_pts)

    found = None
    for n in range(1, n_max + 1):
        alg = WordAlgebra(fam, n)
        worst = -np.inf
        for letter, mat in enumerate(alg.letters):
            src = [ref_pts] + [p for j, p in enumerate(sampled) if j != inverse_letter(letter)]
            worst = max(worst, _images_inside(mat, np.vstack(src), balls[letter], margin))
            if worst > 0:
                break
        if worst <= 0:
            found = n
            break
    if found is None:
        raise NoNFound(f"ping-pong inclusions fail for every N <= {n_max}")

    cert = PingPongCertificate(fam, found, balls, reference, margin, n_points, "Certified")
    alg = WordAlgebra(fam, found)

    # spot-check: random cyclically reduced words have endpoints in the predicted balls
    wrng = np.random.default_rng(seed + 1)
    checked = 0
    while checked < spot_checks:
        length = int(wrng.integers(1, 9))
        word = [int(wrng.integers(0, 2 * fam.k))]
        while len(word) < length:
            a = int(wrng.integers(0, 2 * fam.k))
            if a != inverse_letter(word[-1]):
                word.append(a)
        if not cyclically_reduced(word):
            continue
        checked += 1
        data = alg.analysis(word)
        ok = data.is_biproximal
        if ok:
            ok = (balls[word[0]].distance(data.x_plus.coords[None])[0] <= balls[word[0]].radius
                  and balls[inverse_letter(word[-1])].distance(data.x_minus.coords[None])[0]
                  <= balls[inverse_letter(word[-1])].radius)
        if not ok:
            cert.verdict = "Refuted"
            cert.witness = {"word": word, "biproximal": bool(data.is_biproximal)}
            cert.spot_checked = checked
            return cert
    cert.spot_checked = checked

    closest = np.inf
    count = 0
    for word in reduced_words(fam.k, free_length):
        w, _ = alg.product(word)
        closest = min(closest, identity_distance(w))
        count += 1
    cert.free_words = count
    cert.min_identity_distance = float(closest)
    if closest < IDENTITY_TOL:
        cert.verdict = "Refuted"
        cert.witness = {"near_identity": float(closest)}
    return cert


# ----------------------------------------------------------------------------
# length spectrum


@dataclass
class LengthSample:
    word: tuple
    length_value: float
    through_axis_hit: bool | None = None


def semigroup_words(k: int, anchor: int, max_len: int):
    """Words of length 1..max_len in the semigroup letters.

    Semigroup letter 0 is gamma_anchor^N; letter b > 0 is the anchor-padded
    gamma_anchor^N gamma_b^N gamma_anchor^N for the other generators b.
    """
    others = [b for b in range(k) if b != anchor]
    alphabet = [(2 * anchor,)] + [(2 * anchor, 2 * b, 2 * anchor) for b in others]
    for n in range(1, max_len + 1):
        for combo in itertools.product(range(len(alphabet)), repeat=n):
            yield tuple(itertools.chain.from_iterable(alphabet[c] for c in combo))


def _axis_hits(domain: ConvexDomain, data: ProximalData, centre, radius: float) -> bool:
    """Whether the chart segment of the axis inside the domain meets a chart ball."""
    chart = domain.chart
    a = domain.orient(data.x_plus.coords)[0]
    b = domain.orient(data.x_minus.coords)[0]
    if not (chart.representable(a) and chart.representable(b)):
        return False
    pa, pb = chart.to_chart(a), chart.to_chart(b)
    c = np.asarray(centre, dtype=float)
    seg = pb - pa
    t = np.clip((c - pa) @ seg / (seg @ seg), 0.0, 1.0)
    return bool(np.linalg.norm(pa + t * seg - c) < radius)


def semigroup_length_spectrum(cert: PingPongCertificate, anchor: int = 0, L: int = 1,
                              domain: ConvexDomain | None = None, target=None) -> list:
    """Translation lengths of the anchor-padded semigroup words up to length L.

    ``target`` = (chart centre, radius) describes the open set the axes
    should cross; it needs ``domain`` for the chart.
    """
    cert.require_certified()
    alg = WordAlgebra(cert.family, cert.N)
    out = []
    for word in semigroup_words(cert.family.k, anchor, L):
        ell = alg.translation_length(word)
        hit = None
        if domain is not None and target is not None:
            hit = _axis_hits(domain, alg.analysis(word), *target)
        out.append(LengthSample(word, ell, hit))
    return out


def group_gap(values, resolution: float | None = None, bound: int | None = None,
              zero_tol: float = 1e-9) -> float:
    """Smallest positive |n v_i + m v_j| with |n|, |m| <= B over all pairs.

    B = ceil(1/resolution) unless given directly.  The search is restricted to
    two-term combinations so it stays finite and is monotone under adding values.
    """
    vals = np.asarray(list(values), dtype=float)
    if vals.size == 0:
        raise EmptyInput("group_gap needs at least one value")
    if bound is None:
        bound = 50 if resolution is None else int(ceil(1.0 / resolution))
    best = float(np.min(np.abs(vals[np.abs(vals) > zero_tol]), initial=np.inf))
    coeffs = np.arange(-bound, bound + 1, dtype=float)
    n, m = np.meshgrid(coeffs, coeffs, indexing="ij")
    n, m = n.ravel(), m.ravel()
    uniq = np.unique(np.round(vals, 12))
    for i in range(uniq.size):
        combos = np.abs(n[:, None] * uniq[i] + m[:, None] * uniq[None, i + 1:])
        combos = combos[combos > zero_tol]
        if combos.size:
            best = min(best, float(combos.min()))
    return best


def max_gap_mod(ratio: float, count: int) -> float:
    """Largest gap between the points k*ratio mod 1, k = 0..count, on the circle."""
    pts = np.sort(np.mod(np.arange(count + 1) * ratio, 1.0))
    gaps = np.diff(np.concatenate([pts, [pts[0] + 1.0]]))
    return float(gaps.max())


def epsilon_dense_generator(x: float, eps: float, A, max_points: int = 1 << 20) -> float:
    """Some g in A with xZ + gZ eps-dense: every gap in [0, x] is at most eps.

    The orbit k*g/x mod 1 has at most three gap lengths, so doubling the
    number of points until the largest gap drops below eps/x is enough.
    """
    A = list(A)
    if not A:
        raise EmptyInput("A must be nonempty")
    if not (x > 0 and eps > 0):
        raise ValueError("x and eps must be positive")
    target = eps / x
    for g in A:
        ratio = float(np.mod(g / x, 1.0))
        count = 8
        while count <= max_points:
            if max_gap_mod(ratio, count) <= target:
                return g
            count *= 2
    raise NoneFound(f"no element of A makes xZ + gZ {eps}-dense within {max_points} points")


# ----------------------------------------------------------------------------
# limit set


@dataclass
class LimitSetSample:
    points: np.ndarray
    depth: int
    on_boundary: bool | None = None
    drift: float | None = None


def _symmetric_tree(points: np.ndarray) -> cKDTree:
    return cKDTree(np.vstack([points, -points]))


def hausdorff_projective(p: np.ndarray, q: np.ndarray) -> float:
    """Hausdorff distance between two finite sets of unit lifts (chordal, sign-free)."""
    d1 = _symmetric_tree(q).query(p)[0].max()
    d2 = _symmetric_tree(p).query(q)[0].max()
    return float(max(d1, d2))


def limit_set_sample(cert: PingPongCertificate, depth: int,
                     domain: ConvexDomain | None = None) -> LimitSetSample:
    """Attracting points of the cyclically reduced words of length <= depth.

    The drift is the Hausdorff distance between the sample and its image
    under the first generator power, a proxy for invariance of the limit set.
    """
    cert.require_certified()
    alg = WordAlgebra(cert.family, cert.N)
    k = cert.family.k
    letters = np.array(alg.letters)
    words = [(a,) for a in range(2 * k)]
    mats = letters.copy()
    chunks = []
    for n in range(1, depth + 1):
        # conjugated words u v u^-1 have ill-conditioned top eigenlines and
        # contribute nothing new, so only cyclically reduced words are read
        keep = np.array([cyclically_reduced(w) for w in words])
        vals, vecs = np.linalg.eig(mats[keep])
        top = np.argmax(np.abs(vals), axis=1)
        v = vecs[np.arange(len(vals)), :, top]
        phase = v[np.arange(len(v)), np.argmax(np.abs(v), axis=1)]
        v = (v / phase[:, None]).real
        chunks.append(v / np.linalg.norm(v, axis=1, keepdims=True))
        if n == depth:
            break
        nxt_words, nxt_mats = [], []
        for w, m in zip(words, mats):
            for a in range(2 * k):
                if a != inverse_letter(w[-1]):
                    p = m @ letters[a]
                    nxt_words.append(w + (a,))
                    nxt_mats.append(p / np.linalg.norm(p, 2))
        words, mats = nxt_words, np.array(nxt_mats)
    pts = np.vstack(chunks)
    pts = np.array([canonical_lift(p) for p in pts])

    on_boundary = None
    if domain is not None:
        on_boundary = all(contains(domain, p) is Location.BOUNDARY for p in pts)
    img = pts @ letters[0].T
    img /= np.linalg.norm(img, axis=1, keepdims=True)
    return LimitSetSample(pts, depth, on_boundary, hausdorff_projective(img, pts))
