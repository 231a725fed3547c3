"""Explicit automorphisms of the standard domains.

Hyperbolic isometries of the Klein model (as elements of SO(n,1)), positive
diagonal maps of simplices and congruences of positive-definite matrices are
enough to populate the automorphism test matrix used across the suites.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import block_diag

from .domains import (
    ConeSum,
    ConvexDomain,
    Ellipsoid,
    PolytopeH,
    PsdCone,
    Simplex,
    congruence_matrix,
    unit_square,
)


def lorentz_form(dim: int) -> np.ndarray:
    j = np.eye(dim + 1)
    j[-1, -1] = -1.0
    return j


def boost(s: float, dim: int = 2, axis: int = 0) -> np.ndarray:
    """Hyperbolic translation of length s along a coordinate axis through the centre."""
    g = np.eye(dim + 1)
    c, sh = np.cosh(s), np.sinh(s)
    g[axis, axis] = c
    g[-1, -1] = c
    g[axis, -1] = sh
    g[-1, axis] = sh
    return g


def rotation(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def ideal_point(angle: float) -> np.ndarray:
    """Null vector of the Lorentz form over the boundary point at ``angle``."""
    return np.array([np.cos(angle), np.sin(angle), 1.0])


def hyperbolic_element(attract: float, repel: float, s: float) -> np.ndarray:
    """Disk isometry with x+ at angle ``attract``, x- at angle ``repel``, eigenvalues e^s, 1, e^-s."""
    j = lorentz_form(2)
    p = ideal_point(attract)
    q = ideal_point(repel)
    if abs(p @ j @ q) < 1e-12:
        raise ValueError("attracting and repelling points coincide")
    n = np.cross(j @ p, j @ q)      # J-orthogonal to both null vectors
    proj_p = np.outer(p, j @ q) / (q @ j @ p)
    proj_q = np.outer(q, j @ p) / (p @ j @ q)
    proj_n = np.outer(n, j @ n) / (n @ j @ n)
    return np.exp(s) * proj_p + np.exp(-s) * proj_q + proj_n


def diagonal_map(*entries) -> np.ndarray:
    return np.diag(np.asarray(entries, dtype=float))


def psd_congruence(a) -> np.ndarray:
    """The linear map X -> a X a^T on svec coordinates."""
    return congruence_matrix(a)


def cone_sum_map(left, right) -> np.ndarray:
    return block_diag(np.asarray(left, dtype=float), np.asarray(right, dtype=float))


@dataclass
class AutomorphismCase:
    name: str
    domain: ConvexDomain
    g: np.ndarray
    rank_one: bool


def _distinct_positive(rng, k: int, spread: float = 2.0) -> np.ndarray:
    """k positive numbers whose logs are pairwise at least 0.1 apart, sorted descending."""
    while True:
        logs = np.sort(rng.uniform(-spread, spread, k))[::-1]
        if k < 2 or np.min(-np.diff(logs)) > 0.1:
            return np.exp(logs)


def random_rotation(rng, n: int) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def _same_rows(a: np.ndarray, b: np.ndarray) -> bool:
    if a.shape != b.shape:
        return False
    return bool(np.allclose(a[np.lexsort(a.T)], b[np.lexsort(b.T)]))


def random_automorphism(domain: ConvexDomain, rng) -> np.ndarray | None:
    """A random element of Aut(domain) when an explicit family is known, else None."""
    if isinstance(domain, Ellipsoid):
        n = domain.dim
        rot = block_diag(random_rotation(rng, n), [[1.0]])
        spin = block_diag(random_rotation(rng, n), [[1.0]])
        return spin @ rot @ boost(rng.uniform(0.0, 2.0), dim=n) @ rot.T
    if isinstance(domain, Simplex):
        return np.diag(np.exp(rng.uniform(-2.0, 2.0, domain.ambient_dim)))
    if isinstance(domain, PsdCone):
        a = rng.standard_normal((domain.n, domain.n)) + 2.0 * np.eye(domain.n)
        return congruence_matrix(a)
    if isinstance(domain, PolytopeH) and _same_rows(domain.facets, unit_square().facets):
        # the dihedral symmetries of the square
        k = int(rng.integers(4))
        c, s = np.cos(k * np.pi / 2), np.sin(k * np.pi / 2)
        flip = np.diag([1.0, float(rng.choice([-1.0, 1.0])), 1.0])
        return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]]) @ flip
    return None


def schottky_pair(s1: float = 1.0, s2: float = float(np.sqrt(2.0))):
    """Two disk isometries with disjoint axes: a right chord and a left chord.

    Distinct translation lengths keep the additive group they generate dense.
    """
    g1 = hyperbolic_element(np.pi / 4, -np.pi / 4, s1)
    g2 = hyperbolic_element(3 * np.pi / 4, 5 * np.pi / 4, s2)
    return g1, g2


def automorphism_matrix(per_domain: int = 9, seed: int = 7) -> list[AutomorphismCase]:
    """Domain/automorphism pairs with a known rank-one verdict.

    A few hand-picked cases plus ``per_domain`` random biproximal
    automorphisms of each test domain.
    """
    rng = np.random.default_rng(seed)
    cases = [
        AutomorphismCase("disk/boost", Ellipsoid(2), boost(0.8), True),
        AutomorphismCase("ball/boost", Ellipsoid(3), boost(0.5, dim=3, axis=1), True),
        AutomorphismCase("triangle/diag", Simplex(2), diagonal_map(4, 2, 1), False),
        AutomorphismCase("tetrahedron/diag", Simplex(3), diagonal_map(5, 3, 2, 1), False),
        AutomorphismCase("psd2/congruence", PsdCone(2), psd_congruence(np.diag([2.0, 0.5])), True),
        AutomorphismCase("psd3/congruence", PsdCone(3), psd_congruence(np.diag([2.0, 1.0, 0.5])), False),
        AutomorphismCase("disk+ray/boost", ConeSum(Ellipsoid(2), Simplex(0)),
                         cone_sum_map(boost(0.7), [[1.0]]), False),
    ]
    disk, ball, tri, tet = Ellipsoid(2), Ellipsoid(3), Simplex(2), Simplex(3)
    psd3, psd2, disk_ray = PsdCone(3), PsdCone(2), ConeSum(Ellipsoid(2), Simplex(0))
    for k in range(per_domain):
        a, b = rng.uniform(0, 2 * np.pi, 2)
        if abs(np.angle(np.exp(1j * (a - b)))) < 0.2:
            b = a + np.pi
        s = rng.uniform(0.2, 2.0)
        cases.append(AutomorphismCase(f"disk/random-{k}", disk, hyperbolic_element(a, b, s), True))

        rot = block_diag(random_rotation(rng, 3), [[1.0]])
        g = rot @ boost(rng.uniform(0.2, 2.0), dim=3) @ rot.T
        cases.append(AutomorphismCase(f"ball/random-{k}", ball, g, True))

        perm = rng.permutation(3)
        cases.append(AutomorphismCase(f"triangle/random-{k}", tri,
                                      np.diag(_distinct_positive(rng, 3)[perm]), False))
        perm = rng.permutation(4)
        cases.append(AutomorphismCase(f"tetrahedron/random-{k}", tet,
                                      np.diag(_distinct_positive(rng, 4)[perm]), False))

        q = random_rotation(rng, 3)
        a3 = q @ np.diag(_distinct_positive(rng, 3, 1.0)) @ q.T
        cases.append(AutomorphismCase(f"psd3/random-{k}", psd3, psd_congruence(a3), False))

        q = random_rotation(rng, 2)
        a2 = q @ np.diag(_distinct_positive(rng, 2, 1.0)) @ q.T
        cases.append(AutomorphismCase(f"psd2/random-{k}", psd2, psd_congruence(a2), True))

        h = hyperbolic_element(*rng.uniform(0, 2 * np.pi, 2), rng.uniform(0.2, 1.5))
        scale = float(np.exp(rng.uniform(-3.0, 3.0)))
        cases.append(AutomorphismCase(f"disk+ray/random-{k}", disk_ray,
                                      cone_sum_map(h, [[scale]]), False))
    return cases
