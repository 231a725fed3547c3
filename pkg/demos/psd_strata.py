"""Boundary ranks of chords in the cone of positive definite matrices.

Run from the repository root:  python3 demos/psd_strata.py
"""

import numpy as np

from hilbertflow.models import random_rotation
from hilbertflow.symcone import (a_flow_check, action_on_vector, basepoint, nonwandering_classify,
                                 psd_tangent, rank_one_chord_search, reduce_to_basepoint, stratum,
                                 stratum_campaign)

# A chord through the identity in direction diag(2, -1, -1) exits at ranks (2, 1).
v = psd_tangent(np.eye(3), np.diag([2.0, -1.0, -1.0]))
print("stratum of (I, diag(2, -1, -1)):", stratum(3, v).as_list())

for N in (3, 4):
    camp = stratum_campaign(N, 20_000, seed=N)
    print(f"N = {N}: labels {camp.counts}")
    print(f"  i + j < N or non-orthogonal kernels: {camp.violations}; "
          f"both ends rank one: {camp.rank_one_pairs}")
    search = rank_one_chord_search(N, 20_000, seed=N)
    print(f"  chords leaving a rank-one point: smallest opposite rank {search.min_other_rank}")

# Any vector in a stratum with i + j = N is a congruence image of the standard one.
rng = np.random.default_rng(1)
v0 = basepoint(4, 1)
v = action_on_vector(4, random_rotation(rng, 4) @ np.diag([1.0, 2.0, 0.5, 3.0]), v0)
red = reduce_to_basepoint(4, v)
print(f"reduction of a (1, 3) vector: residual {red.residual:.1e}")
nw = nonwandering_classify(4, v)
print(f"non-wandering: {nw.in_nw}, witness residual {nw.witness_residual:.1e}")

rep = a_flow_check(4, 1, np.linspace(-5, 5, 11))
print(f"diagonal flow vs geodesic flow: max gap {rep.vector_gaps.max():.1e}")
