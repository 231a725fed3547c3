"""Certify a two-generator Schottky group acting on the disk and watch its length spectrum fill in.

Run from the repository root:  python3 demos/schottky_spectrum.py
"""

import numpy as np

from hilbertflow.domains import named_domain
from hilbertflow.dynamics import translation_length
from hilbertflow.models import schottky_pair
from hilbertflow.schottky import (GeneratorFamily, group_gap, limit_set_sample, pingpong_certify,
                                  semigroup_length_spectrum)
from hilbertflow.stable import mixing_witness

g1, g2 = schottky_pair()
print(f"translation lengths: g1 {translation_length(g1):.6f}, g2 {translation_length(g2):.6f}")

cert = pingpong_certify(GeneratorFamily.from_matrices([g1, g2]))
print(f"ping-pong verdict {cert.verdict} with power N = {cert.N}; "
      f"{cert.spot_checked} random words checked, {cert.free_words} short words are not the identity")

# Lengths of longer semigroup words: their additive group gets denser as L grows.
for L in range(1, 6):
    lengths = [s.length_value for s in semigroup_length_spectrum(cert, L=L)]
    print(f"  L = {L}: {len(lengths):>4} lengths, group gap {group_gap(lengths, bound=50):.4f}")

sample = limit_set_sample(cert, depth=6, domain=named_domain("disk"))
pts = np.asarray(sample.points)
print(f"limit set sample: {len(pts)} attracting points, drift under g1^N {sample.drift:.2e}")

rep = mixing_witness(named_domain("disk"), cert, 0, 1, eps=0.05)
print(f"mixing witness: entry powers {rep.n0_first} and {rep.n0_second}, "
      f"window gap {rep.window_gap:.4f}, passed {rep.passed}")
