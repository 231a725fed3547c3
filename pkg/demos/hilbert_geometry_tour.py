"""Distances, geodesics and stable rays in a disk, a triangle and the 3x3 psd cone.

Run from the repository root:  python3 demos/hilbert_geometry_tour.py
Writes two SVG scenes next to this file.
"""

from pathlib import Path

import numpy as np

from hilbertflow.domains import PsdCone, named_domain, svec
from hilbertflow.hilbert import distance, endpoints, flow, tangent_towards
from hilbertflow.render import render
from hilbertflow.stable import late_distance, sync_time
from hilbertflow.symcone import eigen_distance

HERE = Path(__file__).resolve().parent

disk, triangle = named_domain("disk"), named_domain("triangle")

# On the disk the Hilbert metric is the Klein model of the hyperbolic plane.
x, y = np.array([0.0, 0.0]), np.array([0.5, 0.0])
print(f"disk: d(0, 0.5) = {distance(disk, x, y):.12f}  vs artanh(0.5) = {np.arctanh(0.5):.12f}")

# Geodesics are straight chords; the flow moves at unit speed along them.
v = tangent_towards(disk, x, y)
for t in (0.5, 2.0, 8.0):
    moved = flow(disk, v, t)
    print(f"  flow t = {t:>4}: chart point {disk.chart.to_chart(moved.base)}, "
          f"distance travelled {distance(disk, v.base, moved.base):.12f}")
a, b = endpoints(disk, v)
print(f"  chord endpoints {disk.chart.to_chart(a.coords)} and {disk.chart.to_chart(b.coords)}")

# The triangle's metric is a hexagonal norm in log coordinates: not Riemannian.
p, q = triangle.sample_interior(np.random.default_rng(0), 2)
logs = np.log(q / p)
print(f"triangle: chord distance {distance(triangle, p, q):.12f}, "
      f"hexagonal norm {0.5 * (logs.max() - logs.min()):.12f}")

# Two rays into the same smooth boundary point become asymptotic after a time shift.
xi = np.array([1.0, 0.0])
v, w = tangent_towards(disk, [0.0, 0.0], xi), tangent_towards(disk, [0.2, 0.5], xi)
res = sync_time(disk, v, w)
print(f"disk rays into (1, 0): shift t0 = {res.t0:.6f}, "
      f"distance at t = 20 after shifting {late_distance(disk, v, flow(disk, w, res.t0), 20.0):.2e}")

# In the psd cone the chord formula agrees with generalized eigenvalues.
cone = PsdCone(3)
X, Y = np.diag([1.0, 2.0, 3.0]), np.array([[2.0, 0.5, 0.0], [0.5, 1.0, 0.2], [0.0, 0.2, 4.0]])
print(f"psd3: chord {distance(cone, svec(X), svec(Y)):.12f}, eigenvalues {eigen_distance(3, X, Y):.12f}")

for scene in ("chord", "stable"):
    path = HERE / f"{scene}_scene.svg"
    path.write_text(render(scene, disk), encoding="utf-8")
    print(f"wrote {path.name}")
