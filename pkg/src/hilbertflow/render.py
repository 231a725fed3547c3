"""Static SVG scenes for planar domains.

Output is plain text built by hand: fixed 1000x1000 viewBox, inline
presentation attributes, coordinates rounded to two decimals, so identical
inputs give byte-identical files.
"""

from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

from .domains import ConvexDomain, Location, PolyhedralDomain, contains, named_domain
from .errors import NotPlanar
from .hilbert import endpoints, flow, tangent_towards
from .models import schottky_pair
from .projective import ProjPoint
from .schottky import GeneratorFamily, pingpong_certify
from .stable import sync_time

SIZE = 1000
PAD = 80
BOUNDARY_SAMPLES = 720


class Canvas:
    """Collects SVG elements in chart coordinates and maps them into the viewBox."""

    def __init__(self, outline: np.ndarray):
        lo, hi = outline.min(axis=0), outline.max(axis=0)
        self.centre = 0.5 * (lo + hi)
        self.scale = (SIZE - 2 * PAD) / float(max(hi - lo))
        self.items: list[str] = []

    def xy(self, p) -> tuple[str, str]:
        p = np.asarray(p, dtype=float)
        x = SIZE / 2 + self.scale * (p[0] - self.centre[0])
        y = SIZE / 2 - self.scale * (p[1] - self.centre[1])
        return f"{x:.2f}", f"{y:.2f}"

    def polygon(self, pts, ident: str, fill="#eef3fb", stroke="#1f3b73"):
        coords = " ".join(",".join(self.xy(p)) for p in pts)
        self.items.append(f'<polygon id="{ident}" points="{coords}" fill="{fill}" '
                          f'stroke="{stroke}" stroke-width="3"/>')

    def line(self, p, q, ident: str, stroke="#333333", dash: str | None = None, width=2):
        (x1, y1), (x2, y2) = self.xy(p), self.xy(q)
        extra = f' stroke-dasharray="{dash}"' if dash else ""
        self.items.append(f'<line id="{ident}" x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" '
                          f'stroke="{stroke}" stroke-width="{width}"{extra}/>')

    def point(self, p, label: str, colour="#b22222"):
        x, y = self.xy(p)
        ident = "point-" + "".join(c if c.isalnum() else "_" for c in label)
        self.items.append(f'<circle class="point" id="{ident}" cx="{x}" cy="{y}" r="7" '
                          f'fill="{colour}"/>')
        self.items.append(f'<text class="label" x="{float(x) + 12:.2f}" y="{float(y) - 12:.2f}" '
                          f'font-family="sans-serif" font-size="28" fill="{colour}">'
                          f'{escape(label)}</text>')

    def render(self, title: str) -> str:
        head = (f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {SIZE} {SIZE}" '
                f'width="{SIZE}" height="{SIZE}">')
        body = [head, f"<title>{escape(title)}</title>",
                f'<rect x="0" y="0" width="{SIZE}" height="{SIZE}" fill="#ffffff"/>']
        return "\n".join(body + self.items + ["</svg>", ""])


def require_planar(domain: ConvexDomain):
    if domain.dim != 2:
        raise NotPlanar(f"scenes need a 2-dimensional domain, got dimension {domain.dim}")


def outline(domain: ConvexDomain) -> np.ndarray:
    """Boundary polygon in chart coordinates: exact vertices for polygons, radial samples otherwise."""
    require_planar(domain)
    if isinstance(domain, PolyhedralDomain):
        verts = domain.vertices()
        c = verts.mean(axis=0)
        order = np.argsort(np.arctan2(verts[:, 1] - c[1], verts[:, 0] - c[0]))
        return verts[order]
    centre = np.zeros(2)
    if contains(domain, domain.chart.point(centre)) is not Location.INTERIOR:
        sample = domain.sample_interior(np.random.default_rng(0), 64)
        centre = domain.chart.to_chart(sample).mean(axis=0)
    theta = np.linspace(0.0, 2 * np.pi, BOUNDARY_SAMPLES, endpoint=False)
    dirs = np.column_stack([np.cos(theta), np.sin(theta)])
    base = np.repeat(domain.chart.from_chart(centre)[None], BOUNDARY_SAMPLES, 0)
    _, hi = domain.intervals(base, domain.chart.direction(dirs))
    if not np.all(np.isfinite(hi)):
        raise NotPlanar("domain is unbounded in its chart")
    return centre + hi[:, None] * dirs


def _chart(domain, p) -> np.ndarray:
    if isinstance(p, ProjPoint):
        return domain.chart.to_chart(domain.orient(p.coords)[0])
    return np.asarray(p, dtype=float)


def chord_scene(domain: ConvexDomain, x=(-0.3, -0.1), y=(0.4, 0.2)) -> str:
    """A chord with its boundary endpoints a, b and interior points x, y."""
    shape = outline(domain)
    cv = Canvas(shape)
    cv.polygon(shape, "domain")
    v = tangent_towards(domain, np.asarray(x, float), np.asarray(y, float))
    a, b = endpoints(domain, v)
    a, b = _chart(domain, a), _chart(domain, b)
    cv.line(a, b, "chord")
    for p, label in ((a, "a"), (x, "x"), (y, "y"), (b, "b")):
        cv.point(p, label)
    return cv.render("chord through x and y")


def stable_scene(domain: ConvexDomain, xi=(1.0, 0.0), x=(0.0, 0.0), y=(0.2, 0.5)) -> str:
    """Two vectors into xi, the tangent line at xi and the synchronizing construction."""
    shape = outline(domain)
    cv = Canvas(shape)
    cv.polygon(shape, "domain")
    xi, x, y = (np.asarray(p, dtype=float) for p in (xi, x, y))
    v, w = tangent_towards(domain, x, xi), tangent_towards(domain, y, xi)
    res = sync_time(domain, v, w)
    av = _chart(domain, endpoints(domain, v)[0])
    aw = _chart(domain, endpoints(domain, w)[0])
    cv.line(av, xi, "chord-v")
    cv.line(aw, xi, "chord-w")
    extent = float(np.ptp(shape, axis=0).max())
    if res.intersection_point is not None and domain.chart.representable(res.intersection_point):
        p = _chart(domain, res.intersection_point)
        tangent = p - xi
    else:
        p = None
        tangent = np.array([-(xi - x)[1], (xi - x)[0]])
    tangent = tangent / np.linalg.norm(tangent)
    cv.line(xi - 0.6 * extent * tangent, xi + 0.6 * extent * tangent, "tangent-line",
            stroke="#2e7d32", width=3)
    if p is not None:
        cv.line(av, p, "backward-line", dash="8,6")
        cv.line(x, p, "sync-line", dash="8,6")
        cv.point(p, "p", "#2e7d32")
    z = _chart(domain, flow(domain, w, res.t0).base)
    cv.point(xi, "xi", "#1f3b73")
    cv.point(x, "x")
    cv.point(y, "y")
    cv.point(z, "z")
    return cv.render(f"strong stable synchronization, t0 = {res.t0:.6f}")


def mixing_scene(domain: ConvexDomain | None = None) -> str:
    """Axes of the certified disk pair and the chord joining them."""
    domain = domain or named_domain("disk")
    shape = outline(domain)
    cv = Canvas(shape)
    cv.polygon(shape, "domain")
    cert = pingpong_certify(GeneratorFamily.from_matrices(schottky_pair()))
    pts = []
    for k, data in enumerate(cert.family.analyses, start=1):
        plus, minus = _chart(domain, data.x_plus), _chart(domain, data.x_minus)
        cv.line(minus, plus, f"axis-{k}", stroke="#6a1b9a")
        pts.append((plus, minus))
    cv.line(pts[0][1], pts[1][0], "connecting-chord", stroke="#b22222", dash="10,6")
    for k, (plus, minus) in enumerate(pts, start=1):
        cv.point(plus, f"x{k}+", "#6a1b9a")
        cv.point(minus, f"x{k}-", "#6a1b9a")
    return cv.render(f"mixing witness skeleton, N = {cert.N}")


SCENES = {"chord": chord_scene, "stable": stable_scene, "mixing": mixing_scene}


def render(scene: str, domain: ConvexDomain, **params) -> str:
    if scene not in SCENES:
        raise ValueError(f"unknown scene {scene!r}; choose from {', '.join(SCENES)}")
    require_planar(domain)
    return SCENES[scene](domain, **params)
