"""Command-line entry point: ``hilbertflow compute|verify|render|schottky``.

Every command prints one JSON object (or an SVG document for ``render``).
Errors are printed as {"error": code, "detail": message}; exit codes are
0 pass, 1 verification failure, 2 usage/config/input error, 3 numerical
degeneracy.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from .domains import ConvexDomain, PsdCone, load_domain, named_domain, smat, svec
from .dynamics import proximal_analysis, rank_one_check, translation_length
from .errors import (
    BadConfig,
    CrosscheckMismatch,
    DisagreementDetected,
    HilbertFlowError,
    NoNFound,
    NotCertified,
    NotConverged,
)
from .hilbert import TangentVector, distance, endpoints, flow, tangent_at, tangent_towards
from .models import schottky_pair
from .projective import ProjPoint
from .render import SCENES, render
from .schottky import (
    GeneratorFamily,
    PingPongCertificate,
    epsilon_dense_generator,
    group_gap,
    pingpong_certify,
    semigroup_length_spectrum,
)
from .stable import stable_limit_delta, sync_time
from .suites import SUITES, SuiteConfig, run_suite
from .symcone import nonwandering_classify, psd_tangent, reduce_to_basepoint, sym_to_json

VERIFICATION_ERRORS = (CrosscheckMismatch, DisagreementDetected, NotCertified, NotConverged,
                       NoNFound)

COMPUTE_COMMANDS = ("dist", "flow", "endpoints", "proximal", "ell", "rank-one", "sync-time",
                    "delta", "gap", "eps-dense", "reduce")


class _Parser(argparse.ArgumentParser):
    # keep usage errors machine-readable instead of argparse's own exit
    def error(self, message):
        raise BadConfig(message)


# ----------------------------------------------------------------------------
# argument parsing helpers


def parse_vector(text: str) -> np.ndarray:
    try:
        return np.array([float(t) for t in text.replace(" ", "").split(",") if t != ""])
    except ValueError:
        raise BadConfig(f"cannot parse vector {text!r}") from None


def parse_matrix(text: str) -> np.ndarray:
    rows = [parse_vector(r) for r in text.split(";") if r.strip()]
    if not rows or len({len(r) for r in rows}) != 1:
        raise BadConfig(f"cannot parse matrix {text!r}")
    return np.vstack(rows)


def parse_domain(text: str | None, default: str = "disk") -> ConvexDomain:
    if text is None:
        return named_domain(default)
    try:
        return named_domain(text)
    except HilbertFlowError:
        pass
    try:
        return load_domain(text)
    except OSError as exc:
        raise BadConfig(f"cannot read domain {text!r}: {exc}") from None
    except (ValueError, KeyError, TypeError) as exc:
        raise BadConfig(f"invalid domain JSON: {exc}") from None


def _require(args, *names):
    missing = [n for n in names if getattr(args, n.replace("-", "_")) is None]
    if missing:
        raise BadConfig(f"{args.cmd} needs --{', --'.join(missing)}")


def parse_point(domain: ConvexDomain, text: str):
    """Chart coordinates, homogeneous coordinates, or a symmetric matrix ("a,b;c,d") over PsdCone."""
    if ";" in text:
        if not isinstance(domain, PsdCone):
            raise BadConfig("matrix points need a psd domain")
        return ProjPoint(svec(parse_matrix(text)))
    x = parse_vector(text)
    if x.size == domain.ambient_dim:
        if not np.linalg.norm(x) > 0:
            raise BadConfig("homogeneous coordinates must not all vanish")
        return ProjPoint(x)
    if x.size != domain.dim:
        raise BadConfig(f"point needs {domain.dim} chart or {domain.ambient_dim} homogeneous "
                        f"coordinates, got {x.size}")
    return x


def tangent_from_args(domain: ConvexDomain, base_text: str, dir_text: str) -> TangentVector:
    base = parse_point(domain, base_text)
    if ";" in dir_text:
        if not isinstance(domain, PsdCone):
            raise BadConfig("matrix directions need a psd domain")
        lift = base.coords if isinstance(base, ProjPoint) else domain.chart.from_chart(base)
        return psd_tangent(smat(lift), parse_matrix(dir_text))
    return tangent_at(domain, base, parse_vector(dir_text))


def point_json(domain: ConvexDomain, p) -> dict:
    lift = domain.orient(p.coords)[0] if isinstance(p, ProjPoint) else domain.chart.from_chart(p)
    out = {"chart": [float(x) for x in domain.chart.to_chart(lift)],
           "lift": [float(x) for x in domain.chart.normalize(lift)]}
    if isinstance(domain, PsdCone):
        out["matrix"] = sym_to_json(smat(domain.chart.normalize(lift)))
    return out


# ----------------------------------------------------------------------------
# compute


def compute(args) -> dict:
    cmd = args.cmd
    if cmd == "dist":
        _require(args, "x", "y")
        dom = parse_domain(args.domain)
        return {"d": distance(dom, parse_point(dom, args.x), parse_point(dom, args.y))}
    if cmd in ("flow", "endpoints"):
        _require(args, "x", "dir")
        dom = parse_domain(args.domain)
        v = tangent_from_args(dom, args.x, args.dir)
        if cmd == "flow":
            t = 0.0 if args.t is None else args.t
            out = flow(dom, v, t)
            return {"t": t, "base": point_json(dom, out.base),
                    "direction": [float(x) for x in out.direction]}
        a, b = endpoints(dom, v)
        return {"a": point_json(dom, a), "b": point_json(dom, b)}
    if cmd in ("proximal", "ell"):
        _require(args, "matrix")
        g = parse_matrix(args.matrix)
        if cmd == "ell":
            return {"ell": translation_length(g)}
        data = proximal_analysis(g, strict=args.strict)

        def vec(p):
            return None if p is None else [float(x) for x in p.coords]

        return {"log_moduli": [float(x) for x in data.log_moduli],
                "is_proximal": data.is_proximal, "is_biproximal": data.is_biproximal,
                "x_plus": vec(data.x_plus), "x_minus": vec(data.x_minus), "ell": data.ell,
                "proximality_gap": data.proximality_gap, "inverse_gap": data.inverse_gap,
                "near_degenerate": data.near_degenerate}
    if cmd == "rank-one":
        _require(args, "matrix")
        dom = parse_domain(args.domain)
        rep = rank_one_check(dom, parse_matrix(args.matrix))
        return {"rank_one": rep.verdict, "criteria": rep.as_dict()}
    if cmd in ("sync-time", "delta"):
        _require(args, "x", "y", "xi")
        dom = parse_domain(args.domain)
        xi = parse_point(dom, args.xi)
        v = tangent_towards(dom, parse_point(dom, args.x), xi)
        w = tangent_towards(dom, parse_point(dom, args.y), xi)
        if cmd == "sync-time":
            res = sync_time(dom, v, w)
            p = res.intersection_point
            return {"t0": res.t0, "residual": res.residual, "late_distance": res.late_distance,
                    "intersection_point": None if p is None else [float(x) for x in p.coords]}
        rep = stable_limit_delta(dom, v, w)
        return {"delta": rep.delta, "tangent_minus": rep.tangent_minus,
                "tangent_plus": rep.tangent_plus, "smooth": rep.smooth}
    if cmd == "gap":
        _require(args, "values")
        return {"gap": group_gap(parse_vector(args.values), resolution=args.resolution,
                                 bound=args.bound)}
    if cmd == "eps-dense":
        _require(args, "x", "eps", "A")
        x = parse_vector(args.x)
        if x.size != 1:
            raise BadConfig("eps-dense needs a scalar --x")
        return {"g": epsilon_dense_generator(float(x[0]), args.eps, parse_vector(args.A))}
    if cmd == "reduce":
        _require(args, "X", "D")
        X, D = parse_matrix(args.X), parse_matrix(args.D)
        N = X.shape[0] if args.N is None else args.N
        if X.shape != (N, N) or D.shape != (N, N):
            raise BadConfig(f"--X and --D must be {N}x{N}")
        v = psd_tangent(X, D)
        nw = nonwandering_classify(N, v)
        out = {"stratum": nw.label.as_list(), "InNW": nw.in_nw}
        if nw.in_nw:
            red = reduce_to_basepoint(N, v)
            out.update({"g": [[float(x) for x in row] for row in red.g],
                        "residual": red.residual, "witness_residual": nw.witness_residual})
        return out
    raise BadConfig(f"unknown compute command {cmd!r}")


# ----------------------------------------------------------------------------
# verify, render, schottky


def verify(args) -> tuple[dict, int]:
    params = {k: v for k, v in (("L", args.L), ("B", args.B), ("z", args.z), ("r", args.r),
                                ("t", args.t), ("n_max", args.n_max)) if v is not None}
    cfg = SuiteConfig(seed=args.seed, samples=args.samples, domain=args.domain, tol=args.tol,
                      N=args.N, params=params)
    report = run_suite(args.suite, cfg)
    if args.csv:
        report.write_csv(args.csv)
    return report.to_json(timing=args.timing), 0 if report.passed else 1


def _load_cert(path: str | None, seed: int) -> PingPongCertificate:
    if path is None:
        return pingpong_certify(GeneratorFamily.from_matrices(schottky_pair()), seed=seed)
    with open(path, encoding="utf-8") as fh:
        return PingPongCertificate.from_json(json.load(fh))


def schottky(args) -> tuple[dict, int]:
    if args.action == "certify":
        if args.matrices:
            text = args.matrices
            if not text.lstrip().startswith("["):
                with open(text, encoding="utf-8") as fh:
                    text = fh.read()
            mats = [np.asarray(m, dtype=float) for m in json.loads(text)]
        else:
            mats = schottky_pair()
        cert = pingpong_certify(GeneratorFamily.from_matrices(mats), seed=args.seed,
                                n_max=args.n_max, spot_checks=args.spot_checks)
        out = cert.to_json()
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                json.dump(out, fh, indent=1)
        return out, 0 if cert.certified else 1
    cert = _load_cert(args.cert, args.seed)
    samples = semigroup_length_spectrum(cert, anchor=args.anchor, L=args.L)
    values = [s.length_value for s in samples]
    return {"N": cert.N, "L": args.L,
            "lengths": [{"word": list(s.word), "length": s.length_value} for s in samples],
            "gap": group_gap(values, bound=args.B)}, 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hilbertflow", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    c = sub.add_parser("compute", help="one-shot evaluation")
    c.add_argument("cmd", choices=COMPUTE_COMMANDS)
    c.add_argument("--domain")
    c.add_argument("--x")
    c.add_argument("--y")
    c.add_argument("--xi")
    c.add_argument("--dir")
    c.add_argument("--t", type=float)
    c.add_argument("--matrix")
    c.add_argument("--strict", action="store_true", help="raise on near-degenerate gaps")
    c.add_argument("--values")
    c.add_argument("--resolution", type=float)
    c.add_argument("--bound", type=int)
    c.add_argument("--eps", type=float)
    c.add_argument("--A")
    c.add_argument("--N", type=int)
    c.add_argument("--X")
    c.add_argument("--D")

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("suite", help="one of: " + ", ".join(SUITES))
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--samples", type=int)
    v.add_argument("--domain")
    v.add_argument("--tol", type=float)
    v.add_argument("--N", type=int)
    v.add_argument("--L", type=int)
    v.add_argument("--B", type=int)
    v.add_argument("--z", type=float)
    v.add_argument("--r", type=float)
    v.add_argument("--t", type=float, help="late time for convergence checks")
    v.add_argument("--n-max", dest="n_max", type=int)
    v.add_argument("--csv", help="write raw per-sample rows here")
    v.add_argument("--timing", action="store_true", help="include wall_time in the report")

    r = sub.add_parser("render", help="write an SVG scene")
    r.add_argument("scene", choices=list(SCENES))
    r.add_argument("--domain")
    r.add_argument("--x")
    r.add_argument("--y")
    r.add_argument("--xi")
    r.add_argument("--out")

    s = sub.add_parser("schottky", help="ping-pong certificates and length spectra")
    s.add_argument("action", choices=("certify", "spectrum"))
    s.add_argument("--matrices", help="JSON list of generator matrices (inline or file)")
    s.add_argument("--cert", help="certificate JSON written by certify --out")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--n-max", dest="n_max", type=int, default=32)
    s.add_argument("--spot-checks", dest="spot_checks", type=int, default=100)
    s.add_argument("--L", type=int, default=5)
    s.add_argument("--B", type=int, default=50)
    s.add_argument("--anchor", type=int, default=0)
    s.add_argument("--out")
    return parser


def exit_code(exc: Exception) -> int:
    if isinstance(exc, HilbertFlowError) and exc.degenerate:
        return 3
    if isinstance(exc, VERIFICATION_ERRORS):
        return 1
    return 2


def _emit(obj, stream=None):
    stream = stream or sys.stdout
    stream.write(json.dumps(obj) + "\n")


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.verb == "compute":
            _emit(compute(args))
            return 0
        if args.verb == "verify":
            out, code = verify(args)
            _emit(out)
            return code
        if args.verb == "render":
            dom = parse_domain(args.domain)
            params = {k: parse_vector(getattr(args, k)) for k in ("x", "y", "xi")
                      if getattr(args, k) is not None}
            svg = render(args.scene, dom, **params)
            if args.out:
                with open(args.out, "w", encoding="utf-8") as fh:
                    fh.write(svg)
                _emit({"scene": args.scene, "out": args.out, "bytes": len(svg.encode())})
            else:
                sys.stdout.write(svg)
            return 0
        out, code = schottky(args)
        _emit(out)
        return code
    except HilbertFlowError as exc:
        _emit({"error": exc.code, "detail": str(exc)})
        return exit_code(exc)
    except (ValueError, OSError, TypeError) as exc:
        _emit({"error": "BadConfig", "detail": str(exc)})
        return 2


if __name__ == "__main__":
    sys.exit(main())
