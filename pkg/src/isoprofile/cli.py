"""Command-line front end.

    isoprofile profile --space cylinder --dim 3 --scale 2 --volume 65
    isoprofile bound --product s2xr2 --volume 100
    isoprofile verify --all
    isoprofile figure --id 1 --out fig1.csv
    isoprofile yamabe --product s3xr2

Exit codes: 0 success, 1 failed verification, 2 usage or domain error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from . import bounds, profiles, verify, yamabe
from .quadrature import QuadratureError
from .special import DomainError

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2


@dataclass(frozen=True)
class RunConfig:
    tolerance: float = profiles.QUAD_RTOL
    samples: int = verify.DEFAULT_SAMPLES
    eta_grid: int = profiles.DEFAULT_ETA_GRID
    output_format: str | None = None  # None: the command's natural format
    out: str | None = None

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        return cls(args.tol, args.samples, args.eta_grid, args.format, args.out)


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def _clean(obj):
    # JSON has no infinities; spell them out.
    if isinstance(obj, float) and math.isinf(obj):
        return "inf" if obj > 0 else "-inf"
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def _dump_json(obj) -> str:
    return json.dumps(_clean(obj), indent=2, default=_json_default) + "\n"


def _dump_csv(header: list[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_cell(x) for x in row])
    return buf.getvalue()


def _cell(x):
    if isinstance(x, (float, np.floating)):
        return verify._fmt(float(x))
    return x


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# --------------------------------------------------------------------------


def _profile_for(args, cfg: RunConfig) -> profiles.ProfileFn:
    if args.space == "euclidean":
        if args.scale != 1.0:
            raise DomainError("Euclidean space is scale invariant; --scale must be 1")
        return profiles.euclidean_profile(args.dim)
    if args.space == "sphere":
        return profiles.sphere_profile(profiles.SphereGeometry(args.dim, args.scale))
    return profiles.cylinder_profile(args.dim, args.scale, cfg.eta_grid, cfg.tolerance)


def cmd_profile(args, cfg: RunConfig) -> int:
    p = _profile_for(args, cfg)
    fmt = cfg.output_format or "json"
    if args.volume is not None:
        area = p(args.volume)
        record = {"space": args.space, "dim": args.dim, "scale": args.scale,
                  "profile": p.name, "volume": args.volume, "area": area}
        if fmt == "csv":
            _emit(cfg, _dump_csv(["v", "area"], [(args.volume, area)]))
        else:
            _emit(cfg, _dump_json(record))
        return EXIT_OK
    a, b = args.volume_range
    v = np.linspace(a, b, args.count or cfg.samples)
    area = p(v)
    if fmt == "csv":
        _emit(cfg, _dump_csv(["v", "area"], zip(v, area)))
    else:
        _emit(cfg, _dump_json({"space": args.space, "dim": args.dim, "scale": args.scale,
                               "profile": p.name,
                               "rows": [{"v": float(x), "area": float(y)} for x, y in zip(v, area)]}))
    return EXIT_OK


def cmd_bound(args, cfg: RunConfig) -> int:
    if args.tube:
        m = args.m
        vol_m = args.vol_m if args.vol_m is not None else profiles.SphereGeometry(m).total_volume
        h = profiles.sphere_profile(profiles.SphereGeometry(m, (vol_m / profiles.SphereGeometry(m).total_volume) ** (2.0 / m)))
        b = bounds.tube_bound(vol_m, args.n, h, args.alpha)
        out = {"construction": "tube", "alpha": b.alpha, "vol_M": b.vol_M, "n": b.n,
               "h": h.name, "k": b.k, "v0": b.v0, "coefficient": b.coefficient,
               "C_Mn": profiles.tube_function(vol_m, args.n).coefficient}
        if args.volume is not None:
            out["volume"] = args.volume
            out["value"] = b(args.volume)
    elif args.forward:
        b = bounds.forward_extension(args.x0, args.y0, args.n)
        out = {"construction": "forward", "x0": args.x0, "y0": args.y0, "n": args.n,
               "coefficient": b.coefficient, "exponent": b.exponent, "valid_from": b.valid_from,
               "provenance": b.provenance}
        if args.volume is not None:
            if args.volume < b.valid_from:
                raise DomainError(f"forward bound holds only for v >= {b.valid_from:g}")
            out["volume"] = args.volume
            out["value"] = b(args.volume)
    elif args.backward:
        ref = profiles.sphere_profile(profiles.SphereGeometry(args.total_dim, args.ref_scale))
        b = bounds.backward_extension(args.v0, args.k, args.total_dim, ref)
        out = {"construction": "backward", "v0": args.v0, "k": args.k, "total_dim": args.total_dim,
               "reference": ref.name, "lambda": b.lam, "valid_interval": list(b.valid_interval),
               "provenance": b.provenance}
        if args.volume is not None:
            if not 0 < args.volume <= args.v0:
                raise DomainError(f"backward bound holds only for 0 < v <= {args.v0:g}")
            out["volume"] = args.volume
            out["value"] = b(args.volume)
    elif args.combine:
        pw = bounds.combine_pointwise(args.x0, args.y0, args.m, args.n)
        out = {"construction": "combine", **pw.to_dict()}
        if args.volume is not None:
            out["volume"] = args.volume
            out["value"] = pw(args.volume)
    else:
        if not args.product:
            raise DomainError("bound needs --product or one of --tube/--forward/--backward/--combine")
        pw = bounds.product_bound(args.product, eta_grid_size=cfg.eta_grid, rtol=cfg.tolerance)
        out = pw.to_dict()
        if args.variant != "proof":
            hb = bounds.headline_bound(args.product, args.variant)
            out["statement"] = {"factor": hb.lam, "reference": hb.reference.name, "variant": args.variant}
        if args.volume is not None:
            seg = pw.active_segment(args.volume)
            stmt = bounds.headline_bound(args.product, args.variant)
            out.update(
                volume=args.volume,
                value=pw(args.volume),
                active_segment=seg.describe(),
                provenance=seg.bound.provenance,
                statement_value=stmt(args.volume),
            )
    _emit(cfg, _dump_json(out))
    return EXIT_OK


def cmd_verify(args, cfg: RunConfig) -> int:
    if args.list:
        _emit(cfg, "".join(f"{cid}\n" for cid in sorted(verify.CLAIMS)))
        return EXIT_OK
    ids = sorted(verify.CLAIMS) if args.all else (args.claim or [])
    if not ids:
        raise DomainError("verify needs --claim ID or --all")
    reports = [verify.run_claim(cid, cfg.samples, cfg.eta_grid, cfg.tolerance) for cid in ids]
    for rep in reports:
        print(rep.line(), file=sys.stderr)
    if (cfg.output_format or "json") == "csv":
        rows = [(r.claim_id, r.interval[0], r.interval[1], r.samples, r.min_margin,
                 r.min_margin_location, r.relative_min_margin, "pass" if r.passed else "fail")
                for r in reports]
        _emit(cfg, _dump_csv(["claim", "a", "b", "samples", "min_margin", "location",
                              "relative_min_margin", "status"], rows))
    else:
        _emit(cfg, _dump_json([r.to_dict() for r in reports]))
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAILED


def cmd_figure(args, cfg: RunConfig) -> int:
    rows = verify.figure_data(args.id, cfg.samples, cfg.eta_grid, cfg.tolerance)
    if (cfg.output_format or "csv") == "csv":
        _emit(cfg, verify.figure_csv(rows))
    else:
        spec = verify.FIGURES[args.id]
        _emit(cfg, _dump_json({
            "figure": args.id,
            "description": spec.description,
            "rows": [dict(zip(("v", "lhs", "rhs", "margin"), map(float, r))) for r in rows],
        }))
    return EXIT_OK


def cmd_yamabe(args, cfg: RunConfig) -> int:
    entries = yamabe.yamabe_reports()
    if args.product:
        product = bounds.Product.parse(args.product)
        entries = [e for e in entries if e.get("product") == product.value]
        est = yamabe.product_estimate(product)
        entries = [{"estimate": est.to_dict()}] + entries
    _emit(cfg, _dump_json(entries))
    return EXIT_OK


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=profiles.QUAD_RTOL,
                        help="relative quadrature tolerance (default %(default)g)")
    common.add_argument("--samples", type=int, default=verify.DEFAULT_SAMPLES,
                        help="grid size for verification and tables (default %(default)d)")
    common.add_argument("--eta-grid", type=int, default=profiles.DEFAULT_ETA_GRID,
                        help="points in the tabulated cylinder family (default %(default)d)")
    common.add_argument("--format", choices=("json", "csv"), default=None)
    common.add_argument("--out", metavar="PATH", default=None, help="write output here instead of stdout")

    parser = argparse.ArgumentParser(prog="isoprofile", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("profile", parents=[common], help="evaluate an isoperimetric profile")
    p.add_argument("--space", choices=("euclidean", "sphere", "cylinder"), required=True)
    p.add_argument("--dim", type=int, required=True,
                   help="R^n: n; S^m: m; S^m x R: m (the sphere factor)")
    p.add_argument("--scale", type=float, default=1.0, help="metric multiplier mu")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--volume", type=float)
    g.add_argument("--volume-range", type=float, nargs=2, metavar=("A", "B"))
    p.add_argument("--count", type=int, default=None, help="rows for --volume-range (default --samples)")
    p.set_defaults(func=cmd_profile)

    b = sub.add_parser("bound", parents=[common], help="certified lower bounds")
    b.add_argument("--product", help="s2xr2, s2xr3 or s3xr2")
    b.add_argument("--variant", choices=("proof", "headline"), default="proof")
    b.add_argument("--volume", type=float)
    mode = b.add_mutually_exclusive_group()
    mode.add_argument("--tube", "--theorem1", dest="tube", action="store_true", help="tube bound for large volumes")
    mode.add_argument("--forward", action="store_true", help="power-law extension of (x0, y0)")
    mode.add_argument("--backward", action="store_true", help="sphere comparison below v0")
    mode.add_argument("--combine", action="store_true", help="both extensions of (x0, y0)")
    b.add_argument("--vol-m", type=float, help="volume of the compact factor (default: unit S^m)")
    b.add_argument("--m", type=int, default=2, help="dimension of the round compact factor")
    b.add_argument("--n", type=int, default=2, help="Euclidean factor dimension")
    b.add_argument("--alpha", type=float, default=0.9)
    b.add_argument("--x0", type=float)
    b.add_argument("--y0", type=float)
    b.add_argument("--v0", type=float)
    b.add_argument("--k", type=float)
    b.add_argument("--total-dim", type=int, default=4)
    b.add_argument("--ref-scale", type=float, default=1.0, help="scale of the reference sphere")
    b.set_defaults(func=cmd_bound)

    v = sub.add_parser("verify", parents=[common], help="run registered verification claims")
    v.add_argument("--claim", action="append", help="claim id (repeatable)")
    v.add_argument("--all", action="store_true")
    v.add_argument("--list", action="store_true", help="list claim ids")
    v.set_defaults(func=cmd_verify)

    f = sub.add_parser("figure", parents=[common], help="curve pair of one comparison figure")
    f.add_argument("--id", type=int, required=True, choices=sorted(verify.FIGURES))
    f.set_defaults(func=cmd_figure)

    y = sub.add_parser("yamabe", parents=[common], help="Yamabe constant lower bounds")
    yg = y.add_mutually_exclusive_group()
    yg.add_argument("--all", action="store_true")
    yg.add_argument("--product")
    y.set_defaults(func=cmd_yamabe)
    return parser


def _require(args, *names):
    missing = [n for n in names if getattr(args, n.replace("-", "_")) is None]
    if missing:
        raise DomainError("missing " + ", ".join(f"--{n}" for n in missing))


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    cfg = RunConfig.from_args(args)
    try:
        if args.command == "bound":
            if args.forward or args.combine:
                _require(args, "x0", "y0")
            if args.backward:
                _require(args, "v0", "k")
        return args.func(args, cfg)
    except (DomainError, yamabe.HypothesisError) as exc:
        print(f"isoprofile: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (QuadratureError, bounds.CertificationError) as exc:
        print(f"isoprofile: numeric failure: {exc}", file=sys.stderr)
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
