"""Command line front end.

Subcommands: gen (build a gallery sample), extend (attach a warped collar),
curv (curvature tests), gh (distance bounds between two samples), glue
(amalgamate two samples along a seam) and report (config-driven sweep that
writes CSV, JSON and SVG files).

Exit codes: 0 on success, 2 when a measurement or sweep row fails, 1 for
configuration and usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from .collar import adaptive_profile, build_extension, radial_bound, tangential_bound, warp_profile
from .curvature import cat_midpoint_test, cbb_quadruple_test
from .gallery import FAMILIES, ExampleSpec, generate, ground_truth
from .gh import gh_bounds, glued_space
from .metric_core import (
    intrinsic_metric,
    load_manifold_json,
    metric_sample,
    save_distance_csv,
    save_manifold_json,
)
from .report import (
    CSV_COLUMNS,
    ExperimentConfig,
    load_config,
    run_report,
    save_config,
)

GLUE_POINT_CAP = 4000


class _Parser(argparse.ArgumentParser):
    # usage problems are configuration errors, not measurement failures
    def error(self, message):  # noqa: D102
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _parse_params(items: list[str]) -> dict:
    out = {}
    for item in items:
        key, sep, raw = item.partition("=")
        if not sep or not key:
            raise ValueError(f"--param needs key=value, got {item!r}")
        try:
            out[key] = int(raw)
        except ValueError:
            try:
                out[key] = float(raw)
            except ValueError:
                out[key] = raw
    return out


def _parse_indices(raw: str) -> np.ndarray:
    try:
        idx = np.array([int(tok) for tok in raw.split(",") if tok.strip()], dtype=int)
    except ValueError:
        raise ValueError(f"expected comma-separated integers, got {raw!r}")
    if len(idx) == 0:
        raise ValueError("empty index list")
    return idx


def _cmd_gen(args) -> int:
    spec = ExampleSpec(
        args.family, i=args.i, h=args.h, params=_parse_params(args.param)
    )
    m = generate(spec)
    if not args.skip_validate:
        m.validate()
    save_manifold_json(m, args.out)
    print(
        f"{args.family} i={args.i}: {m.n} points, {len(m.edges)} edges, "
        f"h={m.meta.get('h', m.mesh_scale):.6g}, wrote {args.out}"
    )
    if args.truth:
        print(json.dumps(ground_truth(spec), sort_keys=True, default=float))
    return 0


def _cmd_extend(args) -> int:
    m = load_manifold_json(args.manifold)
    if args.t0 is not None or args.eps is not None or args.lambda_bar is not None:
        if None in (args.t0, args.eps, args.lambda_bar):
            raise ValueError("--t0, --eps and --lambda-bar must be given together")
        prof = warp_profile(args.lambda_bar, args.eps, args.t0)
    else:
        prof = adaptive_profile(args.i)
    ext = build_extension(m, prof, layers=args.layers)
    rad = radial_bound(prof)
    tan = tangential_bound(prof, args.k_boundary)
    ext.glued.meta.update(
        {
            "collar_t0": prof.t0,
            "collar_eps": prof.eps,
            "collar_lambda_bar": prof.lambda_bar,
            "collar_layers": args.layers,
        }
    )
    save_manifold_json(ext.glued, args.out)
    print(
        f"collar: t0={prof.t0:.6g} eps={prof.eps:.6g} "
        f"lambda_bar={prof.lambda_bar:.6g} ratio={prof.ratio:.6g}"
    )
    for label, b in (("radial", rad), ("tangential", tan)):
        cert = "certified" if b.certified else "uncertified"
        print(f"  {label} curvature >= {b.value:.6g} ({cert}, {b.method})")
    print(
        f"extension: {m.n} -> {ext.glued.n} points "
        f"({args.layers} layers), wrote {args.out}"
    )
    return 0


def _cmd_curv(args) -> int:
    m = load_manifold_json(args.manifold)
    X, _ = metric_sample(m, args.cap, seed=args.seed)
    if args.cat:
        rep = cat_midpoint_test(
            X, args.k, n_samples=args.samples, seed=args.seed,
            mesh_scale=m.mesh_scale,
        )
        head = f"cat k={args.k:g}"
        detail = f"max_violation={rep.max_violation:+.6g}"
    else:
        rep = cbb_quadruple_test(
            X, args.k, n_samples=args.samples, seed=args.seed,
            mesh_scale=m.mesh_scale,
        )
        head = f"cbb k={args.k:g}"
        detail = f"adjusted_excess={rep.max_excess_adjusted:+.6g}"
        if not rep.diameter_ok:
            detail += " diameter_bound_violated"
    verdict = "pass" if rep.passed else "FAIL"
    print(f"{head} on {X.n} points: {verdict} ({detail}, tested={rep.n_tested})")
    if args.json:
        with open(args.json, "w") as f:
            f.write(rep.to_json())
            f.write("\n")
    return 0 if rep.passed else 2


def _cmd_gh(args) -> int:
    ma = load_manifold_json(args.source)
    mb = load_manifold_json(args.target)
    X, _ = metric_sample(ma, args.cap, seed=args.seed)
    Y, _ = metric_sample(mb, args.cap, seed=args.seed)
    b = gh_bounds(X, Y, budget=args.budget, seed=args.seed)
    print(
        f"gh bounds on {X.n} x {Y.n} points: "
        f"lower={b.lower:.6g} upper={b.upper:.6g} map_eps={b.eps:.6g}"
    )
    if args.json:
        doc = {
            "schema": "gh-bounds/1",
            "lower": b.lower,
            "upper": b.upper,
            "map_eps": b.eps,
            "source_points": X.n,
            "target_points": Y.n,
        }
        with open(args.json, "w") as f:
            json.dump(doc, f, sort_keys=True)
            f.write("\n")
    return 0


def _cmd_glue(args) -> int:
    ma = load_manifold_json(args.source)
    mb = load_manifold_json(args.target)
    if ma.n > GLUE_POINT_CAP or mb.n > GLUE_POINT_CAP:
        raise ValueError(
            f"glue works on samples of at most {GLUE_POINT_CAP} points; "
            "subsample the inputs first"
        )
    sa = _parse_indices(args.seam_source)
    sb = _parse_indices(args.seam_target)
    X = intrinsic_metric(ma)
    Y = intrinsic_metric(mb)
    Z, _, _ = glued_space(X, Y, sa, sb)
    save_distance_csv(Z, args.out)
    print(
        f"glued: {X.n} + {Y.n} points along a {len(sa)}-point seam -> "
        f"{Z.n} points, diameter {Z.diameter:.6g}, wrote {args.out}"
    )
    return 0


def _cmd_report(args) -> int:
    if args.init:
        save_config(ExperimentConfig(), args.config)
        print(f"wrote template config to {args.config}")
        return 0
    cfg = load_config(args.config)
    if args.seed is not None:
        from dataclasses import replace

        cfg = replace(cfg, seed=args.seed)
    res = run_report(cfg, args.out, jobs=args.jobs, plots=not args.no_plots)
    for row in res.rows:
        line = f"i={row['i']}: {row['status']}"
        if row["error"]:
            line += f" ({row['error']})"
        print(line)
    print(f"wrote {len(res.files)} files to {args.out}")
    return res.exit_code


_REPORT_EPILOG = "CSV columns:\n" + "\n".join(
    f"  {name:<22}{desc}" for name, desc in CSV_COLUMNS
)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="alexgeo", description=__doc__,
                formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--version", action="version", version=f"alexgeo {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a gallery sample")
    g.add_argument("--family", required=True, choices=sorted(FAMILIES))
    g.add_argument("--i", type=int, default=1, help="sequence index")
    g.add_argument("--h", type=float, default=None, help="target mesh scale")
    g.add_argument("--param", action="append", default=[], metavar="KEY=VALUE",
                   help="extra family parameter, repeatable")
    g.add_argument("--out", required=True, help="output manifold JSON path")
    g.add_argument("--skip-validate", action="store_true")
    g.add_argument("--truth", action="store_true",
                   help="also print known closed-form quantities")
    g.set_defaults(func=_cmd_gen)

    e = sub.add_parser("extend", help="attach a warped collar to a sample")
    e.add_argument("--manifold", required=True, help="input manifold JSON")
    e.add_argument("--i", type=int, default=1,
                   help="adaptive profile index (ignored with explicit profile)")
    e.add_argument("--t0", type=float, default=None, help="collar depth")
    e.add_argument("--eps", type=float, default=None, help="warp floor")
    e.add_argument("--lambda-bar", type=float, default=None,
                   help="boundary slope bound (<= 0)")
    e.add_argument("--layers", type=int, default=8)
    e.add_argument("--k-boundary", type=float, default=0.0,
                   help="lower bound for boundary curvature")
    e.add_argument("--out", required=True, help="output manifold JSON path")
    e.set_defaults(func=_cmd_extend)

    c = sub.add_parser("curv", help="run a curvature test on a sample")
    c.add_argument("--manifold", required=True)
    c.add_argument("--k", type=float, required=True, help="comparison curvature")
    c.add_argument("--cat", action="store_true",
                   help="upper-bound midpoint test instead of the lower-bound test")
    c.add_argument("--samples", type=int, default=400)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--cap", type=int, default=600, help="subsample size")
    c.add_argument("--json", default=None, help="write the full report here")
    c.set_defaults(func=_cmd_curv)

    h = sub.add_parser("gh", help="distance bounds between two samples")
    h.add_argument("--source", required=True)
    h.add_argument("--target", required=True)
    h.add_argument("--cap", type=int, default=600)
    h.add_argument("--budget", type=int, default=20000)
    h.add_argument("--seed", type=int, default=0)
    h.add_argument("--json", default=None)
    h.set_defaults(func=_cmd_gh)

    gl = sub.add_parser("glue", help="glue two samples along a seam")
    gl.add_argument("--source", required=True)
    gl.add_argument("--target", required=True)
    gl.add_argument("--seam-source", required=True,
                    help="comma-separated vertex ids in the source")
    gl.add_argument("--seam-target", required=True,
                    help="comma-separated vertex ids in the target")
    gl.add_argument("--out", required=True, help="output distance CSV")
    gl.set_defaults(func=_cmd_glue)

    r = sub.add_parser(
        "report", help="run a config-driven sweep",
        epilog=_REPORT_EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    r.add_argument("--config", required=True, help="INI sweep description")
    r.add_argument("--out", default="report_out", help="output directory")
    r.add_argument("--seed", type=int, default=None, help="override config seed")
    r.add_argument("--jobs", type=int, default=1, help="parallel row workers")
    r.add_argument("--init", action="store_true",
                   help="write a template config to --config and exit")
    r.add_argument("--no-plots", action="store_true")
    r.set_defaults(func=_cmd_report)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"alexgeo: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
