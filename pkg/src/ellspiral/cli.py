"""
Command-line front end: ``python -m ellspiral <command> ...``.

Every command computes one primary artifact (CSV, JSON or SVG).  With an
output directory (``--out`` or the ``ELLSPIRAL_OUT`` environment variable)
the artifacts are written there together with ``manifest.json``, which echoes
the full configuration, library versions and artifact checksums.  Without
one, the primary artifact goes to stdout and nothing touches the disk.

Options may also come from ``--config FILE``, a ``key = value`` file whose
keys are the long option names; flags given on the command line win.

Failures exit nonzero with a one-line JSON error record on stderr:
2 for invalid input, 3 for numerical or resource failures.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import platform
import re
import sys
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np
import scipy

from . import __version__, covering, fbm, formulas, holder
from .errors import ConvergenceError, DomainError, FactorizationError, PointBudgetExceeded
from .geometry import SpiralParams, ellipse_family_points, sample_spiral

SCHEMA = 1
OUT_ENV = "ELLSPIRAL_OUT"
EXIT_INVALID = 2
EXIT_FAILED = 3


class UsageError(Exception):
    pass


# --------------------------------------------------------------------------
# argument types


def scale(text: str) -> float:
    """A positive float, also written as ``2^-15``."""
    m = re.fullmatch(r"\s*2\^\(?(-?\d+)\)?\s*", str(text))
    value = 2.0 ** int(m.group(1)) if m else float(text)
    if not (math.isfinite(value) and value > 0):
        raise argparse.ArgumentTypeError(f"not a positive scale: {text!r}")
    return value


def grid_spec(text: str) -> tuple[float, float, float]:
    """``start:stop:step``, inclusive of both ends."""
    try:
        start, stop, step = (float(v) for v in str(text).split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected start:stop:step, got {text!r}") from None
    if not step > 0 or stop < start:
        raise argparse.ArgumentTypeError(f"empty grid {text!r}")
    return start, stop, step


def expand_grid(spec) -> list[float]:
    start, stop, step = spec
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    # rounding keeps labels such as 0.3 free of float drift
    return [round(start + i * step, 12) for i in range(n)]


def _bool(text) -> bool:
    if isinstance(text, bool):
        return text
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"not a boolean: {text!r}")


# --------------------------------------------------------------------------
# commands; each returns {artifact name: text}, the first one being primary


def _params(args) -> SpiralParams:
    return SpiralParams(args.p, args.q)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def _ladder(args) -> np.ndarray:
    if args.levels < 2:
        raise DomainError("a ladder needs at least two levels")
    if not args.delta_min < args.delta_max < 1:
        raise DomainError("need delta_min < delta_max < 1")
    return covering.geometric_ladder(args.delta_min, args.delta_max, args.levels)


def cmd_dims(args):
    P = _params(args)
    rows = [(th, formulas.intermediate_dimension(P, th).value) for th in expand_grid(args.theta_grid)]
    return {"dims.csv": _csv(["theta", "dim_theta"], rows)}


def cmd_spectrum(args):
    P = _params(args)
    thetas = [th for th in expand_grid(args.theta_grid) if th < 1.0]
    rows = []
    for th in thetas:
        dv = formulas.assouad_spectrum(P, th)
        rows.append((th, dv.value, dv.branch))
    return {"spectrum.csv": _csv(["theta", "assouad_spectrum", "branch"], rows)}


def cmd_estimate_box(args):
    P = _params(args)
    ladder = _ladder(args)
    est = covering.estimate_box_dimension(P, ladder.min(), ladder.max(), args.levels,
                                          method=args.method, point_budget=args.point_budget)
    report = {"schema": SCHEMA, "p": P.p, "q": P.q, "method": args.method, **est.to_dict(),
              "closed_form": formulas.box_dimension(P).value}
    return {"box.json": _json(report), "box_ladder.csv": est.to_csv()}


def cmd_estimate_assouad(args):
    P = _params(args)
    est = covering.estimate_assouad_spectrum(P, args.theta, _ladder(args), window=args.window)
    report = {"schema": SCHEMA, "p": P.p, "q": P.q, "theta": args.theta, "window": args.window,
              **est.to_dict(), "closed_form": formulas.assouad_spectrum(P, args.theta).value}
    return {"assouad.json": _json(report), "assouad_ladder.csv": est.to_csv()}


def cmd_estimate_intermediate(args):
    P = _params(args)
    dv = covering.estimate_intermediate_dimension(P, args.theta, _ladder(args),
                                                  alpha=args.alpha, tol=args.tol)
    report = {"schema": SCHEMA, "p": P.p, "q": P.q, "theta": args.theta, "alpha": args.alpha,
              "estimate": dv.value, "branch": dv.branch,
              "closed_form": formulas.intermediate_dimension(P, args.theta).value}
    return {"intermediate.json": _json(report)}


def cmd_mass_check(args):
    P = _params(args)
    rep = covering.mass_distribution_ladder(P, args.theta, _ladder(args)[::-1], args.trials,
                                            seed=args.seed)
    report = {"p": P.p, "q": P.q, "theta": args.theta, "seed": args.seed, **rep.to_dict()}
    return {"mass.json": _json(report)}


def cmd_holder(args):
    if args.sweep:
        values = expand_grid(args.grid)
        rows = holder.sweep(values, values, values, values)
        return {"holder_sweep.csv": holder.sweep_csv(rows)}
    missing = [k for k in ("p", "q", "r", "s") if getattr(args, k) is None]
    if missing:
        raise UsageError(f"holder needs --{' --'.join(missing)} (or --sweep)")
    report = holder.best_bound(holder.DeformationPair.of(args.p, args.q, args.r, args.s))
    out = report.to_dict()
    if args.p == args.q and args.r == args.s and args.r < args.p <= 1:
        out["hyperbolic_bound"] = holder.hyperbolic_bound(args.p, args.r)
    return {"holder.json": _json(out)}


def cmd_fbm(args):
    P = _params(args)
    deltas = None if args.delta_min is None else _ladder(args)
    rep = fbm.image_box_dimension_experiment(P, args.alpha, args.seeds, deltas,
                                             n_sites=args.n_sites, k_max=args.k_max)
    out = {"fbm.json": _json({"p": P.p, "q": P.q, **rep.to_dict()})}
    if args.cloud and args.alpha < 1:
        sites = fbm.spiral_sites(P, rep.n_sites, rep.k_max)
        out["fbm_cloud.csv"] = fbm.sample_fbm(sites, args.alpha, rep.seeds[0]).to_csv()
    return out


def render_svg(polylines, size: int, stroke: float = 0.75) -> str:
    """Polylines in the plane as an SVG document scaled to fit a square canvas."""
    pts = np.concatenate(polylines)
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    span = float(max(hi - lo))
    margin = 0.02 * size
    k = (size - 2 * margin) / span
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<g fill="none" stroke="black" stroke-width="{stroke}">',
    ]
    for line in polylines:
        # flip y so the picture has the usual orientation
        xs = margin + (line[:, 0] - lo[0]) * k
        ys = size - margin - (line[:, 1] - lo[1]) * k
        coords = " ".join(f"{x:.3f},{y:.3f}" for x, y in zip(xs, ys))
        parts.append(f'<polyline points="{escape(coords)}"/>')
    parts += ["</g>", "</svg>"]
    return "\n".join(parts) + "\n"


def cmd_render(args):
    P = _params(args)
    # about half a pixel
    chord = float(P.radii(1)[0]) / args.size
    if args.curve == "S":
        arc = sample_spiral(P, 1, args.turns, chord, args.point_budget)
        lines = [arc.points]
    else:
        arc = ellipse_family_points(P, args.turns, chord, args.point_budget)
        turn = np.floor(arc.t / (2 * math.pi)).astype(int)
        lines = [arc.points[turn == n] for n in range(1, args.turns + 1)]
    return {"render.svg": render_svg(lines, args.size)}


COMMANDS = {
    "dims": cmd_dims,
    "spectrum": cmd_spectrum,
    "estimate-box": cmd_estimate_box,
    "estimate-assouad": cmd_estimate_assouad,
    "estimate-intermediate": cmd_estimate_intermediate,
    "mass-check": cmd_mass_check,
    "holder": cmd_holder,
    "fbm": cmd_fbm,
    "render": cmd_render,
}


# --------------------------------------------------------------------------
# parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _common(sp, p=None, q=None, required=True):
    # also accepted after the command name
    sp.add_argument("--config", default=argparse.SUPPRESS)
    sp.add_argument("--out", default=argparse.SUPPRESS)
    sp.add_argument("--p", type=float, default=p, required=required and p is None)
    sp.add_argument("--q", type=float, default=q, required=required and q is None)


def _ladder_args(sp, lo, hi, levels):
    sp.add_argument("--delta-min", type=scale, default=lo)
    sp.add_argument("--delta-max", type=scale, default=hi)
    sp.add_argument("--levels", type=int, default=levels)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="ellspiral", description="Dimensions of elliptical polynomial spirals.")
    ap.add_argument("--config", help="key = value file of option defaults")
    ap.add_argument("--out", help=f"output directory (default: ${OUT_ENV}; stdout if unset)")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("dims", help="intermediate dimensions over a theta grid (CSV)")
    _common(sp)
    sp.add_argument("--theta-grid", type=grid_spec, default="0:1:0.01")

    sp = sub.add_parser("spectrum", help="Assouad spectrum over a theta grid (CSV)")
    _common(sp)
    sp.add_argument("--theta-grid", type=grid_spec, default="0:0.99:0.01")

    sp = sub.add_parser("estimate-box", help="box-counting slope")
    _common(sp)
    _ladder_args(sp, "2^-15", "2^-7", 9)
    sp.add_argument("--method", choices=("sampled", "traversal"), default="sampled")
    sp.add_argument("--point-budget", type=int, default=10**8)

    sp = sub.add_parser("estimate-assouad", help="localized cover slope at the origin")
    _common(sp)
    sp.add_argument("--theta", type=float, required=True)
    _ladder_args(sp, "2^-20", "2^-12", 9)
    sp.add_argument("--window", choices=("square", "ball"), default="square")

    sp = sub.add_parser("estimate-intermediate", help="critical exponent of two-scale covers")
    _common(sp)
    sp.add_argument("--theta", type=float, required=True)
    sp.add_argument("--alpha", type=float, default=1.0)
    sp.add_argument("--tol", type=float, default=1e-3)
    _ladder_args(sp, "2^-24", "2^-8", 17)

    sp = sub.add_parser("mass-check", help="mass distribution on random admissible windows")
    _common(sp)
    sp.add_argument("--theta", type=float, required=True)
    _ladder_args(sp, "2^-20", "2^-12", 3)
    sp.add_argument("--trials", type=int, default=10_000)
    sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("holder", help="Hölder exponent bounds for S_{p,q} -> S_{r,s}")
    _common(sp, required=False)
    sp.add_argument("--r", type=float)
    sp.add_argument("--s", type=float)
    sp.add_argument("--sweep", type=_bool, nargs="?", const=True, default=False)
    sp.add_argument("--grid", type=grid_spec, default="0.05:0.95:0.05")

    sp = sub.add_parser("fbm", help="box-counting slopes of fBm images of the spiral")
    _common(sp, 0.4, 0.6)
    sp.add_argument("--alpha", type=float, default=0.7)
    sp.add_argument("--seeds", type=int, default=20)
    sp.add_argument("--n-sites", type=int, default=fbm.MAX_SITES)
    sp.add_argument("--k-max", type=int)
    sp.add_argument("--delta-min", type=scale)
    sp.add_argument("--delta-max", type=scale, default="2^-1")
    sp.add_argument("--levels", type=int, default=4)
    sp.add_argument("--cloud", type=_bool, nargs="?", const=True, default=False)

    sp = sub.add_parser("render", help="SVG of S_{p,q} or of the ellipse family C_{p,q}")
    _common(sp, 0.7, 0.75)
    sp.add_argument("--curve", choices=("S", "C"), default="S")
    sp.add_argument("--turns", type=int, default=30)
    sp.add_argument("--size", type=int, default=800)
    sp.add_argument("--point-budget", type=int, default=10**7)
    return ap


def read_config(path) -> dict:
    """``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for n, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise UsageError(f"{path}:{n}: expected key = value")
        out[key.strip().replace("-", "_")] = value.strip()
    return out


def parse(argv) -> argparse.Namespace:
    parser = build_parser()
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, rest = pre.parse_known_args(argv)
    subparsers = parser._subparsers._group_actions[0].choices
    command = next((a for a in rest if a in subparsers), None)
    if known.config and command:
        cfg = read_config(known.config)
        sub = subparsers[command]
        valid = {a.dest for a in sub._actions}
        unknown = sorted(set(cfg) - valid - {"out"})
        if unknown:
            raise UsageError(f"unknown config keys for {command}: {', '.join(unknown)}")
        if "out" in cfg:
            parser.set_defaults(out=cfg.pop("out"))
        sub.set_defaults(**cfg)
        # required options may now come from the file
        for action in sub._actions:
            if action.dest in cfg:
                action.required = False
    return parser.parse_args(argv)


def config_echo(args) -> dict:
    out = {}
    for key, value in sorted(vars(args).items()):
        if key in ("out", "config"):
            continue
        if isinstance(value, tuple):
            value = list(value)
        out[key] = value
    return out


def manifest(args, artifacts: dict) -> dict:
    return {
        "schema": SCHEMA,
        "command": args.command,
        "config": config_echo(args),
        "versions": {
            "ellspiral": __version__,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "python": platform.python_version(),
        },
        "artifacts": {name: hashlib.sha256(text.encode()).hexdigest()
                      for name, text in artifacts.items()},
    }


def _error(kind: str, message: str, code: int) -> int:
    record = {"schema": SCHEMA, "error": kind, "message": message, "exit_code": code}
    print(json.dumps(record, sort_keys=True), file=sys.stderr)
    return code


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = parse(argv)
        artifacts = COMMANDS[args.command](args)
    except (UsageError, DomainError, ValueError, OSError) as exc:
        return _error(type(exc).__name__, str(exc), EXIT_INVALID)
    except (ConvergenceError, FactorizationError, PointBudgetExceeded, MemoryError) as exc:
        return _error(type(exc).__name__, str(exc), EXIT_FAILED)

    out = args.out or os.environ.get(OUT_ENV)
    if not out:
        sys.stdout.write(next(iter(artifacts.values())))
        return 0
    outdir = Path(out)
    try:
        outdir.mkdir(parents=True, exist_ok=True)
        for name, text in artifacts.items():
            (outdir / name).write_text(text)
        (outdir / "manifest.json").write_text(_json(manifest(args, artifacts)))
    except OSError as exc:
        return _error(type(exc).__name__, str(exc), EXIT_INVALID)
    for name in [*artifacts, "manifest.json"]:
        print(outdir / name)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
