"""Command-line front end.

Subcommands: profile, classify, compare, equiv, certify, mesh, sweep.
Output is deterministic: identical invocations produce byte-identical
artifacts (fixed field order, shortest round-trip float formatting).
Exit codes: 0 success, 1 property-check failure, 2 usage error.
"""

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:             # Python 3.10
    import tomli as tomllib

from . import halfspace
from .asymptotics import classification_to_dict, classify_end
from .comparison import (compare_derivatives, comparison_rows_csv,
                         comparison_to_dict, equivalence_behavior)
from .errors import BranchRangeError, DomainError, IntegrationError, ParseError, \
    PreconditionError
from .prescribed import (from_expression, from_table, power_law, scaled)
from .profile import (IntegratorConfig, export_mesh_obj, export_profile_csv,
                      integrate_catenoid, mesh)


def parse_prescription(spec):
    """Parse a prescription spec string.

    Forms: ``powerlaw:alpha=<float>``, ``expr:<expression>``,
    ``table:<path>`` (CSV rows ``y,value``), ``scale:<float>:<spec>``.
    """
    if spec.startswith("powerlaw:"):
        body = spec[len("powerlaw:"):]
        if not body.startswith("alpha="):
            raise ParseError("powerlaw spec must be powerlaw:alpha=<float>",
                             len("powerlaw:"))
        try:
            alpha = float(body[len("alpha="):])
        except ValueError:
            raise ParseError(f"bad exponent {body[len('alpha='):]!r}",
                             len("powerlaw:alpha=")) from None
        return power_law(alpha)
    if spec.startswith("expr:"):
        return from_expression(spec[len("expr:"):])
    if spec.startswith("table:"):
        path = spec[len("table:"):]
        return _load_table(path)
    if spec.startswith("scale:"):
        rest = spec[len("scale:"):]
        factor_text, sep, inner = rest.partition(":")
        if not sep:
            raise ParseError("scale spec must be scale:<float>:<spec>", len("scale:"))
        try:
            factor = float(factor_text)
        except ValueError:
            raise ParseError(f"bad scale factor {factor_text!r}", len("scale:")) from None
        return scaled(parse_prescription(inner), factor)
    raise ParseError(
        f"unknown prescription spec {spec!r} "
        "(expected powerlaw: / expr: / table: / scale:)", 0)


def _load_table(path):
    if not os.path.exists(path):
        raise ValueError(f"table file not found: {path}")
    ys, vs = [], []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected two comma-separated columns")
            try:
                y, v = float(parts[0]), float(parts[1])
            except ValueError:
                if lineno == 1:
                    continue            # header row
                raise ValueError(f"{path}:{lineno}: non-numeric row") from None
            ys.append(y)
            vs.append(v)
    return from_table(ys, vs)


# ---------------------------------------------------------------------------
# Argument handling
# ---------------------------------------------------------------------------

_CONFIG_KEYS = ("h", "f", "r0", "r_list", "xmax", "rel_tol", "abs_tol",
                "branch", "window", "out", "format", "rings", "segments")


def _add_common(p, second=False):
    p.add_argument("--h", dest="h", metavar="SPEC", default=None,
                   help="prescription spec")
    if second:
        p.add_argument("--f", dest="f", metavar="SPEC", default=None,
                       help="second prescription spec")
    p.add_argument("--r0", dest="r0", type=float, default=None)
    p.add_argument("--xmax", dest="xmax", type=float, default=None)
    p.add_argument("--rel-tol", dest="rel_tol", type=float, default=None)
    p.add_argument("--abs-tol", dest="abs_tol", type=float, default=None)
    p.add_argument("--out", dest="out", default=None)
    p.add_argument("--format", dest="format", choices=("json", "csv"), default=None)
    p.add_argument("--config", dest="config", default=None,
                   help="TOML file with defaults; flags win")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="hcatenoid",
        description="prescribed-mean-curvature rotational surfaces: "
                    "integration, classification, comparison, certification")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("profile", help="integrate and export the profile CSV")
    _add_common(p)
    p.add_argument("--branch", dest="branch", choices=("upper", "lower", "both"),
                   default=None)

    p = sub.add_parser("classify", help="classify the behavior at infinity")
    _add_common(p)
    p.add_argument("--branch", dest="branch", choices=("upper", "lower", "both"),
                   default=None)

    p = sub.add_parser("compare", help="height/slope comparison of an ordered pair")
    _add_common(p, second=True)
    p.add_argument("--window", dest="window", default=None,
                   help="radial window lo,hi for the comparison grid")

    p = sub.add_parser("equiv", help="equivalence and verdict transfer of a pair")
    _add_common(p, second=True)

    p = sub.add_parser("certify", help="half-space certificate for a prescription")
    _add_common(p)

    p = sub.add_parser("mesh", help="export a surface mesh as Wavefront OBJ")
    _add_common(p)
    p.add_argument("--rings", dest="rings", type=int, default=None)
    p.add_argument("--segments", dest="segments", type=int, default=None)

    p = sub.add_parser("sweep", help="classify a list of necksizes in parallel")
    _add_common(p)
    p.add_argument("--r-list", dest="r_list", default=None,
                   help="comma-separated necksizes")
    return parser


def _apply_config(args):
    if getattr(args, "config", None) is None:
        return
    with open(args.config, "rb") as fh:
        data = tomllib.load(fh)
    for key in _CONFIG_KEYS:
        if getattr(args, key, None) is None and key in data:
            setattr(args, key, data[key])


def _integrator_config(args, r0):
    kwargs = {}
    if args.xmax is not None:
        if not args.xmax > r0:
            raise ValueError(f"--xmax must exceed the necksize {r0!r}")
        kwargs["x_max"] = args.xmax
    if args.rel_tol is not None:
        if not 0.0 < args.rel_tol <= 1e-2:
            raise ValueError("--rel-tol must lie in (0, 1e-2]")
        kwargs["rel_tol"] = args.rel_tol
    if args.abs_tol is not None:
        if not 0.0 < args.abs_tol <= 1e-2:
            raise ValueError("--abs-tol must lie in (0, 1e-2]")
        kwargs["abs_tol"] = args.abs_tol
    return IntegratorConfig(**kwargs)


def _require(args, *names):
    for name in names:
        if getattr(args, name, None) is None:
            flag = "--" + name.replace("_", "-")
            raise ValueError(f"{flag} is required for this subcommand")


def _r0(args):
    r0 = 1.0 if args.r0 is None else float(args.r0)
    if not r0 > 0.0:
        raise ValueError("--r0 must be positive")
    return r0


def _dump_json(doc):
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def _emit(text, out):
    if out:
        with open(out, "w", encoding="ascii") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def _cmd_profile(args):
    _require(args, "h")
    H = parse_prescription(args.h)
    r0 = _r0(args)
    cat = integrate_catenoid(H, r0, _integrator_config(args, r0))
    branches = _branches(args)
    if args.out:
        export_profile_csv(cat, args.out, branches)
    else:
        from .profile import profile_rows
        lines = ["s,x,z,theta,nu,kappa1,kappa2,sff_norm_sq,branch"]
        for row in profile_rows(cat, branches):
            lines.append(",".join([repr(float(v)) for v in row[:8]] + [row[8]]))
        sys.stdout.write("\n".join(lines) + "\n")
    return 0


def _branches(args):
    branch = args.branch or "both"
    return ("upper", "lower") if branch == "both" else (branch,)


def _cmd_classify(args):
    _require(args, "h")
    H = parse_prescription(args.h)
    r0 = _r0(args)
    cat = integrate_catenoid(H, r0, _integrator_config(args, r0))
    doc = {"prescription": H.describe(), "r0": r0, "branches": {}}
    for branch in _branches(args):
        doc["branches"][branch] = classification_to_dict(classify_end(cat, branch))
    _emit(_dump_json(doc), args.out)
    return 0


def _cmd_compare(args):
    _require(args, "h", "f")
    H = parse_prescription(args.h)
    F = parse_prescription(args.f)
    r0 = _r0(args)
    x_max = args.xmax
    if args.window is not None:
        lo, hi = (float(v) for v in str(args.window).split(","))
        x_max = hi
        if lo <= r0:
            raise ValueError("comparison window must start beyond the necksize")
    report = compare_derivatives(H, F, r0, x_max=x_max)
    if (args.format or "json") == "csv":
        if not args.out:
            raise ValueError("--out is required for csv format")
        comparison_rows_csv(report, args.out)
    else:
        _emit(_dump_json(comparison_to_dict(report)), args.out)
    return 0 if report.height_ok and report.derivative_ok else 1


def _cmd_equiv(args):
    _require(args, "h", "f")
    H = parse_prescription(args.h)
    F = parse_prescription(args.f)
    r0 = _r0(args)
    doc = {"pair": [H.describe(), F.describe()], "r0": r0, "endpoints": {}}
    any_equivalent = False
    mismatch = False
    for endpoint, key in ((1, "+1"), (-1, "-1")):
        try:
            rep = equivalence_behavior(H, F, r0, endpoint=endpoint)
        except PreconditionError as exc:
            doc["endpoints"][key] = {"equivalent": False, "detail": str(exc)}
            continue
        any_equivalent = True
        mismatch = mismatch or not rep.passed
        doc["endpoints"][key] = {
            "equivalent": True,
            "ratio_limit": rep.ratio.ratio_limit,
            "verdicts": list(rep.verdicts),
            "transfer_ok": rep.passed,
            "inconclusive": list(rep.inconclusive),
        }
    _emit(_dump_json(doc), args.out)
    if not any_equivalent or mismatch:
        return 1
    return 0


def _cmd_certify(args):
    _require(args, "h")
    H = parse_prescription(args.h)
    cert = halfspace.certify(halfspace.SphereFunction.axisymmetric(H))
    _emit(_dump_json(halfspace.certificate_to_dict(cert)), args.out)
    return 0


def _cmd_mesh(args):
    _require(args, "h", "out")
    H = parse_prescription(args.h)
    r0 = _r0(args)
    rings = args.rings if args.rings is not None else 32
    segments = args.segments if args.segments is not None else 64
    if rings < 2:
        raise ValueError("--rings must be at least 2")
    if segments < 3:
        raise ValueError("--segments must be at least 3")
    cfg = _integrator_config(args, r0)
    if args.xmax is None:
        cfg = IntegratorConfig(x_max=100.0 * r0, rel_tol=cfg.rel_tol,
                               abs_tol=cfg.abs_tol)
    cat = integrate_catenoid(H, r0, cfg)
    export_mesh_obj(mesh(cat, rings, segments), args.out)
    return 0


def _cmd_sweep(args):
    _require(args, "h", "r_list")
    H = parse_prescription(args.h)
    radii = [float(v) for v in str(args.r_list).split(",") if v.strip()]
    if not radii:
        raise ValueError("--r-list must contain at least one necksize")
    if any(r <= 0 for r in radii):
        raise ValueError("necksizes must be positive")

    def worker(r):
        xmax = args.xmax if args.xmax is not None else 1e4 * r
        cfg = IntegratorConfig(
            x_max=xmax,
            rel_tol=args.rel_tol if args.rel_tol is not None else 1e-10,
            abs_tol=args.abs_tol if args.abs_tol is not None else 1e-12)
        cat = integrate_catenoid(H, r, cfg)
        return {
            "r0": r,
            "branches": {b: classification_to_dict(classify_end(cat, b))
                         for b in ("upper", "lower")},
        }

    with ThreadPoolExecutor(max_workers=os.cpu_count() or 1) as pool:
        results = list(pool.map(worker, radii))   # input order preserved
    doc = {"prescription": H.describe(), "items": results}
    _emit(_dump_json(doc), args.out)
    return 0


_HANDLERS = {
    "profile": _cmd_profile,
    "classify": _cmd_classify,
    "compare": _cmd_compare,
    "equiv": _cmd_equiv,
    "certify": _cmd_certify,
    "mesh": _cmd_mesh,
    "sweep": _cmd_sweep,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        _apply_config(args)
        return _HANDLERS[args.command](args)
    except PreconditionError as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return 1
    except (ParseError, DomainError, BranchRangeError, ValueError, OSError,
            IntegrationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entrypoint():
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
