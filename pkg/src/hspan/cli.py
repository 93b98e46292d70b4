"""Command line front end: ``hspan span|scan|verify|sfunction``.

Exit codes: 0 success, 1 verification failure, 2 bad input, 3 solver failure.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .domain import load_domain
from .errors import HspanError, InvalidDomain, ExpressionError

EMIT_CHOICES = ("csv", "json", "svg")


def _num(x):
    """Round to 9 significant digits for byte-stable output."""
    if isinstance(x, (bool, str)) or x is None:
        return x
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, complex):
        return [_num(x.real), _num(x.imag)]
    if isinstance(x, (list, tuple)):
        return [_num(v) for v in x]
    if isinstance(x, dict):
        return {k: _num(v) for k, v in x.items()}
    x = float(x)
    if not np.isfinite(x):
        return None
    return float(f"{x:.9g}")


def dumps(obj):
    return json.dumps(_num(obj), indent=2, sort_keys=False)


def _complex_arg(text):
    try:
        parts = [float(p) for p in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected re,im but got {text!r}")
    if len(parts) == 1:
        parts.append(0.0)
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected re,im but got {text!r}")
    return complex(*parts)


def _nodes(text):
    n = int(text)
    if n < 16 or n % 2:
        raise argparse.ArgumentTypeError("--nodes must be even and at least 16")
    return n


def _grid(text):
    n = int(text)
    if n < 1 or n % 2 == 0:
        raise argparse.ArgumentTypeError("--grid must be odd")
    return n


def _emit(text):
    items = [s.strip() for s in text.split(",") if s.strip()]
    bad = [s for s in items if s not in EMIT_CHOICES]
    if bad:
        raise argparse.ArgumentTypeError(f"unknown emit target(s): {', '.join(bad)}")
    return set(items)


class InputError(Exception):
    pass


def _fail(code, msg):
    print(f"hspan: {msg}", file=sys.stderr)
    return code


# ---------------------------------------------------------------------------
# commands


def span_summary(md, N):
    from .principal import build_slit_map, compute_principal_pair, e_log_area, extract_slit_data
    from .span import poincare_distance

    pair = compute_principal_pair(md, N)
    out = {
        "alpha": pair.alpha,
        "beta": pair.beta,
        "span": pair.span,
        "e_log": e_log_area(pair),
        "connectivity": md.connectivity,
    }
    if md.connectivity == 1:
        d = poincare_distance(md, N)
        out["poincare_distance"] = d
        out["identity_residual"] = abs(pair.span - 4 * np.log(np.cosh(d)))
    slits = []
    circ = extract_slit_data(build_slit_map(pair, "circular")).slits
    rad = extract_slit_data(build_slit_map(pair, "radial")).slits
    for j, (c, r) in enumerate(zip(circ, rad)):
        slits.append({
            "curve": j,
            "circular": {"radius": c.level, "theta": list(c.extent), "preimage_params": list(c.params)},
            "radial": {"angle": r.level, "r": list(r.extent), "preimage_params": list(r.params)},
        })
    out["slits"] = slits
    return pair, out


def cmd_span(args):
    md = _load_domain(args.domain)
    pair, out = span_summary(md, args.nodes)
    print(dumps(out))
    if args.emit & {"json", "svg"}:
        os.makedirs(args.out, exist_ok=True)
    if "json" in args.emit:
        with open(os.path.join(args.out, "span.json"), "w") as fh:
            fh.write(dumps(out) + "\n")
    if "svg" in args.emit:
        from .plotting import plot_slits

        plot_slits(pair, os.path.join(args.out, "slits.svg"))
    return 0


def _load_domain(path):
    try:
        return load_domain(path)
    except OSError as exc:
        raise InputError(str(exc))


def _load_family(name):
    from .variation import FAMILIES, family, load_family

    if os.path.exists(name):
        try:
            return load_family(name)
        except (OSError, ValueError, KeyError, TypeError) as exc:
            raise InputError(f"malformed family file: {exc}")
    if name in FAMILIES:
        return family(name)
    raise InputError(f"no family file or built-in family named {name!r}")


def cmd_scan(args):
    from .principal import compute_principal_pair
    from .variation import subharmonicity_scan, t_grid

    fam = _load_family(args.family)
    fam.validate()
    ts = t_grid(args.center, args.radius, args.grid)
    rep = subharmonicity_scan(fam, ts, h=args.ht, N=args.nodes)
    os.makedirs(args.out, exist_ok=True)
    if "csv" in args.emit:
        rep.to_csv(os.path.join(args.out, "scan.csv"))
    verdict = {"family": fam.name, **rep.flags}
    if "json" in args.emit:
        with open(os.path.join(args.out, "verdict.json"), "w") as fh:
            fh.write(dumps(verdict) + "\n")
    if "svg" in args.emit:
        from .plotting import plot_heatmap, plot_slits

        ok = [r for r in rep.rows if r["status"] == "ok"]
        plot_heatmap([r["t_re"] for r in ok], [r["t_im"] for r in ok], [r["span"] for r in ok],
                     os.path.join(args.out, "scan_span.svg"))
        pair = compute_principal_pair(fam.domain_at(args.center), args.nodes)
        plot_slits(pair, os.path.join(args.out, "slits.svg"))
    print(dumps(verdict))
    return 0


def cmd_verify(args):
    from .verification import run_suite

    failed = 0
    total = 0
    for k, title, checks in run_suite(args.suite):
        print(f"[{k}] {title}")
        for c in checks:
            total += 1
            failed += not c.passed
            print("    " + c.line())
    print(f"{total - failed}/{total} checks passed")
    return 1 if failed else 0


def cmd_sfunction(args):
    from .span import s_function_grid
    from .variation import t_grid

    md = _load_domain(args.domain)
    xi = md.a if args.xi is None else args.xi
    eta = t_grid(args.center, args.radius, args.grid)
    grid = s_function_grid(md, xi, eta, N=args.nodes)
    os.makedirs(args.out, exist_ok=True)
    if "csv" in args.emit:
        grid.to_csv(os.path.join(args.out, "sfunction.csv"))
    if "svg" in args.emit:
        from .plotting import plot_heatmap

        ok = np.isfinite(grid.values)
        plot_heatmap(grid.eta.real[ok], grid.eta.imag[ok], grid.values[ok],
                     os.path.join(args.out, "sfunction.svg"), title="s(xi, eta)",
                     xlabel="Re eta", ylabel="Im eta")
    summary = {
        "xi": complex(xi),
        "points": len(eta),
        "missing": int(np.sum(~np.isfinite(grid.values))),
        "min_span": float(np.nanmin(grid.values)) if np.any(np.isfinite(grid.values)) else None,
        "max_span": float(np.nanmax(grid.values)) if np.any(np.isfinite(grid.values)) else None,
    }
    print(dumps(summary))
    return 0


# ---------------------------------------------------------------------------


def build_parser():
    p = argparse.ArgumentParser(prog="hspan", description="Harmonic span of planar domains.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, emit="csv,json"):
        sp.add_argument("--nodes", type=_nodes, default=256, help="boundary nodes per curve")
        sp.add_argument("--out", default=".", help="output directory")
        sp.add_argument("--emit", type=_emit, default=_emit(emit), help="csv,json,svg")

    sp = sub.add_parser("span", help="α, β, s, E_log (and d when simply connected)")
    sp.add_argument("domain")
    common(sp, emit="")
    sp.set_defaults(func=cmd_span)

    sp = sub.add_parser("scan", help="subharmonicity scan over a t-grid")
    sp.add_argument("family", help="family JSON file or built-in family name")
    sp.add_argument("--grid", type=_grid, default=9)
    sp.add_argument("--center", type=_complex_arg, default=0j)
    sp.add_argument("--radius", type=float, default=0.3)
    sp.add_argument("--ht", type=float, default=1e-3)
    common(sp)
    sp.set_defaults(func=cmd_scan)

    sp = sub.add_parser("verify", help="run an acceptance suite")
    sp.add_argument("suite", choices=("disk", "identities", "variation", "all"))
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("sfunction", help="s(ξ, η) over an η-grid")
    sp.add_argument("domain")
    sp.add_argument("--xi", type=_complex_arg, default=None, help="fixed point (default: a)")
    sp.add_argument("--grid", type=_grid, default=9)
    sp.add_argument("--center", type=_complex_arg, default=0j)
    sp.add_argument("--radius", type=float, default=0.5)
    common(sp, emit="csv")
    sp.set_defaults(func=cmd_sfunction)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, InvalidDomain, ExpressionError) as exc:
        return _fail(2, str(exc))
    except HspanError as exc:
        return _fail(3, f"{type(exc).__name__}: {exc}")


if __name__ == "__main__":
    sys.exit(main())
