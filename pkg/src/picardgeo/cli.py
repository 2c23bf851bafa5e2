"""Command-line surface: censuses, experiments and validation tables.

Every command emits plain CSV (15 significant digits, LF endings) so the
curves and tables can be consumed downstream; identical configurations
produce byte-identical files regardless of the worker count.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import warnings

import numpy as np

from . import census as census_mod
from . import kloosterman as kl
from . import transforms as tr
from . import validate as validate_mod
from .gaussian import canonical_nonzero, parse_gaussian
from .spectral import explicit_formula_error, load_spectrum, spectral_exponential_sum

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_CONFIG = 2


class ConfigError(ValueError):
    pass


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return f"{value:.15g}"
    return str(value)


def export_table(rows, schema, path) -> None:
    """Write rows as CSV under the given header; refuses mismatched rows."""
    schema = list(schema)
    for i, row in enumerate(rows):
        if len(row) != len(schema):
            raise ConfigError(
                f"row {i} has {len(row)} fields, schema expects {len(schema)}"
            )
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(",".join(schema) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def parse_grid(text: str) -> list[float]:
    """'a:b:step' inclusive arithmetic grid, or a comma list of values."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError(f"grid spec {text!r} is not 'a:b:step'")
        a, b, step = (float(p) for p in parts)
        if step <= 0 or b < a:
            raise ConfigError(f"bad grid range {text!r}")
        out = []
        v = a
        while v <= b * (1 + 1e-12):
            out.append(v)
            v += step
        return out
    return [float(p) for p in text.split(",") if p]


def _load_or_build_census(args):
    if getattr(args, "census_file", None):
        return census_mod.load_census_csv(args.census_file)
    return census_mod.build_census(
        args.x_max,
        height_cap=args.height_cap,
        search_limit=args.search_limit,
        threads=args.threads,
    )


def cmd_census(args) -> int:
    table = _load_or_build_census(args)
    out = args.export or os.path.join(args.out, "census.csv")
    table.export_csv(out)
    print(f"{len(table)} classes up to norm {table.x_max:g} -> {out}")
    return EXIT_OK


def cmd_psi(args) -> int:
    table = _load_or_build_census(args)
    grid = parse_grid(args.grid) if args.grid else list(
        np.linspace(2.0, table.x_max, 50)
    )
    rows = []
    for x in grid:
        p = census_mod.psi(x, table)
        m = census_mod.main_term(x)
        rows.append((x, p, m, p - m))
    out = os.path.join(args.out, "psi.csv")
    export_table(rows, ["X", "psi", "main_term", "error"], out)
    print(f"{len(rows)} rows -> {out}")
    return EXIT_OK


def cmd_class_sum(args) -> int:
    table = _load_or_build_census(args)
    top = math.sqrt(table.x_max)
    grid = parse_grid(args.grid) if args.grid else list(
        np.linspace(2.0, top, 25)
    )
    rows = []
    for x in grid:
        if x * x > table.x_max:
            raise ConfigError(f"X={x:g} needs census coverage to {x * x:g}")
        total, resid = census_mod.class_number_sum(x, table)
        rows.append((x, total, census_mod.li(x**4), resid))
    out = os.path.join(args.out, "class_sum.csv")
    export_table(rows, ["X", "sum_h", "li_x4", "residual"], out)
    print(f"{len(rows)} rows -> {out}")
    return EXIT_OK


def cmd_second_moment(args) -> int:
    table = _load_or_build_census(args)
    vs = parse_grid(args.grid) if args.grid else [args.v]
    rows = []
    for v in vs:
        val = census_mod.second_moment_error(v, args.window, table)
        scale = v ** (18.0 / 5.0) * args.window ** (-2.0 / 5.0) * math.log(v) ** 0.4
        rows.append((v, args.window, val, val / scale))
    out = os.path.join(args.out, "second_moment.csv")
    export_table(rows, ["V", "Delta", "moment", "scaled"], out)
    print(f"{len(rows)} rows -> {out}")
    return EXIT_OK


def cmd_kloosterman(args) -> int:
    m = parse_gaussian(args.m)
    n = parse_gaussian(args.n)
    if args.c:
        c = parse_gaussian(args.c)
        res = kl.kloosterman(m, n, c, strategy=args.strategy, force=args.force)
        ratio = kl.weil_ratio(m, n, c)
        print(
            f"S({m},{n};{c}) = {res.value:.15g} "
            f"(imag {res.imag_residual:.3g}, {res.terms} terms, weil ratio {ratio:.6g})"
        )
        return EXIT_OK
    rows = []
    for c in canonical_nonzero(args.norm_max):
        res = kl.kloosterman(m, n, c, strategy="factored")
        rows.append((str(c), c.norm(), res.value, kl.weil_ratio(m, n, c)))
    out = os.path.join(args.out, "kloosterman.csv")
    export_table(rows, ["c", "norm_c", "value", "weil_ratio"], out)
    print(f"{len(rows)} rows -> {out}")
    return EXIT_OK


def cmd_explicit_formula(args) -> int:
    table = _load_or_build_census(args)
    spectrum = load_spectrum(args.spectrum or validate_mod.default_spectrum_path())
    grid = parse_grid(args.grid) if args.grid else list(
        np.exp(np.linspace(math.log(10.0), math.log(table.x_max), 40))
    )
    t_values = parse_grid(args.t_max) if args.t_max else [5.0, 10.0, 20.0]
    rows = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for t in t_values:
            for x in grid:
                e = census_mod.error_term(x, table)
                f = explicit_formula_error(x, t, spectrum)
                s = spectral_exponential_sum(t, x, spectrum)
                rows.append((x, t, e, f, e - f, abs(s)))
    out = os.path.join(args.out, "explicit_formula.csv")
    export_table(
        rows, ["X", "T", "E_census", "formula", "residual", "abs_S"], out
    )
    print(f"{len(rows)} rows -> {out}")
    return EXIT_OK


def cmd_transforms(args) -> int:
    rows_h = []
    for s in parse_grid(args.s_values):
        for r in np.linspace(0.0, 30.0, 301):
            rows_h.append((s, float(r), tr.h_window(float(r), s)))
    out_h = os.path.join(args.out, "h_window.csv")
    export_table(rows_h, ["s", "r", "h"], out_h)

    t_loc = args.t_max_single
    m_loc = t_loc**0.8
    rows_i = []
    for x in np.linspace(t_loc / 200.0, 3.0 * t_loc, 120):
        rows_i.append((float(x), tr.i_transform(float(x), t_loc, m_loc)))
    out_i = os.path.join(args.out, "i_transform.csv")
    export_table(rows_i, ["x", "I"], out_i)
    print(f"h curves -> {out_h}; I curve -> {out_i}")
    return EXIT_OK


def cmd_validate(args) -> int:
    rows = validate_mod.run_validation(
        threads=args.threads,
        golden_path=args.golden,
        spectrum_path=args.spectrum,
    )
    out = os.path.join(args.out, "validate.csv")
    export_table(
        [(r.check, r.status, r.value, r.reference, r.note) for r in rows],
        ["check", "status", "value", "reference", "note"],
        out,
    )
    failed = [r for r in rows if r.status != "pass"]
    for r in rows:
        print(f"{r.status:>4}  {r.check:<34} {r.value:.9g} (ref {r.reference:.9g})")
    print(f"report -> {out}")
    return EXIT_VALIDATION if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="picardgeo",
        description="prime-geodesic statistics for the Picard manifold",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, census=True):
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--threads", type=int, default=1)
        if census:
            p.add_argument("--x-max", type=float, default=200.0)
            p.add_argument("--census-file", help="reuse an exported census CSV")
            p.add_argument("--height-cap", type=int, default=0)
            p.add_argument("--search-limit", type=float, default=0.0)

    p = sub.add_parser("census", help="build and export the geodesic census")
    common(p)
    p.add_argument("--export", help="output CSV path (default <out>/census.csv)")
    p.set_defaults(func=cmd_census)

    p = sub.add_parser("psi", help="table of X, psi, main term, error")
    common(p)
    p.add_argument("--grid", help="'a:b:step' or comma list of X values")
    p.set_defaults(func=cmd_psi)

    p = sub.add_parser("class-sum", help="class-number sums against Li(X^4)")
    common(p)
    p.add_argument("--grid", help="'a:b:step' of X (census must cover X^2)")
    p.set_defaults(func=cmd_class_sum)

    p = sub.add_parser("second-moment", help="windowed second moment of the error")
    common(p)
    p.add_argument("--v", type=float, default=100.0)
    p.add_argument("--window", type=float, default=50.0)
    p.add_argument("--grid", help="grid of V values")
    p.set_defaults(func=cmd_second_moment)

    p = sub.add_parser("kloosterman", help="single sum or box scan")
    common(p, census=False)
    p.add_argument("--m", required=True, help="Gaussian integer literal, e.g. 1+1i")
    p.add_argument("--n", required=True)
    p.add_argument("--c", help="modulus; omit to scan the box")
    p.add_argument("--norm-max", type=float, default=100.0)
    p.add_argument("--strategy", choices=("naive", "factored"), default="naive")
    p.add_argument("--force", action="store_true",
                   help="allow naive sums beyond the N(c) safety limit")
    p.set_defaults(func=cmd_kloosterman)

    p = sub.add_parser("explicit-formula", help="census vs spectral comparison")
    common(p)
    p.add_argument("--spectrum", help="spectrum file (default: bundled)")
    p.add_argument("--t-max", help="comma list of truncation heights T")
    p.add_argument("--grid", help="X grid")
    p.set_defaults(func=cmd_explicit_formula)

    p = sub.add_parser("transforms", help="diagnostic curves for h_s and I(x)")
    common(p, census=False)
    p.add_argument("--s-values", default="1,2,5")
    p.add_argument("--t-max-single", type=float, default=20.0)
    p.set_defaults(func=cmd_transforms)

    p = sub.add_parser("validate", help="run the invariant suite")
    common(p, census=False)
    p.add_argument("--golden", help="golden constants JSON (default: bundled)")
    p.add_argument("--spectrum", help="spectrum file (default: bundled)")
    p.set_defaults(func=cmd_validate)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    raise SystemExit(main())
