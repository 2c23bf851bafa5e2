#!/usr/bin/env python3
"""Measure the fit-once-freeze constants and write golden.json.

Run once on a reference build; the validation and acceptance suites then
assert the recorded values as non-regression bounds.  Census-dependent
constants are measured on the deterministic census the acceptance suite
itself rebuilds, so reruns reproduce them bit for bit.

Usage:
    python3 tools/make_golden.py --census census2000.csv \
        --spectrum src/picardgeo/data/picard_spectrum.csv \
        --out src/picardgeo/data/golden.json
"""

from __future__ import annotations

import argparse
import json
import math

from picardgeo import validate as val
from picardgeo.census import build_census, class_number_stable, load_census_csv
from picardgeo.gaussian import GaussianInt
from picardgeo.spectral import load_spectrum


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--census", help="census CSV (otherwise built at --x-max)")
    ap.add_argument("--x-max", type=float, default=2000.0)
    ap.add_argument("--spectrum", required=True)
    ap.add_argument("--threads", type=int, default=2)
    ap.add_argument("--out", required=True)
    args = ap.parse_args()

    census = (
        load_census_csv(args.census)
        if args.census
        else build_census(args.x_max, threads=args.threads)
    )
    spectrum = load_spectrum(args.spectrum)

    golden: dict = {}
    golden["census_x_max"] = census.x_max

    print("weil scan ...", flush=True)
    golden["weil_ratio_max"] = val.weil_scan_max()

    print("gcd average ...", flush=True)
    from picardgeo.kloosterman import gcd_average

    golden["gcd_average_constant"] = max(
        gcd_average(GaussianInt(4, 0), GaussianInt(6, 0), x).ratio / x**0.1
        for x in (1e3, 1e4, 1e5)
    )

    print("census scalars ...", flush=True)
    golden["smallest_class_norm"] = census.entries[0].norm
    golden["class_number_d5"] = class_number_stable(GaussianInt(5, 0))

    print("sarnak profile ...", flush=True)
    overall, low = val.sarnak_ratio_profile(census)
    golden["sarnak_ratio_max"] = overall
    golden["sarnak_ratio_low_band"] = low

    print("explicit formula constants ...", flush=True)
    cs = val.explicit_formula_constants(census, spectrum)
    golden["explicit_c5"] = cs[5.0]
    golden["explicit_c10"] = cs[10.0]
    golden["explicit_c20"] = cs[20.0]

    print("transform constants ...", flush=True)
    golden["kuznetsov_residual_constant"] = val.kuznetsov_constant()
    golden["qhat_decay_c2"] = val.qhat_decay_constant(2)
    golden["qhat_decay_c4"] = val.qhat_decay_constant(4)
    golden["sandwich_constant"] = val.sandwich_constant()

    print("lemma 4.1 ratios ...", flush=True)
    golden["lemma41_constant"] = val.lemma41_constant()

    print("second-moment ratios ...", flush=True)
    golden["thm12_constant"] = max(
        val.thm12_ratio(census, v, dl) for v, dl in val.THM12_WINDOWS
    )

    print("I-transform diagnostics ...", flush=True)
    ratio, shape = val.i_transform_diagnostics()
    golden["i_localization_ratio"] = ratio
    golden["i_shape_residual"] = shape

    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(golden, fh, indent=2, sort_keys=True)
        fh.write("\n")
    for k in sorted(golden):
        print(f"  {k} = {golden[k]}")
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
