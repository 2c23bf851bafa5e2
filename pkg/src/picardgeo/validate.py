"""The runnable invariant suite behind ``picardgeo validate``.

Each check returns a row (name, status, value, reference, note); the
collected table is deterministic for a fixed package version and golden
file, independent of the worker count, so reruns must be byte-identical.
Golden values are measured once on a reference run and asserted as
non-regression bounds thereafter.
"""

from __future__ import annotations

import importlib.resources
import json
import math
import warnings
from typing import NamedTuple

import numpy as np

from . import census as census_mod
from . import kloosterman as kl
from . import transforms as tr
from .gaussian import GaussianInt, canonical_nonzero, totient
from .spectral import load_spectrum

G = GaussianInt


class CheckRow(NamedTuple):
    check: str
    status: str
    value: float
    reference: float
    note: str


def load_golden(path=None) -> dict:
    if path is not None:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    ref = importlib.resources.files("picardgeo.data").joinpath("golden.json")
    return json.loads(ref.read_text(encoding="utf-8"))


def default_spectrum_path():
    return importlib.resources.files("picardgeo.data").joinpath(
        "picard_spectrum.csv"
    )


def _row(name, ok, value, reference, note="") -> CheckRow:
    return CheckRow(name, "pass" if ok else "FAIL", value, reference, note)


def check_kloosterman(rows, golden):
    ms = [G(1, 0), G(0, 1), G(1, 1), G(0, 0)]
    worst_pair = 0.0
    worst_imag = 0.0
    worst_sym = 0.0
    worst_tot = 0.0
    for c in canonical_nonzero(200):
        for i, m in enumerate(ms):
            for n in ms[i:]:
                a = kl.kloosterman(m, n, c, strategy="naive")
                b = kl.kloosterman(m, n, c, strategy="factored")
                t = max(a.terms, 1)
                worst_pair = max(worst_pair, abs(a.value - b.value) / t)
                worst_imag = max(worst_imag, a.imag_residual / t)
                s = kl.kloosterman(n, m, c, strategy="naive")
                worst_sym = max(worst_sym, abs(a.value - s.value) / t)
        z = kl.kloosterman(G(0, 0), G(0, 0), c)
        worst_tot = max(worst_tot, abs(z.value - totient(c)))
    rows.append(_row("kloosterman_factored_vs_naive", worst_pair <= 1e-9, worst_pair, 1e-9))
    rows.append(_row("kloosterman_imag_residual", worst_imag <= 1e-10, worst_imag, 1e-10))
    rows.append(_row("kloosterman_symmetry", worst_sym <= 1e-10, worst_sym, 1e-10))
    rows.append(_row("kloosterman_totient_identity", worst_tot == 0.0, worst_tot, 0.0))


def weil_scan_max(norm_bound: int = 500) -> float:
    ms = [G(1, 0), G(1, 1), G(2, 0)]
    worst = 0.0
    for c in canonical_nonzero(norm_bound):
        for m in ms:
            for n in ms:
                worst = max(worst, kl.weil_ratio(m, n, c))
    return worst


def check_weil(rows, golden):
    worst = weil_scan_max()
    ref = golden["weil_ratio_max"]
    rows.append(
        _row(
            "weil_ratio_golden",
            abs(worst - ref) <= 1e-9,
            worst,
            ref,
            "box N(c)<=500, m,n in {1,1+i,2}",
        )
    )


def check_gcd_average(rows, golden):
    ref = golden["gcd_average_constant"]
    worst = 0.0
    for x in (1e3, 1e4, 1e5):
        res = kl.gcd_average(G(4, 0), G(6, 0), x)
        worst = max(worst, res.ratio / x**0.1)
    rows.append(
        _row(
            "gcd_average_growth",
            worst <= ref * (1 + 1e-9),
            worst,
            ref,
            "ratio / x^0.1 for x up to 1e5",
        )
    )


def check_census(rows, golden, threads: int = 1):
    table = census_mod.build_census(50.0, threads=threads)
    records = census_mod.trace_side_records(50.0, table)
    census_ms = sorted(
        (e.norm, e.pell.d.re, e.pell.d.im, e.k, e.h, e.h * e.lambda_weight)
        for e in table.entries
    )
    trace_ms = sorted((r.norm, r.d.re, r.d.im, r.k, r.h, r.weight) for r in records)
    rows.append(
        _row(
            "census_trace_crosscheck",
            census_ms == trace_ms,
            float(len(trace_ms)),
            float(len(census_ms)),
            "exact weight multisets at x_max=50",
        )
    )
    exact = [
        census_mod.psi(x, table) == census_mod.trace_side_psi(x, table)
        for x in (10.0, 30.0, 50.0)
    ]
    rows.append(_row("census_psi_equality", all(exact), float(sum(exact)), 3.0))

    smallest = table.entries[0].norm
    ref = golden["smallest_class_norm"]
    rows.append(_row("smallest_class_norm", abs(smallest - ref) <= 1e-12, smallest, ref))

    pell5 = census_mod.pell_fundamental(G(5, 0), 10.0)
    phi = (1.0 + math.sqrt(5.0)) / 2.0
    rows.append(
        _row("pell_d5_fundamental", abs(pell5.abs_eps - phi) <= 1e-12, pell5.abs_eps, phi)
    )
    h5 = census_mod.class_number_stable(G(5, 0))
    rows.append(_row("class_number_d5", h5 == golden["class_number_d5"], float(h5),
                     float(golden["class_number_d5"])))


def check_transforms(rows, golden):
    worst = 0.0
    for s in (1.0, 2.0, 5.0):
        for x in (0.5, s / 2.0, s - 0.1):
            worst = max(
                worst, abs(tr.g_window(x, s) - tr.g_from_h_quadrature(x, s))
            )
    rows.append(_row("fourier_pair_inversion", worst <= 1e-6, worst, 1e-6))

    h0 = tr.h_window(0.0, 2.0)
    ref0 = 4.0 * math.sinh(2.0) - 8.0
    rows.append(_row("h_window_zero_limit", abs(h0 - ref0) <= 1e-12, h0, ref0))

    x_val, t_val = 100.0, 10.0
    worst_k = max(
        abs(tr.kuznetsov_h_asymptotic_residual(0.5 * i, x_val, t_val))
        / math.exp(-math.pi * 0.5 * i)
        for i in range(2, 61)
    )
    refk = golden["kuznetsov_residual_constant"]
    rows.append(
        _row("kuznetsov_asymptotic", worst_k <= refk * (1 + 1e-9), worst_k, refk)
    )
    even = tr.kuznetsov_h(3.0, x_val, t_val) == tr.kuznetsov_h(-3.0, x_val, t_val)
    rows.append(_row("kuznetsov_even", even, 1.0 if even else 0.0, 1.0))

    from scipy import special

    k0 = tr.k_bessel_imag_order(0.0, 1.0)
    rows.append(_row("k_bessel_k0", abs(k0 - special.k0(1.0)) <= 1e-8, k0,
                     float(special.k0(1.0))))
    a = tr.cosh_weighted_k(1.0, 2.0)
    b = math.cosh(math.pi) * tr.k_bessel_imag_order(1.0, 2.0)
    rows.append(_row("cosh_weighted_k_consistency", abs(a - b) <= 1e-8, a, b))

    t_loc = 20.0
    m_loc = t_loc**0.8
    big = tr.i_transform(2 * t_loc, t_loc, m_loc)
    small = tr.i_transform(t_loc / 200.0, t_loc, m_loc)
    ratio = abs(big / small) if small else math.inf
    rows.append(_row("i_transform_localization", ratio >= 1e6, ratio, 1e6))

    worst_q = 0.0
    for k, refname in ((2, "qhat_decay_c2"), (4, "qhat_decay_c4")):
        refq = golden[refname]
        for rr in (5.0, 10.0, 30.0, 100.0):
            val = abs(tr.bump_hat(0.1 * rr)) * (0.1 * rr) ** k
            worst_q = max(worst_q, val / refq)
        rows.append(
            _row(f"qhat_decay_k{k}", worst_q <= 1.0 + 1e-9, worst_q, 1.0)
        )


# ---------------------------------------------------------------------------
# shared measurements (used by the golden generator and the acceptance suite)
# ---------------------------------------------------------------------------


def acceptance_grid(x_max: float, n: int = 1100) -> np.ndarray:
    """The frozen X grid for explicit-formula and error-term scans."""
    return np.exp(np.linspace(math.log(10.0), math.log(x_max), n))


def explicit_formula_constants(census, spectrum, heights=(5.0, 10.0, 20.0)):
    """Fitted constants C(T) = max over the grid of |E - sum| * T/(X^2 log X)."""
    from .census import error_term
    from .spectral import explicit_formula_error

    xs = acceptance_grid(census.x_max)
    e_vals = np.array([error_term(float(x), census) for x in xs])
    out = {}
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for t in heights:
            resid = np.array(
                [
                    abs(e - explicit_formula_error(float(x), t, spectrum))
                    for x, e in zip(xs, e_vals)
                ]
            )
            out[t] = float(np.max(resid * t / (xs * xs * np.log(xs))))
    return out


def sarnak_ratio_profile(census):
    """max |E(X)|/X^{5/3} over the frozen grid, overall and on X <= 100."""
    from .census import error_term

    xs = acceptance_grid(census.x_max, n=240)
    ratios = np.array(
        [abs(error_term(float(x), census)) / x ** (5.0 / 3.0) for x in xs]
    )
    low = float(np.max(ratios[xs <= 100.0]))
    return float(np.max(ratios)), low


def sandwich_constant(s: float = 2.0, delta: float = 0.1) -> float:
    """Smallest C with g_- <= g + C d e^x and g <= g_+ + C d e^x on [0, s]."""
    mp = tr.mollified_pair(s, delta)
    worst = 0.0
    for i in range(0, 21):
        x = s * i / 20.0
        slack = delta * math.exp(x)
        worst = max(
            worst,
            (mp.g_minus(x) - tr.g_window(x, s)) / slack,
            (tr.g_window(x, s) - mp.g_plus(x)) / slack,
        )
    return max(worst, 1e-9)


LEMMA41_R_GRID = (0.0, 1.0, 5.0, 20.0)
LEMMA41_WINDOWS = ((1e3, 1e2), (1e4, 1e3))


def lemma41_constant(delta: float = 0.1) -> float:
    """max of |window pair integral| / ((V^3/D) u(r1)u(r2)u(|r1|-|r2|))."""

    def u(r):
        return 1.0 / (1.0 + abs(r))

    worst = 0.0
    for v, dl in LEMMA41_WINDOWS:
        for r1 in LEMMA41_R_GRID:
            for r2 in LEMMA41_R_GRID:
                bound = v**3 / dl * u(r1) * u(r2) * u(abs(r1) - abs(r2))
                for sign in (+1, -1):
                    val = tr.window_pair_integral(r1, r2, v, dl, sign, delta)
                    worst = max(worst, abs(val) / bound)
    return worst


THM12_WINDOWS = ((1e3, 1e2), (1e3, 1e3))
THM12_LARGE_WINDOW = (1e4, 1e3)


def thm12_ratio(census, v: float, dl: float) -> float:
    moment = census_mod.second_moment_error(v, dl, census)
    scale = v ** (18.0 / 5.0) * dl ** (-2.0 / 5.0) * math.log(v) ** 0.4
    return moment / scale


def kuznetsov_constant(x: float = 100.0, t: float = 10.0) -> float:
    return max(
        abs(tr.kuznetsov_h_asymptotic_residual(0.5 * i, x, t))
        / math.exp(-math.pi * 0.5 * i)
        for i in range(2, 61)
    )


def qhat_decay_constant(k: int) -> float:
    worst = 0.0
    for u in (0.5, 1.0, 2.0, 3.0, 5.0, 8.0, 12.0, 20.0):
        worst = max(worst, abs(tr.bump_hat(u)) * u**k)
    return worst


def i_transform_diagnostics(t_loc: float = 20.0):
    """Localization ratio and the Gaussian-shape fit residual near x = 2T."""
    m_loc = t_loc**0.8
    big = tr.i_transform(2.0 * t_loc, t_loc, m_loc)
    small = tr.i_transform(t_loc / 200.0, t_loc, m_loc)
    ratio = abs(big) / max(abs(small), 1e-300)
    xs = [2.0 * t_loc + m_loc * f for f in (-1.0, -0.75, -0.5, -0.25, 0.0, 0.25, 0.5, 0.75, 1.0)]
    ys = [tr.i_transform(x, t_loc, m_loc) / (x * x) for x in xs]
    ws = [math.exp(-((x - 2 * t_loc) ** 2) / (4 * m_loc * m_loc)) for x in xs]
    scale = sum(y * w for y, w in zip(ys, ws)) / sum(w * w for w in ws)
    num = math.sqrt(sum((y - scale * w) ** 2 for y, w in zip(ys, ws)))
    den = math.sqrt(sum(y * y for y in ys))
    return ratio, num / den


def run_validation(
    threads: int = 1, golden_path=None, spectrum_path=None
) -> list[CheckRow]:
    golden = load_golden(golden_path)
    rows: list[CheckRow] = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        check_kloosterman(rows, golden)
        check_weil(rows, golden)
        check_gcd_average(rows, golden)
        check_census(rows, golden, threads=threads)
        check_transforms(rows, golden)
        if spectrum_path is None:
            spectrum_path = default_spectrum_path()
        spec = load_spectrum(spectrum_path)
        rows.append(
            _row(
                "spectrum_file_size",
                sum(s.multiplicity for s in spec) >= 50,
                float(sum(s.multiplicity for s in spec)),
                50.0,
            )
        )
    return rows


def all_passed(rows: list[CheckRow]) -> bool:
    return all(r.status == "pass" for r in rows)
