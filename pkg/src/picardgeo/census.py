"""The prime-geodesic census for the Picard group.

Hyperbolic/loxodromic conjugacy-class families are parameterized by
discriminants d of binary quadratic forms over Z[i]: each d with a
Pell-type solution t^2 - d u^2 = 4 of modulus |eps| = |t + u sqrt(d)|/2
greater than one contributes h(d) primitive classes of norm |eps_d|^2,
plus all powers.  The census materializes every class family with norm
up to a bound as an exact jump-function representation of the counting
function psi(X) = sum of log N(P0) over classes of norm N(P) <= X.

Class numbers are computed by orbit counting: enumerate all primitive
forms (a,b,c) with b^2 - 4ac = d inside a coefficient box, connect them
by the unimodular substitutions T, T_i, S, and count components.  The
count is accepted only when it is stable between a height cap and its
double; there is no shortcut through L-functions here, by design.

An independent trace-side enumeration (over matrix traces t rather than
discriminants) rebuilds psi from the opposite direction and must agree
with the census exactly, weight by weight.
"""

from __future__ import annotations

import bisect
import math
import threading
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterator, NamedTuple, Optional, Sequence

import numpy as np
from scipy import integrate

from .gaussian import (
    GaussianDomainError,
    GaussianInt,
    divisors,
    gcd_all,
    mod_canonical,
    sqrt_exact,
)

__all__ = [
    "CensusTable",
    "CoverageError",
    "GeodesicClass",
    "NonConvergedError",
    "PellUnit",
    "TraceRecord",
    "build_census",
    "class_number",
    "class_number_sum",
    "enumerate_discriminants",
    "error_term",
    "is_discriminant",
    "li",
    "main_term",
    "pell_fundamental",
    "psi",
    "second_moment_error",
    "trace_side_psi",
    "trace_side_records",
]


class NonConvergedError(RuntimeError):
    """Class-number orbit count did not stabilize under cap doubling."""


class CoverageError(ValueError):
    """The census does not certifiably cover the requested range."""


class DecompositionError(RuntimeError):
    """A trace failed to decompose consistently against the census."""


# ---------------------------------------------------------------------------
# discriminants
# ---------------------------------------------------------------------------

FOUR = GaussianInt(4, 0)


def _square_residues_mod4() -> frozenset[tuple[int, int]]:
    out = set()
    for x in range(4):
        for y in range(4):
            s = mod_canonical(GaussianInt(x, y) * GaussianInt(x, y), FOUR)
            out.add((s.re, s.im))
    return frozenset(out)


SQUARE_RESIDUES_MOD4 = _square_residues_mod4()


def is_discriminant(m: GaussianInt) -> bool:
    """m = y^2 (mod 4) for some y, and m is not a perfect square."""
    if (m.re % 4, m.im % 4) not in SQUARE_RESIDUES_MOD4:
        return False
    return sqrt_exact(m) is None


def enumerate_discriminants(bound: float) -> list[GaussianInt]:
    """All discriminants d with |d| <= bound, sorted by (norm, re, im)."""
    out: list[GaussianInt] = []
    if bound < 1.0:
        return out
    r = int(bound)
    nb = None
    # shave the float edge: |d| <= bound means norm <= bound^2
    nb = int(bound * bound * (1 + 1e-15))
    for x in range(-r, r + 1):
        ylim = math.isqrt(max(nb - x * x, 0))
        for y in range(-ylim, ylim + 1):
            if (x % 4, y % 4) not in SQUARE_RESIDUES_MOD4:
                continue
            d = GaussianInt(x, y)
            if x * x + y * y <= nb and sqrt_exact(d) is None:
                out.append(d)
    out.sort(key=lambda d: (d.norm(), d.re, d.im))
    return out


# ---------------------------------------------------------------------------
# Pell-type fundamental units
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class PellUnit:
    """Minimal |eps| > 1 solution of t^2 - d u^2 = 4 found below a search bound.

    eps = (t0 + u0 sqrt(d))/2 with the principal branch of sqrt(d);
    log_norm = 2 log|eps| is the weight log N(P0) of the class family.
    certified_abs_eps bounds the |eps| range the search provably covered:
    the unit is certified fundamental iff abs_eps <= certified_abs_eps.
    """

    d: GaussianInt
    t0: GaussianInt
    u0: GaussianInt
    abs_eps: float
    log_norm: float
    certified_abs_eps: float

    @property
    def certified(self) -> bool:
        return self.abs_eps <= self.certified_abs_eps


def _half_plane_points(limit: float) -> Iterator[GaussianInt]:
    """One representative per pair {u, -u}, 0 < |u| <= limit."""
    r = int(limit)
    lim2 = limit * limit * (1 + 1e-15)
    for y in range(1, r + 1):
        if y * y <= lim2:
            yield GaussianInt(0, y)
    for x in range(1, r + 1):
        ymax = int(math.sqrt(max(lim2 - x * x, 0.0)))
        for y in range(-ymax, ymax + 1):
            if x * x + y * y <= lim2:
                yield GaussianInt(x, y)


_ABS_EPS_TOL = 1e-9  # |eps| within this of 1 is treated as torsion


def pell_fundamental(d: GaussianInt, search_limit: float) -> Optional[PellUnit]:
    """Search |u| <= search_limit for the minimal-|eps| solution with |eps| > 1.

    Solutions come in pairs (t,u) ~ (-t,-u) giving eps and -eps, which are
    identified; the representative with t in the half plane {re > 0} or
    {re = 0, im > 0} is stored.  Returns None when nothing is in range.
    """
    sqrt_d = complex(np.sqrt(complex(d)))  # principal branch
    best_key = None
    best: tuple[float, GaussianInt, GaussianInt] | None = None
    for u in _half_plane_points(search_limit):
        z = FOUR + d * u * u
        t = sqrt_exact(z)
        if t is None or not t:
            continue
        for tt in (t, -t):
            eps = (complex(tt) + complex(u) * sqrt_d) / 2.0
            a = abs(eps)
            if a <= 1.0 + _ABS_EPS_TOL:
                continue
            t_rep, u_rep = tt, u
            if t_rep.re < 0 or (t_rep.re == 0 and t_rep.im < 0):
                t_rep, u_rep = -t_rep, -u_rep
            key = (
                a,
                t_rep.norm(),
                t_rep.re,
                t_rep.im,
                u_rep.norm(),
                u_rep.re,
                u_rep.im,
            )
            if best_key is None or key < best_key:
                best_key = key
                best = (a, t_rep, u_rep)
    b_cert = search_limit * math.sqrt(abs(complex(d)))
    if b_cert >= 2.0:
        certified = (b_cert + math.sqrt(b_cert * b_cert - 4.0)) / 2.0
    else:
        certified = 1.0
    if best is None:
        return None
    a, t0, u0 = best
    return PellUnit(
        d=d,
        t0=t0,
        u0=u0,
        abs_eps=a,
        log_norm=2.0 * math.log(a),
        certified_abs_eps=certified,
    )


# ---------------------------------------------------------------------------
# class numbers by orbit counting
# ---------------------------------------------------------------------------

Form = tuple[int, int, int, int, int, int]  # (a.re, a.im, b.re, b.im, c.re, c.im)


def _apply_T(f: Form) -> Form:
    ar, ai, br, bi, cr, ci = f
    return (ar, ai, br + 2 * ar, bi + 2 * ai, ar + br + cr, ai + bi + ci)


def _apply_T_inv(f: Form) -> Form:
    ar, ai, br, bi, cr, ci = f
    return (ar, ai, br - 2 * ar, bi - 2 * ai, ar - br + cr, ai - bi + ci)


def _apply_Ti(f: Form) -> Form:
    ar, ai, br, bi, cr, ci = f
    return (ar, ai, br - 2 * ai, bi + 2 * ar, -ar - bi + cr, -ai + br + ci)


def _apply_Ti_inv(f: Form) -> Form:
    ar, ai, br, bi, cr, ci = f
    return (ar, ai, br + 2 * ai, bi - 2 * ar, -ar + bi + cr, -ai - br + ci)


def _apply_S(f: Form) -> Form:
    ar, ai, br, bi, cr, ci = f
    return (cr, ci, -br, -bi, ar, ai)


_GENERATORS = (_apply_T, _apply_T_inv, _apply_Ti, _apply_Ti_inv, _apply_S)


def form_discriminant(f: Form) -> GaussianInt:
    a = GaussianInt(f[0], f[1])
    b = GaussianInt(f[2], f[3])
    c = GaussianInt(f[4], f[5])
    return b * b - FOUR * a * c


_CHUNK_CELLS = 1 << 22


def _primitive_forms(d: GaussianInt, height: int) -> list[Form]:
    """All primitive forms (a,b,c), b^2-4ac = d, with |component| <= height.

    The (a, c) box is swept with numpy; b is recovered by exact Gaussian
    square root of d + 4ac (all quantities stay far below 2^53, so the
    float square roots are exact after a one-step correction).
    """
    H = height
    side = np.arange(-H, H + 1, dtype=np.int64)
    cre = np.repeat(side, side.size)
    cim = np.tile(side, side.size)
    n_c = cre.size
    dre, dim = d.re, d.im

    forms: list[Form] = []
    chunk = max(1, _CHUNK_CELLS // n_c)
    a_pairs_re = cre  # the a sweep uses the same flattened box
    a_pairs_im = cim
    for lo in range(0, n_c, chunk):
        ar = a_pairs_re[lo : lo + chunk, None]
        ai = a_pairs_im[lo : lo + chunk, None]
        zre = dre + 4 * (ar * cre[None, :] - ai * cim[None, :])
        zim = dim + 4 * (ar * cim[None, :] + ai * cre[None, :])
        nrm = zre * zre + zim * zim
        s = np.sqrt(nrm.astype(np.float64)).astype(np.int64)
        s = np.where((s + 1) * (s + 1) <= nrm, s + 1, s)
        s = np.where(s * s > nrm, s - 1, s)
        ok = (s * s == nrm) & (((zre + s) & 1) == 0)
        if not ok.any():
            continue
        xx = np.where(ok, (zre + s) >> 1, 0)
        yy = np.where(ok, (s - zre) >> 1, 0)
        x = np.sqrt(xx.astype(np.float64)).astype(np.int64)
        x = np.where((x + 1) * (x + 1) <= xx, x + 1, x)
        y = np.sqrt(yy.astype(np.float64)).astype(np.int64)
        y = np.where((y + 1) * (y + 1) <= yy, y + 1, y)
        ok &= (x * x == xx) & (y * y == yy) & (2 * x * y == np.abs(zim))
        ok &= np.maximum(x, y) <= H
        ii, jj = np.nonzero(ok)
        for i, j in zip(ii.tolist(), jj.tolist()):
            bre = int(x[i, j])
            bim = int(y[i, j]) if int(zim[i, j]) >= 0 else -int(y[i, j])
            a_r = int(ar[i, 0])
            a_i = int(ai[i, 0])
            c_r = int(cre[j])
            c_i = int(cim[j])
            roots = ((bre, bim),) if bre == 0 and bim == 0 else ((bre, bim), (-bre, -bim))
            for br, bi_ in roots:
                f = (a_r, a_i, br, bi_, c_r, c_i)
                g = math.gcd(
                    math.gcd(abs(a_r), abs(a_i)),
                    math.gcd(
                        math.gcd(abs(br), abs(bi_)), math.gcd(abs(c_r), abs(c_i))
                    ),
                )
                if g > 1:
                    continue  # rational content, certainly imprimitive
                if (a_r or a_i) or (br or bi_) or (c_r or c_i):
                    content = gcd_all(
                        GaussianInt(a_r, a_i), GaussianInt(br, bi_), GaussianInt(c_r, c_i)
                    )
                    if content.norm() != 1:
                        continue
                forms.append(f)
    return forms


def _orbit_count(forms: list[Form]) -> int:
    """Connected components of the form set under the generator moves."""
    index = {f: i for i, f in enumerate(forms)}
    parent = list(range(len(forms)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for f, i in index.items():
        for gen in _GENERATORS:
            j = index.get(gen(f))
            if j is not None:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[ri] = rj
    return len({find(i) for i in range(len(forms))})


def _center_mod(br: int, bi: int, ar: int, ai: int) -> tuple[int, int]:
    """b - 2a*round(b/(2a)): the centered residue of b mod 2a (ties half-up)."""
    n4 = 4 * (ar * ar + ai * ai)
    tre = 2 * (br * ar + bi * ai)
    tim = 2 * (bi * ar - br * ai)
    zre = (2 * tre + n4) // (2 * n4)
    zim = (2 * tim + n4) // (2 * n4)
    return br - 2 * (ar * zre - ai * zim), bi - 2 * (ar * zim + ai * zre)


def _node_of(ar: int, ai: int, br: int, bi: int, dre: int, dim: int) -> Form:
    """Canonical translation-class representative (a, b centered, c exact)."""
    br, bi = _center_mod(br, bi, ar, ai)
    wre = br * br - bi * bi - dre
    wim = 2 * br * bi - dim
    fre, fim = 4 * ar, 4 * ai
    nf = fre * fre + fim * fim
    tre = wre * fre + wim * fim
    tim = -wre * fim + wim * fre
    return (ar, ai, br, bi, tre // nf, tim // nf)


def _thin_nodes(d: GaussianInt, na_cap: int) -> set[Form]:
    """Primitive forms of discriminant d with N(a) <= na_cap, one per T-orbit.

    For each leading coefficient a the square roots b of d mod 4a are found
    by a vectorized sweep of the centered residue box |b| <= sqrt(2 N(a))+1,
    which covers every translation class at least once.
    """
    dre, dim = d.re, d.im
    nodes: set[Form] = set()
    amax = math.isqrt(na_cap)
    for ar in range(-amax, amax + 1):
        for ai in range(-amax, amax + 1):
            na = ar * ar + ai * ai
            if na == 0 or na > na_cap:
                continue
            blim = math.isqrt(2 * na) + 1
            rng = np.arange(-blim, blim + 1, dtype=np.int64)
            bre = rng[:, None]
            bim = rng[None, :]
            wre = bre * bre - bim * bim - dre
            wim = 2 * bre * bim - dim
            fre, fim = 4 * ar, 4 * ai
            nf = fre * fre + fim * fim
            tre = wre * fre + wim * fim
            tim = -wre * fim + wim * fre
            ok = ((tre % nf) == 0) & ((tim % nf) == 0)
            ii, jj = np.nonzero(ok)
            for i, j in zip(ii.tolist(), jj.tolist()):
                nodes.add(_node_of(ar, ai, int(rng[i]), int(rng[j]), dre, dim))
    out: set[Form] = set()
    for f in nodes:
        g = math.gcd(
            math.gcd(abs(f[0]), abs(f[1])),
            math.gcd(math.gcd(abs(f[2]), abs(f[3])), math.gcd(abs(f[4]), abs(f[5]))),
        )
        if g > 1:
            continue
        ar, ai = _int_gauss_gcd(f[0], f[1], f[2], f[3])
        ar, ai = _int_gauss_gcd(ar, ai, f[4], f[5])
        if ar * ar + ai * ai == 1:
            out.add(f)
    return out


def _int_gauss_gcd(ar: int, ai: int, br: int, bi: int) -> tuple[int, int]:
    """Euclidean gcd on raw components (no normalization; hot path)."""
    while br or bi:
        n = br * br + bi * bi
        tre = ar * br + ai * bi
        tim = ai * br - ar * bi
        qre = (2 * tre + n) // (2 * n)
        qim = (2 * tim + n) // (2 * n)
        rre = ar - (qre * br - qim * bi)
        rim = ai - (qre * bi + qim * br)
        ar, ai, br, bi = br, bi, rre, rim
    return ar, ai


def _thin_count(d: GaussianInt, na_cap: int) -> int:
    """Orbits of the N(a) <= na_cap forms under translate-then-swap moves.

    Edges apply S after a translation z chosen near the complex roots of
    a z^2 + b z + c, the only places where the swapped leading coefficient
    can stay under the cap; every edge is an exact SL(2,Z[i]) equivalence,
    so components can only over-count, never merge wrongly.
    """
    nodes = _thin_nodes(d, na_cap)
    if not nodes:
        return 0
    idx = {f: i for i, f in enumerate(sorted(nodes))}
    parent = list(range(len(idx)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    dre, dim = d.re, d.im
    sqrt_d = complex(np.sqrt(complex(dre, dim)))  # = sqrt(b^2 - 4ac) for every node
    for f, i in idx.items():
        ar, ai, br, bi, cr, ci = f
        a = complex(ar, ai)
        b = complex(br, bi)
        na = ar * ar + ai * ai
        rad = math.sqrt(math.sqrt(na_cap / na)) + 0.8
        r_int = int(rad) + 1
        seen_z = set()
        for root in ((-b + sqrt_d) / (2 * a), (-b - sqrt_d) / (2 * a)):
            zr0, zi0 = round(root.real), round(root.imag)
            for zr in range(zr0 - r_int, zr0 + r_int + 1):
                for zi in range(zi0 - r_int, zi0 + r_int + 1):
                    if (zr - root.real) ** 2 + (zi - root.imag) ** 2 > rad * rad:
                        continue
                    if (zr, zi) in seen_z:
                        continue
                    seen_z.add((zr, zi))
                    z2r, z2i = zr * zr - zi * zi, 2 * zr * zi
                    ncr = ar * z2r - ai * z2i + br * zr - bi * zi + cr
                    nci = ar * z2i + ai * z2r + br * zi + bi * zr + ci
                    nc = ncr * ncr + nci * nci
                    if nc == 0 or nc > na_cap:
                        continue
                    nbr = -(br + 2 * (ar * zr - ai * zi))
                    nbi = -(bi + 2 * (ar * zi + ai * zr))
                    g = _node_of(ncr, nci, nbr, nbi, dre, dim)
                    j = idx.get(g)
                    if j is not None:
                        ri, rj = find(i), find(j)
                        if ri != rj:
                            parent[ri] = rj
    return len({find(i) for i in range(len(idx))})


def class_number(d: GaussianInt, height_cap: int) -> int:
    """Number of classes of primitive forms of discriminant d.

    Counts orbits of the forms whose leading coefficient has norm at most
    height_cap (one representative per translation class) under the
    SL(2,Z[i]) moves; the count at height_cap must agree with the count
    at 2 * height_cap and be nonzero, otherwise NonConvergedError is
    raised and the caller should retry with a larger cap.  Stability is a
    heuristic: far below default_height_cap(d) the two counts can agree
    by accident, so callers should not pass tiny caps.
    """
    if not is_discriminant(d):
        raise GaussianDomainError(f"{d} is not a discriminant")
    if height_cap < 1:
        raise ValueError("height_cap must be positive")
    h1 = _thin_count(d, height_cap)
    h2 = _thin_count(d, 2 * height_cap)
    if h1 != h2 or h1 == 0:
        raise NonConvergedError(
            f"class number of {d} not stable: {h1} at cap {height_cap}, "
            f"{h2} at cap {2 * height_cap}"
        )
    return h1


_h_cache: dict[GaussianInt, int] = {}
_h_lock = threading.Lock()


def _symmetry_key(d: GaussianInt) -> GaussianInt:
    """Representative of {d, -d, conj d, -conj d}; all four share h(d).

    Negation is multiplication of forms by the unit i, conjugation is
    coefficient-wise conjugation; both commute with the generators and
    preserve the coefficient box, so the orbit counts agree exactly.
    """
    orbit = [d, -d, d.conj(), -d.conj()]
    return min(orbit, key=lambda z: (z.re, z.im))


def class_number_stable(
    d: GaussianInt, start_cap: int = 0, max_cap: int = 0
) -> int:
    """Escalating driver around class_number, with the symmetry cache."""
    key = _symmetry_key(d)
    with _h_lock:
        h = _h_cache.get(key)
    if h is not None:
        return h
    cap = start_cap if start_cap > 0 else default_height_cap(d)
    limit = max_cap if max_cap > 0 else 32 * cap
    while cap <= limit:
        try:
            h = class_number(d, cap)
        except NonConvergedError:
            cap *= 2
            continue
        with _h_lock:
            _h_cache[key] = h
        return h
    raise NonConvergedError(f"class number of {d} not stable up to cap {limit}")


def default_height_cap(d: GaussianInt) -> int:
    """Starting norm cap: every class has a representative with N(a) = O(|d|)."""
    return max(16, math.ceil(abs(complex(d))) + 8)


# ---------------------------------------------------------------------------
# the census table
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class GeodesicClass:
    """One (discriminant, power) family: h(d) classes of norm |eps_d|^(2k)."""

    pell: PellUnit
    k: int
    norm: float
    lambda_weight: float
    h: int


def _entry_sort_key(e: GeodesicClass):
    d = e.pell.d
    return (e.norm, d.norm(), d.re, d.im, e.k)


def _compensated_prefix(values: Sequence[float]) -> list[float]:
    """Kahan prefix sums; bit-reproducible for a fixed input order."""
    out = []
    s = 0.0
    comp = 0.0
    for v in values:
        y = v - comp
        t = s + y
        comp = (t - s) - y
        s = t
        out.append(s)
    return out


class CensusTable:
    """Sorted, immutable list of GeodesicClass entries with norm <= x_max."""

    def __init__(self, x_max: float, entries: list[GeodesicClass], complete: bool):
        self.x_max = float(x_max)
        self.entries = sorted(entries, key=_entry_sort_key)
        self.complete = complete
        self._norms = [e.norm for e in self.entries]
        self._prefix = _compensated_prefix(
            [e.h * e.lambda_weight for e in self.entries]
        )
        self._by_d: dict[GaussianInt, tuple[PellUnit, int]] = {}
        for e in self.entries:
            if e.k == 1:
                self._by_d[e.pell.d] = (e.pell, e.h)

    def __len__(self) -> int:
        return len(self.entries)

    def lookup(self, d: GaussianInt) -> tuple[PellUnit, int]:
        return self._by_d[d]

    @property
    def discriminants(self) -> list[GaussianInt]:
        return list(self._by_d)

    def jump_norms(self, x_limit: Optional[float] = None) -> list[float]:
        lim = self.x_max if x_limit is None else x_limit
        out = []
        for n in self._norms:
            if n > lim:
                break
            if not out or n != out[-1]:
                out.append(n)
        return out

    def psi_value(self, x: float) -> float:
        i = bisect.bisect_right(self._norms, x)
        return self._prefix[i - 1] if i else 0.0

    def export_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write(CSV_HEADER + "\n")
            for e in self.entries:
                p = e.pell
                fh.write(
                    f"{p.d.re},{p.d.im},{p.t0.re},{p.t0.im},{p.u0.re},{p.u0.im},"
                    f"{p.abs_eps:.15g},{e.h},{e.k},{e.norm:.15g},"
                    f"{e.lambda_weight:.15g}\n"
                )


CSV_HEADER = "d_re,d_im,t0_re,t0_im,u0_re,u0_im,abs_eps,h,k,norm,lambda_weight"


def load_census_csv(path) -> CensusTable:
    """Rebuild a CensusTable from an export_csv file.

    The file carries no certification metadata: the loader trusts it,
    marks every unit certified, and sets x_max to the largest norm, so
    queries beyond the exported range still fail loudly.
    """
    entries: list[GeodesicClass] = []
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != CSV_HEADER:
            raise ValueError(f"unexpected census header {header!r}")
        for line in fh:
            parts = line.strip().split(",")
            if not parts or parts == [""]:
                continue
            d = GaussianInt(int(parts[0]), int(parts[1]))
            t0 = GaussianInt(int(parts[2]), int(parts[3]))
            u0 = GaussianInt(int(parts[4]), int(parts[5]))
            abs_eps = float(parts[6])
            h, k = int(parts[7]), int(parts[8])
            norm_val, lam = float(parts[9]), float(parts[10])
            pell = PellUnit(
                d=d,
                t0=t0,
                u0=u0,
                abs_eps=abs_eps,
                log_norm=lam,
                certified_abs_eps=abs_eps,
            )
            entries.append(
                GeodesicClass(pell=pell, k=k, norm=norm_val, lambda_weight=lam, h=h)
            )
    x_max = max((e.norm for e in entries), default=1.0)
    return CensusTable(x_max=x_max, entries=entries, complete=True)


def discriminant_bound(x_max: float) -> float:
    """|d| bound certifying coverage: |u0 sqrt(d)| <= |eps| + 1/|eps|, |u0| >= 1."""
    s = math.sqrt(x_max)
    return (s + 1.0 / s) ** 2


def pell_search_limit(d: GaussianInt, x_max: float) -> float:
    s = math.sqrt(x_max)
    return (s + 1.0 / s) / math.sqrt(abs(complex(d))) * (1.0 + 1e-12)


def _pell_scan(args) -> Optional[tuple]:
    d, x_max, search_limit = args
    limit = search_limit if search_limit else pell_search_limit(d, x_max)
    pell = pell_fundamental(d, limit)
    if pell is None:
        return None
    if pell.abs_eps * pell.abs_eps > x_max * (1 + 1e-12):
        return None
    return (d, pell)


def _h_worker(args) -> tuple[GaussianInt, int]:
    d, start_cap, max_cap = args
    return d, class_number_stable(d, start_cap, max_cap)


def build_census(
    x_max: float,
    *,
    height_cap: int = 0,
    max_height_cap: int = 0,
    search_limit: float = 0.0,
    threads: int = 1,
) -> CensusTable:
    """Materialize every class family of norm <= x_max.

    The discriminant disc |d| <= (sqrt(x_max)+1/sqrt(x_max))^2 provably
    contains every d with |eps_d|^2 <= x_max, and the per-d Pell search
    bound certifies fundamentality, so the result is complete unless a
    user-supplied search_limit undercuts the certified bound.
    """
    if x_max <= 1.0:
        raise ValueError("x_max must exceed 1")
    # d and -d carry the same classes (forms rescale by the unit i), so the
    # census keeps one representative per pair: the main-term normalization
    # psi(X) ~ X^2/2 and the Li(X^4) class-number law both require it.
    ds = [
        d
        for d in enumerate_discriminants(discriminant_bound(x_max))
        if d.re > 0 or (d.re == 0 and d.im > 0)
    ]
    jobs = [(d, x_max, search_limit) for d in ds]
    found: list[tuple[GaussianInt, PellUnit]] = []
    complete = True
    if threads > 1 and len(jobs) > 1000:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            for res in pool.map(_pell_scan, jobs, chunksize=2048):
                if res is not None:
                    found.append(res)
    else:
        for job in jobs:
            res = _pell_scan(job)
            if res is not None:
                found.append(res)
    for _, pell in found:
        if not pell.certified:
            complete = False

    # class numbers, deduplicated through the symmetry orbit of d
    keys: list[GaussianInt] = []
    seen = set()
    for d, _ in found:
        key = _symmetry_key(d)
        if key not in seen:
            seen.add(key)
            keys.append(key)
    h_by_key: dict[GaussianInt, int] = {}
    with _h_lock:
        cached = {k: _h_cache[k] for k in keys if k in _h_cache}
    h_by_key.update(cached)
    todo = [k for k in keys if k not in h_by_key]
    if threads > 1 and len(todo) > 8:
        jobs_h = [(k, height_cap, max_height_cap) for k in todo]
        with ProcessPoolExecutor(max_workers=threads) as pool:
            for key, h in pool.map(_h_worker, jobs_h, chunksize=8):
                h_by_key[key] = h
        with _h_lock:
            _h_cache.update(h_by_key)
    else:
        for key in todo:
            h_by_key[key] = class_number_stable(key, height_cap, max_height_cap)

    entries: list[GeodesicClass] = []
    for d, pell in found:
        h = h_by_key[_symmetry_key(d)]
        k = 1
        while True:
            norm_k = pell.abs_eps ** (2 * k)
            if norm_k > x_max:
                break
            entries.append(
                GeodesicClass(
                    pell=pell, k=k, norm=norm_k, lambda_weight=pell.log_norm, h=h
                )
            )
            k += 1
    return CensusTable(x_max=x_max, entries=entries, complete=complete)


# ---------------------------------------------------------------------------
# counting functions
# ---------------------------------------------------------------------------


def psi(x: float, census: CensusTable) -> float:
    """psi(X): the lambda-weighted count of class families of norm <= X."""
    if x > census.x_max * (1 + 1e-12):
        raise CoverageError(f"psi({x}) beyond census bound {census.x_max}")
    if not census.complete:
        raise CoverageError("census is not certified complete")
    return census.psi_value(x)


def main_term(x: float, small_eigenvalues: Sequence[float] = (2.0,)) -> float:
    """sum of X^s/s over the small-eigenvalue parameters s in (1, 2]."""
    for s in small_eigenvalues:
        if not 1.0 < s <= 2.0:
            raise ValueError(f"small-eigenvalue parameter {s} outside (1, 2]")
    return math.fsum(x**s / s for s in small_eigenvalues)


def error_term(
    x: float, census: CensusTable, small_eigenvalues: Sequence[float] = (2.0,)
) -> float:
    return psi(x, census) - main_term(x, small_eigenvalues)


def li(x: float) -> float:
    """Principal-value logarithmic integral from 2: int_2^x dt/log t."""
    if x == 2.0:
        return 0.0
    lo, hi, sign = (2.0, x, 1.0) if x > 2.0 else (x, 2.0, -1.0)
    val, _ = integrate.quad(
        lambda t: 1.0 / math.log(t), lo, hi, epsabs=1e-10, epsrel=1e-12, limit=400
    )
    return sign * val


class ClassNumberSum(NamedTuple):
    total: int
    residual: float


def class_number_sum(x: float, census: CensusTable) -> ClassNumberSum:
    """sum of h(d) over |eps_d| <= x, with its deviation from Li(x^4)."""
    if x * x > census.x_max * (1 + 1e-12):
        raise CoverageError(
            f"class_number_sum({x}) needs census coverage to {x * x:.3g}"
        )
    total = sum(e.h for e in census.entries if e.k == 1 and e.pell.abs_eps <= x)
    return ClassNumberSum(total=total, residual=total - li(x**4))


def second_moment_error(
    v: float,
    delta: float,
    census: CensusTable,
    small_eigenvalues: Sequence[float] = (2.0,),
    method: str = "exact",
) -> float:
    """(1/Delta) int_V^{V+Delta} E(x)^2 dx, by exact piecewise integration.

    Between jumps E(x) = P - sum X^s/s with P constant, which integrates
    in closed form when the eigenvalue list is [2]; any other list falls
    back to adaptive quadrature per piece (method="quad" forces it).
    """
    if not 1.0 < delta <= v:
        raise ValueError("need 1 < Delta <= V")
    if v + delta > census.x_max * (1 + 1e-12):
        raise CoverageError("window extends beyond the census bound")
    cuts = [v] + [n for n in census.jump_norms(v + delta) if v < n < v + delta]
    cuts.append(v + delta)
    closed_form = method == "exact" and tuple(small_eigenvalues) == (2.0,)
    total = 0.0
    for x0, x1 in zip(cuts, cuts[1:]):
        if x1 <= x0:
            continue
        p = psi(x0, census)
        if closed_form:
            # int (P - x^2/2)^2 dx = P^2 x - P x^3/3 + x^5/20
            f = lambda x: p * p * x - p * x**3 / 3.0 + x**5 / 20.0
            total += f(x1) - f(x0)
        else:
            val, _ = integrate.quad(
                lambda x: (p - main_term(x, small_eigenvalues)) ** 2,
                x0,
                x1,
                epsabs=0.0,
                epsrel=1e-8,
                limit=200,
            )
            total += val
    return total / delta


# ---------------------------------------------------------------------------
# trace-side oracle
# ---------------------------------------------------------------------------


class TraceRecord(NamedTuple):
    t: GaussianInt
    d: GaussianInt
    k: int
    h: int
    weight: float
    norm: float


def _trace_power(t0: GaussianInt, k: int) -> GaussianInt:
    """tau_k = eps^k + eps^{-k} via tau_{j+1} = t0 tau_j - tau_{j-1}, exactly."""
    prev, cur = GaussianInt(2, 0), t0
    for _ in range(k - 1):
        prev, cur = cur, t0 * cur - prev
    return cur if k >= 1 else prev


def trace_side_records(x: float, census: CensusTable) -> list[TraceRecord]:
    """Rebuild the census, one matrix trace at a time.

    Enumerates traces t (one per pair {t, -t}) with a certified bound,
    splits t^2 - 4 = d u^2 over canonical square divisors, checks d is a
    discriminant, and verifies the power correspondence t = +-tau_k(d)
    in exact arithmetic before attributing weight h(d) log N(P0).

    A decomposition whose trace is not a power of the fundamental unit is
    skipped: when the squarefree part of d is 3 (times a unit) the field
    Q(i, sqrt(d)) has sixth roots of unity and the Pell solutions split
    into zeta-twisted cosets; such solutions are fundamental units of a
    different discriminant and are picked up by that tower instead.  A
    trace that verifies against no tower at all is a genuine failure.
    """
    if x > census.x_max * (1 + 1e-12):
        raise CoverageError("trace enumeration beyond the census bound")
    if not census.complete:
        raise CoverageError("census is not certified complete")
    out: list[TraceRecord] = []
    tmax = math.sqrt(x) + 1.0 / math.sqrt(x) + 1.0
    for t in _half_plane_points(tmax):
        z = t * t - FOUR
        if not z or sqrt_exact(z) is not None:
            continue
        w = np.sqrt(complex(z))
        eps_abs = max(abs((complex(t) + w) / 2.0), abs((complex(t) - w) / 2.0))
        if eps_abs <= 1.0 + _ABS_EPS_TOL:
            continue
        if eps_abs * eps_abs > x * (1 + 1e-9):
            continue
        verified_any = False
        for v in divisors(z):
            v2 = v * v
            tv = z * v2.conj()
            nv2 = v2.norm()
            if tv.re % nv2 or tv.im % nv2:
                continue
            base = GaussianInt(tv.re // nv2, tv.im // nv2)
            # the census stores one representative per pair {d, -d}
            d = base if base.re > 0 or (base.re == 0 and base.im > 0) else -base
            if (d.re % 4, d.im % 4) not in SQUARE_RESIDUES_MOD4:
                continue
            try:
                pell, h = census.lookup(d)
            except KeyError:
                raise DecompositionError(
                    f"trace {t}: discriminant {d} missing from census"
                ) from None
            k_guess = max(1, round(math.log(eps_abs) / math.log(pell.abs_eps)))
            k_found = 0
            for k in (k_guess, k_guess - 1, k_guess + 1):
                if k >= 1 and _trace_power(pell.t0, k) in (t, -t):
                    k_found = k
                    break
            if not k_found:
                continue  # zeta-twisted solution, owned by another tower
            verified_any = True
            norm_val = pell.abs_eps ** (2 * k_found)
            if norm_val > x:
                continue
            out.append(
                TraceRecord(
                    t=t,
                    d=d,
                    k=k_found,
                    h=h,
                    weight=h * pell.log_norm,
                    norm=norm_val,
                )
            )
        if not verified_any:
            raise DecompositionError(
                f"trace {t}: no discriminant decomposition verifies"
            )
    out.sort(key=lambda r: (r.norm, r.d.norm(), r.d.re, r.d.im, r.k))
    return out


def trace_side_psi(x: float, census: CensusTable) -> float:
    """psi(X) rebuilt by trace enumeration; must match psi(X) exactly."""
    records = trace_side_records(x, census)
    prefix = _compensated_prefix([r.weight for r in records])
    return prefix[-1] if prefix else 0.0
