"""Kloosterman sums over the Gaussian integers.

S(m,n;c) = sum over a in (Z[i]/(c))^x of e(<m, a/c>) e(<n, a*/c>),
where a* is the inverse of a mod (c), e(t) = exp(2*pi*i*t) and <x,y> is
the real inner product Re(x)Re(y) + Im(x)Im(y).  The sum is real-valued
(a -> -a conjugates each summand), so results are returned as a real
value plus the magnitude of the discarded imaginary part.

Two evaluation strategies are provided: the literal sum over the residue
system ("naive") and a CRT decomposition into twisted prime-power sums
("factored").  The factored route is an optimization only; it is checked
against the naive sum, never trusted on its own.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

from .gaussian import (
    GaussianDomainError,
    GaussianInt,
    canonical_nonzero,
    divisor_count,
    exact_div,
    factor,
    gcd_all,
    inv_mod,
    is_unit,
    unit_residues,
)

# refuse accidental naive evaluation beyond this modulus norm (double
# precision error budget eps*terms, and quadratic cost) unless forced
NAIVE_NORM_LIMIT = 10**6

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True, slots=True)
class KloostermanResult:
    value: float
    imag_residual: float
    terms: int


@lru_cache(maxsize=4096)
def _residue_table(c: GaussianInt) -> tuple[tuple[GaussianInt, GaussianInt], ...]:
    """Unit residues of (c) with their inverses, sorted by (re, im)."""
    return tuple((a, inv_mod(a, c)) for a in unit_residues(c))


def _phase_fraction(m: GaussianInt, t: GaussianInt, n_c: int) -> int:
    """Numerator of <m, a/c> mod 1, where t = a * conj(c) and n_c = N(c).

    <m, a/c> = (m.re*t.re + m.im*t.im) / N(c); reducing the numerator mod
    N(c) keeps every angle in [0, 2*pi) at full double precision.
    """
    return (m.re * t.re + m.im * t.im) % n_c


def _twisted_sum(m: GaussianInt, n: GaussianInt, q: GaussianInt, tau: GaussianInt) -> complex:
    """sum over a in (Z[i]/(q))^x of e(<m, tau*a/q>) e(<n, tau*a*/q>)."""
    n_q = q.norm()
    qc = q.conj()
    total = 0.0 + 0.0j
    for a, ainv in _residue_table(q):
        t1 = (tau * a) * qc
        t2 = (tau * ainv) * qc
        num = _phase_fraction(m, t1, n_q) + _phase_fraction(n, t2, n_q)
        angle = TWO_PI * (num / n_q)
        total += complex(math.cos(angle), math.sin(angle))
    return total


def kloosterman(
    m: GaussianInt,
    n: GaussianInt,
    c: GaussianInt,
    strategy: str = "naive",
    force: bool = False,
) -> KloostermanResult:
    """Evaluate S(m,n;c).  m, n may be zero; c must not be.

    strategy "naive" sums over the full canonical unit-residue system of
    (c); "factored" splits c into coprime prime-power factors q and
    multiplies the twisted sums with twist tau = (c/q)^{-1} mod q.  A unit
    modulus returns 1 by convention (0 summands).
    """
    if not c:
        raise GaussianDomainError("zero modulus")
    if is_unit(c):
        return KloostermanResult(value=1.0, imag_residual=0.0, terms=0)

    if strategy == "naive":
        if c.norm() > NAIVE_NORM_LIMIT and not force:
            raise GaussianDomainError(
                f"naive Kloosterman sum with N(c)={c.norm()} > {NAIVE_NORM_LIMIT}; "
                "pass force=True to override"
            )
        total = _twisted_sum(m, n, c, GaussianInt(1, 0))
        terms = len(_residue_table(c))
    elif strategy == "factored":
        total = 1.0 + 0.0j
        terms = 0
        for prime, exp in factor(c).factors:
            q = prime**exp
            tau = inv_mod(exact_div(c, q), q)
            total *= _twisted_sum(m, n, q, tau)
            terms += len(_residue_table(q))
    else:
        raise ValueError(f"unknown strategy {strategy!r}")

    return KloostermanResult(
        value=total.real, imag_residual=abs(total.imag), terms=terms
    )


def weil_ratio(m: GaussianInt, n: GaussianInt, c: GaussianInt) -> float:
    """|S(m,n;c)| / (N(c)^{1/2} |(m,n,c)| d(c)).

    The three-way gcd bar is the complex absolute value of the canonical
    gcd; d(c) counts divisors of c up to association.
    """
    if not c:
        raise GaussianDomainError("zero modulus")
    s = kloosterman(m, n, c, strategy="factored")
    g = gcd_all(m, n, c)
    return abs(s.value) / (math.sqrt(c.norm()) * abs(g) * divisor_count(c))


class GcdAverage(NamedTuple):
    total: float
    count: int

    @property
    def ratio(self) -> float:
        return self.total / self.count if self.count else 0.0


def gcd_average(m: GaussianInt, n: GaussianInt, x: float) -> GcdAverage:
    """sum of |(m,n,c)| over canonical c with 0 < N(c) <= x, plus the count.

    With m = n = 0 the summand degenerates to |c|.
    """
    parts = []
    count = 0
    for c in canonical_nonzero(x):
        parts.append(abs(c) if (not m and not n) else abs(gcd_all(m, n, c)))
        count += 1
    return GcdAverage(total=math.fsum(parts), count=count)
