"""Exact arithmetic over the Gaussian integers Z[i].

Everything downstream (Kloosterman sums, Pell equations, the geodesic
census) is built on the primitives here: norms, canonical associates,
Euclidean gcd, modular inverses and residue systems, factorization,
divisor sums, square detection and squarefree splitting.  All values are
exact Python integers; the only floats produced are complex absolute
values and divisor sums with a real exponent.

Conventions (fixed once, used everywhere):

* canonical associate: the unique rotate ``i**k * z`` lying in the first
  quadrant ``{re > 0, im >= 0}``, with ``0 -> 0``;
* canonical residue mod (c): the unique lattice point of the class in the
  fundamental parallelogram ``{alpha*c + beta*i*c : 0 <= alpha, beta < 1}``.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from typing import Iterator, Optional


class GaussianDomainError(ValueError):
    """Raised for domain violations (zero modulus, gcd(0,0), ...)."""


class NoInverseError(GaussianDomainError):
    """Raised when an element is not invertible modulo the given ideal."""


@dataclass(frozen=True, slots=True)
class GaussianInt:
    """A Gaussian integer re + im*i with arbitrary-precision components."""

    re: int
    im: int

    def __add__(self, other: "GaussianInt") -> "GaussianInt":
        return GaussianInt(self.re + other.re, self.im + other.im)

    def __sub__(self, other: "GaussianInt") -> "GaussianInt":
        return GaussianInt(self.re - other.re, self.im - other.im)

    def __mul__(self, other):
        if isinstance(other, GaussianInt):
            return GaussianInt(
                self.re * other.re - self.im * other.im,
                self.re * other.im + self.im * other.re,
            )
        if isinstance(other, int):
            return GaussianInt(self.re * other, self.im * other)
        return NotImplemented

    __rmul__ = __mul__

    def __neg__(self) -> "GaussianInt":
        return GaussianInt(-self.re, -self.im)

    def __pow__(self, k: int) -> "GaussianInt":
        if k < 0:
            raise ValueError("negative powers leave Z[i]")
        out = ONE
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __bool__(self) -> bool:
        return self.re != 0 or self.im != 0

    def __abs__(self) -> float:
        return math.sqrt(self.re * self.re + self.im * self.im)

    def __complex__(self) -> complex:
        return complex(self.re, self.im)

    def __str__(self) -> str:
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}i"
        sign = "+" if self.im >= 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}i"

    def conj(self) -> "GaussianInt":
        return GaussianInt(self.re, -self.im)

    def norm(self) -> int:
        """N(z) = re^2 + im^2; multiplicative, zero only at z = 0."""
        return self.re * self.re + self.im * self.im


ZERO = GaussianInt(0, 0)
ONE = GaussianInt(1, 0)
I = GaussianInt(0, 1)
TWO = GaussianInt(2, 0)

UNITS = (ONE, I, GaussianInt(-1, 0), GaussianInt(0, -1))


def parse_gaussian(text: str) -> GaussianInt:
    """Parse 'a', 'bi', 'a+bi' or 'a-bi' (no spaces) into a GaussianInt."""
    s = text.strip().replace(" ", "")
    if not s:
        raise ValueError(f"empty Gaussian integer literal: {text!r}")
    if not s.endswith(("i", "I", "j", "J")):
        try:
            return GaussianInt(int(s), 0)
        except ValueError:
            raise ValueError(f"bad Gaussian integer literal: {text!r}") from None
    body = s[:-1]
    # split at the last +/- that is not the leading sign
    cut = max(body.rfind("+", 1), body.rfind("-", 1))
    if cut == -1:
        re_part, im_part = "0", body
    else:
        re_part, im_part = body[:cut], body[cut:]
    if im_part in ("", "+"):
        im_part = "1"
    elif im_part == "-":
        im_part = "-1"
    try:
        return GaussianInt(int(re_part), int(im_part))
    except ValueError:
        raise ValueError(f"bad Gaussian integer literal: {text!r}") from None


def norm(z: GaussianInt) -> int:
    return z.norm()


def is_unit(z: GaussianInt) -> bool:
    return z.norm() == 1


def normalize_unit(z: GaussianInt) -> GaussianInt:
    """Canonical associate of z: rotate by i into {re > 0, im >= 0}; 0 -> 0."""
    re, im = z.re, z.im
    if re == 0 and im == 0:
        return ZERO
    # at most three quarter-turns are ever needed
    while not (re > 0 and im >= 0):
        re, im = -im, re
    return GaussianInt(re, im)


def divmod_nearest(a: GaussianInt, b: GaussianInt) -> tuple[GaussianInt, GaussianInt]:
    """Euclidean division with the nearest-lattice-point quotient.

    Guarantees N(r) <= N(b)/2, which is what makes the gcd loop terminate
    quickly.  Ties round half-up in each coordinate (deterministic).
    """
    if not b:
        raise GaussianDomainError("division by zero in Z[i]")
    n = b.norm()
    t = a * b.conj()
    q = GaussianInt((2 * t.re + n) // (2 * n), (2 * t.im + n) // (2 * n))
    return q, a - q * b


def mod_canonical(a: GaussianInt, c: GaussianInt) -> GaussianInt:
    """Reduce a to the canonical representative of its class mod (c).

    The representative is the unique lattice point alpha*c + beta*i*c with
    0 <= alpha, beta < 1, obtained by flooring the coordinates of a/c in
    the (c, i*c) basis.
    """
    if not c:
        raise GaussianDomainError("zero modulus")
    n = c.norm()
    t = a * c.conj()
    q = GaussianInt(t.re // n, t.im // n)
    return a - q * c


def gcd(a: GaussianInt, b: GaussianInt) -> GaussianInt:
    """Canonical greatest common divisor; gcd(a, 0) = normalize_unit(a)."""
    if not a and not b:
        raise GaussianDomainError("gcd(0, 0) is undefined")
    while b:
        _, r = divmod_nearest(a, b)
        a, b = b, r
    return normalize_unit(a)


def gcd_all(*zs: GaussianInt) -> GaussianInt:
    """gcd of any number of elements, zeros allowed (not all zero)."""
    g = ZERO
    for z in zs:
        if not z:
            continue
        g = gcd(g, z) if g else z
    if not g:
        raise GaussianDomainError("gcd of all-zero tuple is undefined")
    return normalize_unit(g)


def xgcd(a: GaussianInt, b: GaussianInt) -> tuple[GaussianInt, GaussianInt, GaussianInt]:
    """Extended Euclid: returns (g, x, y) with a*x + b*y = g (g not normalized)."""
    r0, r1 = a, b
    x0, x1 = ONE, ZERO
    y0, y1 = ZERO, ONE
    while r1:
        q, r = divmod_nearest(r0, r1)
        r0, r1 = r1, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return r0, x0, y0


def inv_mod(a: GaussianInt, c: GaussianInt) -> GaussianInt:
    """Inverse of a modulo the ideal (c), as the canonical residue.

    Raises NoInverseError when gcd(a, c) is not a unit.
    """
    if not c:
        raise GaussianDomainError("zero modulus")
    if is_unit(c):
        return ZERO  # trivial ring: every residue is 0
    g, x, _ = xgcd(a, c)
    if g.norm() != 1:
        raise NoInverseError(f"{a} is not invertible mod ({c})")
    # a*x = g with g a unit; divide by the unit to get a*x' = 1
    x = x * _unit_inverse(g)
    return mod_canonical(x, c)


def _unit_inverse(u: GaussianInt) -> GaussianInt:
    if u == ONE:
        return ONE
    if u == GaussianInt(-1, 0):
        return GaussianInt(-1, 0)
    if u == I:
        return GaussianInt(0, -1)
    if u == GaussianInt(0, -1):
        return I
    raise GaussianDomainError(f"{u} is not a unit")


def divides(d: GaussianInt, z: GaussianInt) -> bool:
    if not d:
        return not z
    n = d.norm()
    t = z * d.conj()
    return t.re % n == 0 and t.im % n == 0


def exact_div(z: GaussianInt, d: GaussianInt) -> GaussianInt:
    n = d.norm()
    t = z * d.conj()
    if n == 0 or t.re % n or t.im % n:
        raise GaussianDomainError(f"{d} does not divide {z}")
    return GaussianInt(t.re // n, t.im // n)


def sqrt_exact(z: GaussianInt) -> Optional[GaussianInt]:
    """Square root in Z[i] if one exists, else None.

    The root is sign-normalized into the half plane re > 0, or onto the
    nonnegative imaginary axis when re = 0 (the first-quadrant associate
    of a root is in general not a root, so only the sign is free).
    """
    if not z:
        return ZERO
    n = z.norm()
    s = math.isqrt(n)
    if s * s != n:
        return None
    # w = x + iy with x^2 = (re+s)/2, y^2 = (s-re)/2, 2xy = im
    if (z.re + s) % 2:
        return None
    xx = (z.re + s) // 2
    yy = (s - z.re) // 2
    x = math.isqrt(xx)
    y = math.isqrt(yy)
    if x * x != xx or y * y != yy:
        return None
    if z.im < 0:
        y = -y
    w = GaussianInt(x, y)
    if w * w != z:
        return None
    if w.re < 0 or (w.re == 0 and w.im < 0):
        w = -w
    return w


# ---------------------------------------------------------------------------
# rational integer helpers (norm-level factorization)
# ---------------------------------------------------------------------------

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def _is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin (the 12-base set is exact below 3.3e24)."""
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _SMALL_PRIMES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_rho(n: int) -> int:
    """One nontrivial factor of composite odd n (Brent's cycle variant)."""
    if n % 2 == 0:
        return 2
    for c in range(1, 100):
        x = y = 2
        d = 1
        while d == 1:
            x = (x * x + c) % n
            y = (y * y + c) % n
            y = (y * y + c) % n
            d = math.gcd(abs(x - y), n)
        if d != n:
            return d
    raise ArithmeticError(f"rho failed on {n}")  # pragma: no cover


def factor_int(n: int) -> dict[int, int]:
    """Prime factorization of n >= 1: trial division, then rho for big cofactors."""
    if n < 1:
        raise ValueError("factor_int expects n >= 1")
    out: dict[int, int] = {}
    for p in (2, 3, 5):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    f = 7
    wheel = (4, 2, 4, 2, 4, 6, 2, 6)
    w = 0
    while f * f <= n and f < 10**6:
        while n % f == 0:
            out[f] = out.get(f, 0) + 1
            n //= f
        f += wheel[w]
        w = (w + 1) % 8
    if n > 1:
        stack = [n]
        while stack:
            m = stack.pop()
            if m == 1:
                continue
            if _is_prime(m):
                out[m] = out.get(m, 0) + 1
            else:
                d = _pollard_rho(m)
                stack.append(d)
                stack.append(m // d)
    return out


def _sqrt_minus_one_mod(p: int) -> int:
    """x with x^2 = -1 (mod p), for p = 1 (mod 4)."""
    for a in range(2, p):
        if pow(a, (p - 1) // 2, p) == p - 1:
            x = pow(a, (p - 1) // 4, p)
            return x
    raise ArithmeticError(f"no quadratic nonresidue found mod {p}")  # pragma: no cover


def gaussian_prime_above(p: int) -> GaussianInt:
    """A canonical Gaussian prime dividing the rational prime p.

    p = 2 -> 1+i; split p = 1 (mod 4) -> one of the conjugate pair; inert
    p = 3 (mod 4) -> p itself.
    """
    if p == 2:
        return GaussianInt(1, 1)
    if p % 4 == 3:
        return GaussianInt(p, 0)
    x = _sqrt_minus_one_mod(p)
    return gcd(GaussianInt(p, 0), GaussianInt(x, 1))


@dataclass(frozen=True, slots=True)
class GaussianFactorization:
    """unit * prod(prime**exp) == value, primes canonical, sorted by (norm, re)."""

    unit: GaussianInt
    factors: tuple[tuple[GaussianInt, int], ...]

    def value(self) -> GaussianInt:
        out = self.unit
        for prime, exp in self.factors:
            out = out * prime**exp
        return out


_factor_cache: dict[GaussianInt, GaussianFactorization] = {}
_factor_lock = threading.Lock()


def factor(z: GaussianInt) -> GaussianFactorization:
    """Factor z != 0 into canonical Gaussian primes (cached, thread-safe)."""
    if not z:
        raise GaussianDomainError("cannot factor 0")
    cached = _factor_cache.get(z)
    if cached is not None:
        return cached
    n = z.norm()
    primes: list[GaussianInt] = []
    for p in sorted(factor_int(n)):
        pi = gaussian_prime_above(p)
        primes.append(pi)
        if p != 2 and p % 4 == 1:
            primes.append(normalize_unit(pi.conj()))
    rest = z
    found: list[tuple[GaussianInt, int]] = []
    for pi in primes:
        e = 0
        while divides(pi, rest):
            rest = exact_div(rest, pi)
            e += 1
        if e:
            found.append((pi, e))
    if rest.norm() != 1:
        raise ArithmeticError(f"incomplete factorization of {z}")  # pragma: no cover
    found.sort(key=lambda fe: (fe[0].norm(), fe[0].re, fe[0].im))
    result = GaussianFactorization(unit=rest, factors=tuple(found))
    with _factor_lock:
        if len(_factor_cache) < 200_000:
            _factor_cache[z] = result
    return result


def divisors(n: GaussianInt) -> list[GaussianInt]:
    """All divisors of n up to association, canonical, sorted by (norm, re, im)."""
    fac = factor(n)
    out = [ONE]
    for prime, exp in fac.factors:
        powers = [prime**k for k in range(exp + 1)]
        out = [d * pk for d in out for pk in powers]
    out = [normalize_unit(d) for d in out]
    out.sort(key=lambda d: (d.norm(), d.re, d.im))
    return out


def divisor_count(n: GaussianInt) -> int:
    fac = factor(n)
    out = 1
    for _, exp in fac.factors:
        out *= exp + 1
    return out


def divisor_sum(s, n: GaussianInt):
    """sigma_s(n) = sum of N(d)^s over canonical divisors d of n.

    Exact integer for integer s >= 0; otherwise a float accumulated in
    ascending-norm order (so reruns round identically).
    """
    if not n:
        raise GaussianDomainError("divisor_sum of 0")
    ds = divisors(n)
    if isinstance(s, int) and s >= 0:
        return sum(d.norm() ** s for d in ds)
    return math.fsum(float(d.norm()) ** s for d in ds)


def residues(c: GaussianInt) -> list[GaussianInt]:
    """The full canonical residue system mod (c), sorted by (re, im)."""
    if not c:
        raise GaussianDomainError("zero modulus")
    xs = (0, c.re, -c.im, c.re - c.im)
    ys = (0, c.im, c.re, c.im + c.re)
    n = c.norm()
    ncre, ncim = c.conj().re, c.conj().im
    out = []
    for x in range(min(xs), max(xs) + 1):
        for y in range(min(ys), max(ys) + 1):
            # in the fundamental parallelogram iff floor-division quotient is 0
            tre = x * ncre - y * ncim
            tim = x * ncim + y * ncre
            if 0 <= tre < n and 0 <= tim < n:
                out.append(GaussianInt(x, y))
    out.sort(key=lambda z: (z.re, z.im))
    return out


def unit_residues(c: GaussianInt) -> list[GaussianInt]:
    """Canonical representatives of (Z[i]/(c))^x, sorted by (re, im).

    A unit modulus has the trivial ring and yields the empty sequence.
    """
    if not c:
        raise GaussianDomainError("zero modulus")
    if is_unit(c):
        return []
    return [a for a in residues(c) if a and gcd(a, c).norm() == 1]


def totient(c: GaussianInt) -> int:
    """#(Z[i]/(c))^x = N(c) * prod(1 - 1/N(pi)) over primes pi | c."""
    if not c:
        raise GaussianDomainError("zero modulus")
    out = 1
    for prime, exp in factor(c).factors:
        q = prime.norm()
        out *= q ** (exp - 1) * (q - 1)
    return out


@dataclass(frozen=True, slots=True)
class SquarefreeSplit:
    """u ~ u1 * u2^2 with u1 squarefree; u_plus = u1^2 * u2^2 >= |u| in modulus."""

    u1: GaussianInt
    u2: GaussianInt
    u_plus: GaussianInt


def squarefree_split(u: GaussianInt) -> SquarefreeSplit:
    if not u:
        raise GaussianDomainError("squarefree_split of 0")
    fac = factor(u)
    u1 = ONE
    u2 = ONE
    for prime, exp in fac.factors:
        if exp % 2:
            u1 = u1 * prime
        u2 = u2 * prime ** (exp // 2)
    u1 = normalize_unit(u1)
    u2 = normalize_unit(u2)
    return SquarefreeSplit(u1=u1, u2=u2, u_plus=normalize_unit(u1 * u1 * u2 * u2))


def canonical_nonzero(norm_bound) -> Iterator[GaussianInt]:
    """All canonical (first-quadrant) z != 0 with N(z) <= norm_bound."""
    nb = int(norm_bound)
    if nb < 1:
        return
    for x in range(1, math.isqrt(nb) + 1):
        for y in range(0, math.isqrt(nb - x * x) + 1):
            yield GaussianInt(x, y)
