"""Trace-formula test functions and the Bessel-type transforms behind them.

The geometric-side window pair is

    g_s(x) = 4 sinh^2(x/2) on |x| <= s,      s = log X,
    h_s(r) = 4 (sinh(s) cos(sr) + r cosh(s) sin(sr)) / (1+r^2) - 4 sin(sr)/r,

a Fourier pair under g(x) = (1/2pi) int h(r) e^{-irx} dr.  Mollified
versions g_pm = g_{s+-delta} * q_delta (q a fixed smooth bump) sandwich
g_s and make the pair admissible.  The arithmetic side uses
h(r) = sinh((pi+2i alpha) r)/sinh(pi r) with 2 alpha = log X + i/T, and
the Bessel transform I(x) = int r^2 h(r) cosh(pi r) K_{2ir}(x) dr with a
Gaussian spectral window h(r) = exp(-(r-T)^2/M^2) + exp(-(r+T)^2/M^2).

Everything is double precision; hyperbolic ratios are rewritten in
exponential form once arguments exceed 30, and all quadratures are
adaptive with loud failures.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy import integrate, special


class QuadratureError(RuntimeError):
    """An adaptive quadrature failed to reach its tolerance."""


def _quad(f, a, b, *, epsabs=1e-10, epsrel=1e-10, limit=400, points=None):
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val, err = integrate.quad(
                f, a, b, epsabs=epsabs, epsrel=epsrel, limit=limit, points=points
            )
        except integrate.IntegrationWarning as exc:
            raise QuadratureError(str(exc)) from None
    return val


# ---------------------------------------------------------------------------
# the sharp window pair
# ---------------------------------------------------------------------------


def g_window(x: float, s: float) -> float:
    """g_s(x) = 4 sinh^2(x/2) inside [-s, s], zero outside."""
    if s <= 0.0:
        raise ValueError("window length s must be positive")
    if abs(x) > s:
        return 0.0
    sh = math.sinh(0.5 * x)
    return 4.0 * sh * sh


def h_window(r: float, s: float) -> float:
    """Fourier transform of g_s; removable singularity at r = 0."""
    if s <= 0.0:
        raise ValueError("window length s must be positive")
    if r == 0.0:
        return 4.0 * math.sinh(s) - 4.0 * s
    sr = s * r
    return (
        4.0
        * (math.sinh(s) * math.cos(sr) + r * math.cosh(s) * math.sin(sr))
        / (1.0 + r * r)
        - 4.0 * math.sin(sr) / r
    )


def _fourier_tail(f, kind: str, omega: float) -> float:
    """int_0^inf f(r) * cos/sin(omega r) dr for slowly decaying smooth f.

    Plain adaptive pass over [0, 1], Fourier-weighted (cycle-extrapolated)
    quadrature over [1, inf); handles conditionally convergent tails.
    """
    trig = math.cos if kind == "cos" else math.sin
    head = _quad(lambda r: f(r) * trig(omega * r), 0.0, 1.0, epsabs=1e-12)
    if omega == 0.0:
        tail = 0.0 if kind == "sin" else _quad(f, 1.0, np.inf, epsabs=1e-12)
    else:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            tail, _ = integrate.quad(
                f, 1.0, np.inf, weight=kind, wvar=abs(omega), limlst=200
            )
        if kind == "sin" and omega < 0.0:
            tail = -tail
    return head + tail


def g_from_h_quadrature(x: float, s: float) -> float:
    """(1/2pi) int h_s(r) e^{-irx} dr, evaluated numerically.

    Independent inversion oracle for the pair (g_s, h_s).  The integrand
    decays only like 1/r (g_s jumps at |x| = s), so the six
    product-to-sum pieces are integrated as Fourier tails.
    """
    sh, ch = math.sinh(s), math.cosh(s)

    def lorentz(r: float) -> float:
        return 1.0 / (1.0 + r * r)

    def r_lorentz(r: float) -> float:
        return r / (1.0 + r * r)

    def recip(r: float) -> float:
        return 1.0 / r if r else 0.0

    pieces = (
        (2.0 * sh / math.pi, lorentz, "cos", s - x),
        (2.0 * sh / math.pi, lorentz, "cos", s + x),
        (2.0 * ch / math.pi, r_lorentz, "sin", s + x),
        (2.0 * ch / math.pi, r_lorentz, "sin", s - x),
        (-2.0 / math.pi, recip, "sin", s + x),
        (-2.0 / math.pi, recip, "sin", s - x),
    )
    # sin(wr)/r is regular at r = 0 and the open quadrature rules never
    # evaluate the endpoint, so all six pieces go through the same path
    return math.fsum(
        amp * _fourier_tail(f, kind, omega) for amp, f, kind, omega in pieces
    )


# ---------------------------------------------------------------------------
# the mollifier and the sandwich pair
# ---------------------------------------------------------------------------


def _bump_raw(x: float) -> float:
    if abs(x) >= 1.0:
        return 0.0
    return math.exp(-1.0 / (1.0 - x * x))


@lru_cache(maxsize=1)
def _bump_mass() -> float:
    return _quad(_bump_raw, -1.0, 1.0, epsabs=1e-14, epsrel=1e-13)


def bump(x: float) -> float:
    """The fixed even unit-mass bump supported on (-1, 1)."""
    return _bump_raw(x) / _bump_mass()


def bump_hat(r: float) -> float:
    """Fourier transform int bump(x) e^{irx} dx = 2 int_0^1 bump cos(rx) dx."""
    val = _quad(lambda x: bump(x) * math.cos(r * x), 0.0, 1.0, epsabs=1e-12)
    return 2.0 * val


@dataclass(frozen=True)
class MollifiedPair:
    """Callables for g_pm = g_{s pm delta} * q_delta and h_pm = h q_hat."""

    s: float
    delta: float
    g_plus: Callable[[float], float]
    g_minus: Callable[[float], float]
    h_plus: Callable[[float], float]
    h_minus: Callable[[float], float]
    q_hat_delta: Callable[[float], float]


def mollified_pair(s: float, delta: float) -> MollifiedPair:
    if not 0.0 < delta < 0.25:
        raise ValueError("delta must lie in (0, 1/4)")
    if s <= delta:
        raise ValueError("need s > delta")

    def q_hat_delta(r: float) -> float:
        return bump_hat(delta * r)

    def make_g(s_shift: float) -> Callable[[float], float]:
        def g(x: float) -> float:
            # integrand kinks where |x - y| crosses s_shift
            pts = sorted(
                p for p in (x - s_shift, x + s_shift) if -delta < p < delta
            )
            return _quad(
                lambda y: bump(y / delta) / delta * g_window(x - y, s_shift),
                -delta,
                delta,
                epsabs=1e-11,
                points=pts or None,
            )

        return g

    def make_h(s_shift: float) -> Callable[[float], float]:
        def h(r: float) -> float:
            return h_window(r, s_shift) * q_hat_delta(r)

        return h

    return MollifiedPair(
        s=s,
        delta=delta,
        g_plus=make_g(s + delta),
        g_minus=make_g(s - delta),
        h_plus=make_h(s + delta),
        h_minus=make_h(s - delta),
        q_hat_delta=q_hat_delta,
    )


def window_pair_integral(
    r1: float, r2: float, v: float, delta_window: float, sign: int, delta: float
) -> float:
    """(1/D) int_V^{V+D} h_{log X +- delta}(r1) h_{log X +- delta}(r2) dX.

    The oscillation in log X makes this decay like 1/((1+|r1|)(1+|r2|));
    callers compare it against (V^3/D) u(r1) u(r2) u(|r1|-|r2|).
    """
    if not 1.0 < delta_window <= v:
        raise ValueError("need 1 < Delta <= V")
    shift = delta if sign >= 0 else -delta

    def f(x: float) -> float:
        s = math.log(x) + shift
        return h_window(r1, s) * h_window(r2, s)

    val = _quad(f, v, v + delta_window, epsabs=1e-6, epsrel=1e-10, limit=600)
    return val / delta_window


# ---------------------------------------------------------------------------
# arithmetic-side test function
# ---------------------------------------------------------------------------

_EXP_REWRITE = 30.0  # switch sinh ratios to exponential form beyond this


def kuznetsov_h(r: float, x: float, t: float) -> complex:
    """sinh((pi + 2i alpha) r)/sinh(pi r) with 2 alpha = log X + i/T.

    Even in r.  For pi r > 30 the ratio is rewritten as
    X^{ir} e^{-r/T} (1 - e^{-2 pi r - 4 i alpha r})/(1 - e^{-2 pi r}),
    which never overflows and exposes the X^{ir} e^{-r/T} main term.
    """
    if x <= 1.0:
        raise ValueError("need X > 1")
    if t <= 1.0 / math.pi:
        raise ValueError("need T > 1/pi for a decaying window")
    two_alpha = complex(math.log(x), 1.0 / t)
    if r == 0.0:
        return (math.pi + 1j * two_alpha) / math.pi
    r = abs(r)
    if math.pi * r <= _EXP_REWRITE:
        return cmath.sinh((math.pi + 1j * two_alpha) * r) / math.sinh(math.pi * r)
    main = cmath.exp(1j * two_alpha * r)
    small = cmath.exp(-2.0 * math.pi * r - 2j * two_alpha * r)
    return main * (1.0 - small) / (1.0 - math.exp(-2.0 * math.pi * r))


def kuznetsov_h_asymptotic_residual(r: float, x: float, t: float) -> complex:
    """h(r) - X^{ir} e^{-r/T}, by the cancellation-free rearrangement.

    Algebraically h(r) - e^{2 i alpha r} =
    e^{-2 pi r} (e^{2 i alpha r} - e^{-2 i alpha r}) / (1 - e^{-2 pi r}),
    of size ~ e^{-2 pi r + r/T}; direct subtraction of the two O(1)
    quantities drowns in roundoff once pi*r exceeds ~25.
    """
    if r == 0.0:
        raise ValueError("asymptotic residual defined for r != 0")
    r = abs(r)
    two_alpha = complex(math.log(x), 1.0 / t)
    osc = cmath.exp(1j * two_alpha * r) - cmath.exp(-1j * two_alpha * r)
    damp = math.exp(-2.0 * math.pi * r)
    return damp * osc / (1.0 - damp)


# ---------------------------------------------------------------------------
# Bessel machinery
# ---------------------------------------------------------------------------


def k_bessel_imag_order(rho: float, x: float) -> float:
    """K_{2 i rho}(x) = int_0^inf exp(-x cosh t) cos(2 rho t) dt (real)."""
    if x <= 0.0:
        raise ValueError("need x > 0")
    # exp(-x cosh t) < 1e-18 once x cosh t > 42
    t_hi = math.acosh(max(42.0 / x, 1.0)) + 1.0
    return _quad(
        lambda u: math.exp(-x * math.cosh(u)) * math.cos(2.0 * rho * u),
        0.0,
        t_hi,
        epsabs=1e-12,
        epsrel=1e-12,
    )


def cosh_weighted_k(r: float, x: float) -> float:
    """cosh(pi r) K_{2ir}(x) = int_0^inf cos(x sinh t) cos(2rt) dt.

    The exponential growth of cosh(pi r) is absorbed analytically; the
    remaining conditionally convergent oscillatory integral is evaluated
    after u = sinh t with Fourier-weighted quadrature.
    """
    if x <= 0.0:
        raise ValueError("need x > 0")

    def f(u: float) -> float:
        return math.cos(2.0 * r * math.asinh(u)) / math.sqrt(1.0 + u * u)

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, _ = integrate.quad(f, 0.0, np.inf, weight="cos", wvar=x, limlst=300)
    return val


def _gaussian_window_cos_moment(t: float, big_t: float, m: float) -> float:
    """int r^2 (e^{-(r-T)^2/M^2} + e^{-(r+T)^2/M^2}) cos(2rt) dr, closed form."""
    z = complex(big_t, m * m * t)
    val = cmath.exp(2j * big_t * t) * (z * z + 0.5 * m * m)
    return 2.0 * math.sqrt(math.pi) * m * math.exp(-(m * t) ** 2) * val.real


def i_transform(x: float, t_loc: float, m: float, method: str = "swap") -> float:
    """I(x) = int r^2 h(r) cosh(pi r) K_{2ir}(x) dr with the Gaussian window.

    method "swap" exchanges the r and t integrals: the r integral against
    cos(2rt) has a closed form W(t), leaving the short absolutely
    convergent integral int_0^inf cos(x sinh t) W(t) dt (W dies like
    exp(-M^2 t^2)).  method "direct" performs the r quadrature over
    [-T-8M, T+8M] with the stabilized product cosh(pi r) K_{2ir}(x); it
    exists as a cross-check and is orders of magnitude slower.
    """
    if x <= 0.0 or t_loc <= 0.0 or m <= 0.0:
        raise ValueError("need x, T, M > 0")
    if m > t_loc:
        raise ValueError("need M <= T")
    if method == "swap":
        t_hi = 6.5 / m  # exp(-(M t)^2) < 3e-19 beyond
        scale = 2.0 * math.sqrt(math.pi) * m * (t_loc * t_loc + 0.5 * m * m)
        return _quad(
            lambda u: math.cos(x * math.sinh(u))
            * _gaussian_window_cos_moment(u, t_loc, m),
            0.0,
            t_hi,
            epsabs=1e-13 * scale,
            epsrel=1e-12,
            limit=600,
        )
    if method == "direct":

        def f(r: float) -> float:
            w = math.exp(-((r - t_loc) / m) ** 2) + math.exp(-((r + t_loc) / m) ** 2)
            return r * r * w * cosh_weighted_k(r, x)

        with warnings.catch_warnings():
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            val, _ = integrate.quad(
                f, 0.0, t_loc + 8.0 * m, epsabs=1e-6, epsrel=1e-8, limit=100
            )
        return 2.0 * val
    raise ValueError(f"unknown method {method!r}")


def j_star(nu: complex, z: complex) -> complex:
    """J_nu(z) (z/2)^{-nu}: the entire part of the J-Bessel power series.

    Sum over k of (-1)^k (z/2)^{2k} / (k! Gamma(nu+k+1)), truncated at
    relative 1e-12; |z| <= 50 keeps the alternating series in range.
    """
    if abs(z) > 50.0:
        raise ValueError("power-series evaluation restricted to |z| <= 50")
    q = 0.25 * z * z
    term = 1.0 / complex(special.gamma(nu + 1))
    total = term
    for k in range(1, 300):
        term = -term * q / (k * (nu + k))
        total += term
        if abs(term) < 1e-12 * max(abs(total), 1e-300) and k > abs(z):
            return total
    raise QuadratureError(f"j_star series did not converge for nu={nu}, z={z}")


def bessel_h_product(nu: complex, z: complex) -> complex:
    """H_nu(z) = 2^{-2nu} |z|^{2nu} Jstar_nu(z) Jstar_nu(conj z)."""
    if z == 0:
        if nu == 0:
            return complex(1.0)
        if nu.real > 0:
            return complex(0.0)
        raise ValueError("H_nu(0) undefined for Re(nu) <= 0, nu != 0")
    scale = cmath.exp(2.0 * nu * (cmath.log(abs(z)) - math.log(2.0)))
    return scale * j_star(nu, z) * j_star(nu, z.conjugate())
