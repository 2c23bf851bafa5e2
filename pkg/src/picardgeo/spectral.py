"""Spectral-side quantities: eigenvalue data, exponential sums, explicit formula.

Laplace eigenvalues on the quotient are written lambda_j = 1 + r_j^2; the
spectral parameters r_j come from a data file (this package does not
compute eigenvalues).  The two consumers are the spectral exponential sum
S(T,X) = sum_{0 < r_j <= T} X^{i r_j} and the explicit-formula main sum
2 Re sum X^{1+i r_j}/(1+i r_j), which approximates the census error term
E(X) up to O(X^2 log X / T) for 1 <= T <= sqrt(X).
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass
from typing import Iterable, Sequence


class SpectrumFormatError(ValueError):
    """Malformed spectrum file (bad line, non-ascending, out-of-range r)."""


@dataclass(frozen=True, slots=True)
class SpectralDatum:
    r: float
    multiplicity: int = 1


# unit-interval eigenvalue counts grow at most like C_w * T^2; the file
# carries no scattering data, so violations can only warn
DEFAULT_WEYL_CONSTANT = 4.0


def validate_spectrum(
    data: Sequence[SpectralDatum], weyl_constant: float = DEFAULT_WEYL_CONSTANT
) -> list[str]:
    """Unit-interval count sanity check; returns warning strings."""
    out = []
    if not data:
        return out
    top = data[-1].r
    t = 1.0
    while t <= top:
        count = sum(s.multiplicity for s in data if t <= s.r < t + 1.0)
        if count > weyl_constant * t * t:
            out.append(
                f"unit interval [{t:g},{t + 1:g}) holds {count} eigenvalues, "
                f"more than {weyl_constant:g}*T^2 = {weyl_constant * t * t:g}"
            )
        t += 1.0
    return out


def load_spectrum(
    path, weyl_constant: float = DEFAULT_WEYL_CONSTANT
) -> list[SpectralDatum]:
    """Read 'r,multiplicity' lines ('#' comments, multiplicity optional).

    Enforces finite r > 0, strictly ascending, no duplicates; multiplicity
    must be a positive integer.  Weyl-law violations warn, never fail.
    """
    data: list[SpectralDatum] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = [p.strip() for p in line.split(",")]
            if len(parts) > 2:
                raise SpectrumFormatError(f"{path}:{lineno}: too many fields")
            try:
                r = float(parts[0])
            except ValueError:
                raise SpectrumFormatError(
                    f"{path}:{lineno}: bad spectral parameter {parts[0]!r}"
                ) from None
            if not math.isfinite(r):
                raise SpectrumFormatError(f"{path}:{lineno}: non-finite r")
            if r <= 0.0:
                raise SpectrumFormatError(f"{path}:{lineno}: r must be positive")
            mult = 1
            if len(parts) == 2 and parts[1]:
                try:
                    mult = int(parts[1])
                except ValueError:
                    raise SpectrumFormatError(
                        f"{path}:{lineno}: bad multiplicity {parts[1]!r}"
                    ) from None
                if mult < 1:
                    raise SpectrumFormatError(f"{path}:{lineno}: multiplicity < 1")
            if data and r <= data[-1].r:
                raise SpectrumFormatError(
                    f"{path}:{lineno}: r = {r} not strictly ascending "
                    f"(previous {data[-1].r}); merge duplicates via multiplicity"
                )
            data.append(SpectralDatum(r=r, multiplicity=mult))
    for msg in validate_spectrum(data, weyl_constant):
        warnings.warn(msg, stacklevel=2)
    return data


def spectral_exponential_sum(
    t_max: float, x: float, spectrum: Iterable[SpectralDatum]
) -> complex:
    """S(T,X) = sum of multiplicity * X^{i r_j} over 0 < r_j <= T."""
    if t_max <= 0.0 or x <= 0.0:
        raise ValueError("need T > 0 and X > 0")
    lx = math.log(x)
    total = 0.0 + 0.0j
    for s in spectrum:
        if s.r > t_max:
            break
        total += s.multiplicity * cmath.exp(1j * s.r * lx)
    return total


def explicit_formula_error(
    x: float, t_max: float, spectrum: Iterable[SpectralDatum]
) -> float:
    """Main sum of the explicit formula: 2 Re sum X^{1+ir_j}/(1+ir_j), r_j <= T.

    Approximates E(X) with an O(X^2 log X / T) error; the stated validity
    range is T <= sqrt(X), beyond which a warning is issued.
    """
    if t_max < 1.0:
        raise ValueError("need T >= 1")
    if t_max > math.sqrt(x):
        warnings.warn(
            f"T = {t_max:g} exceeds sqrt(X) = {math.sqrt(x):g}; outside the "
            "stated validity range",
            stacklevel=2,
        )
    lx = math.log(x)
    total = 0.0
    for s in spectrum:
        if s.r > t_max:
            break
        z = cmath.exp((1.0 + 1j * s.r) * lx) / (1.0 + 1j * s.r)
        total += s.multiplicity * 2.0 * z.real
    return total
