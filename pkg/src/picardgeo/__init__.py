"""Prime-geodesic statistics on the Picard manifold PSL(2, Z[i]) \\ H^3.

Subpackages:

* :mod:`picardgeo.gaussian` -- exact Z[i] arithmetic;
* :mod:`picardgeo.kloosterman` -- Gaussian Kloosterman sums and Weil-bound scans;
* :mod:`picardgeo.census` -- discriminants, Pell units, class numbers, the
  geodesic census and the counting function psi(X) with its error term;
* :mod:`picardgeo.spectral` -- eigenvalue ingestion, spectral exponential
  sums and the explicit formula;
* :mod:`picardgeo.transforms` -- trace-formula test functions and the
  Bessel-type transforms they require;
* :mod:`picardgeo.cli` -- the ``picardgeo`` command-line tool.
"""

from .gaussian import GaussianInt, parse_gaussian

__all__ = ["GaussianInt", "parse_gaussian"]
__version__ = "0.1.0"
