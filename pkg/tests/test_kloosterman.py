import math

import pytest

from picardgeo.gaussian import (
    GaussianDomainError,
    GaussianInt,
    canonical_nonzero,
    totient,
)
from picardgeo.kloosterman import gcd_average, kloosterman, weil_ratio

G = GaussianInt


def test_single_residue_example():
    # S(1,1;1+i): one unit residue, value exactly 1
    r = kloosterman(G(1, 0), G(1, 0), G(1, 1))
    assert r.terms == 1
    assert r.value == pytest.approx(1.0, abs=1e-12)
    assert r.imag_residual <= 1e-12


def test_zero_frequencies_give_totient():
    for c in [G(2, 0), G(1, 2), G(3, 0), G(4, 1), G(5, 5)]:
        r = kloosterman(G(0, 0), G(0, 0), c)
        assert r.value == float(totient(c))


def test_unit_modulus_convention():
    r = kloosterman(G(3, 1), G(0, 2), G(0, 1))
    assert r.value == 1.0 and r.terms == 0


def test_zero_modulus_rejected():
    with pytest.raises(GaussianDomainError):
        kloosterman(G(1, 0), G(1, 0), G(0, 0))


def test_symmetry_in_m_n():
    ms = [G(1, 0), G(0, 1), G(2, 1), G(1, 1)]
    cs = [G(3, 0), G(1, 2), G(4, 2), G(5, 1)]
    for c in cs:
        for m in ms:
            for n in ms:
                a = kloosterman(m, n, c)
                b = kloosterman(n, m, c)
                assert abs(a.value - b.value) <= 1e-10 * max(a.terms, 1)


def test_realness_residual():
    for c in canonical_nonzero(200):
        r = kloosterman(G(1, 0), G(1, 1), c)
        assert r.imag_residual <= 1e-10 * max(r.terms, 1)


def test_factored_agrees_with_naive():
    ms = [G(0, 0), G(1, 0), G(1, 1), G(2, 0)]
    for c in canonical_nonzero(300):
        for m in ms:
            a = kloosterman(m, G(1, 0), c, strategy="naive")
            b = kloosterman(m, G(1, 0), c, strategy="factored")
            assert abs(a.value - b.value) <= 1e-9 * max(a.terms, 1)


def test_naive_refuses_huge_modulus():
    big = G(2000, 1)  # N = 4e6 + 1
    with pytest.raises(GaussianDomainError):
        kloosterman(G(1, 0), G(1, 0), big, strategy="naive")


def test_weil_ratio_example():
    # |S(1,1;1+i)| / (sqrt(2) * 1 * 2) = 1/(2 sqrt 2)
    r = weil_ratio(G(1, 0), G(1, 0), G(1, 1))
    assert r == pytest.approx(1.0 / (2.0 * math.sqrt(2.0)), abs=1e-12)


def test_weil_ratio_degenerate_frequencies():
    c = G(2, 1)
    r = weil_ratio(G(0, 0), G(0, 0), c)
    expected = totient(c) / (math.sqrt(c.norm()) * abs(c) * 2)
    assert r == pytest.approx(expected, rel=1e-12)


def test_gcd_average_unit_frequency():
    # gcd(1,1,c) = 1 for every c, so the sum equals the count
    res = gcd_average(G(1, 0), G(1, 0), 100)
    assert res.total == pytest.approx(float(res.count))
    assert res.count == sum(1 for _ in canonical_nonzero(100))


def test_gcd_average_zero_case():
    res = gcd_average(G(0, 0), G(0, 0), 10)
    expected = math.fsum(abs(c) for c in canonical_nonzero(10))
    assert res.total == pytest.approx(expected)


def test_gcd_average_growth_is_slow():
    base = gcd_average(G(4, 0), G(6, 0), 1000)
    bigger = gcd_average(G(4, 0), G(6, 0), 10000)
    assert base.ratio < 2.0
    # ratio grows far slower than the range
    assert bigger.ratio <= base.ratio * 1.5
