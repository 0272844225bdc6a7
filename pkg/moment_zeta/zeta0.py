"""
Zeta Function of the Zero Fibre

This module provides the zeta function of X_0 over F_p as a product of
trivial factors and one factor (1 - T^d G_{p^d}(sigma(p^d - 1))^{n+1} / p^d)
per orbit sigma of length d of multiplication by p on S_m, where
n + 1 = p^a m with p not dividing m.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

import mpmath

from arithmetic_core.charsums import p_orbits
from arithmetic_core.errors import CapExceeded, Mismatch, OrbitFieldCapExceeded, PrecisionLoss
from arithmetic_core.exactalg import (
    Poly,
    counts_from_series,
    poly_series,
    series_exp_from_counts,
    series_inv,
    series_mul,
)
from arithmetic_core.ffield import is_prime
from moment_zeta.config import RunConfig
from moment_zeta.counting import count_bruteforce, count_gauss_zero, zero_fiber_modulus
from moment_zeta.formulas import TrivialFactorSpec

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ZetaX0Report:
    p: int
    n: int
    a: int
    m: int
    trivial: TrivialFactorSpec
    nontrivial: Poly
    orbits: object
    orbit_data: list = field(default_factory=list)
    bits: int = 128

    @property
    def sign_exponent(self):
        """Z(X_0, T)^{sign_exponent} = trivial * nontrivial."""
        return (-1) ** self.n


def _p_adic_split(p, n):
    m = zero_fiber_modulus(p, n)
    a, rest = 0, (n + 1) // m
    while rest > 1:
        rest //= p
        a += 1
    return a, m


def _round_poly(coeffs, denominator, bits):
    tol = mpmath.mpf(2) ** (20 - bits)
    out = []
    for c in coeffs:
        numerator = int(mpmath.nint(c.real * denominator))
        rounded = Fraction(numerator, denominator)
        if abs(c - mpmath.mpf(numerator) / denominator) > tol * max(1, abs(c)):
            raise PrecisionLoss(f"coefficient {mpmath.nstr(c, 15)} does not round to a multiple of 1/{denominator}")
        out.append(rounded)
    return out


def zeta_X0(p, n, bits=None, config=None):
    """
    Zeta function of X_0 over F_p from Gauss sums on the p-orbits of S_m.

    Args:
        p (int): Prime
        n (int): Number of variables
        bits (int, optional): Precision, defaults to the config's
        config (RunConfig): Caps and cache

    Returns:
        ZetaX0Report: Trivial exponents, nontrivial polynomial and orbit table

    Raises:
        OrbitFieldCapExceeded: An orbit needs F_{p^d} beyond the field cap
        PrecisionLoss: The product does not round to rationals
    """
    config = config or RunConfig()
    bits = bits or config.precision_bits
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    a, m = _p_adic_split(p, n)
    trivial = TrivialFactorSpec.from_map(
        [(i, comb(n, i + 1) * (-1) ** i) for i in range(n)], p)
    orbits = p_orbits(m, p)
    orbit_data = []
    with mpmath.workprec(bits):
        product = [mpmath.mpc(1)]
        for orbit in orbits.orbits:
            d = orbit.length
            if p ** d > config.field_cap:
                raise OrbitFieldCapExceeded(f"orbit of length {d} needs F_{p}^{d}", p=p, d=d)
            ctx = config.field(p, d)
            gt = config.gauss_table(ctx)
            index = int(orbit.representative * (p ** d - 1))
            g = gt.value(index)
            coeff = g ** (n + 1) / p ** d
            factor = [mpmath.mpc(1)] + [mpmath.mpc(0)] * (d - 1) + [-coeff]
            new = [mpmath.mpc(0)] * (len(product) + d)
            for i, x in enumerate(product):
                for j, y in enumerate(factor):
                    new[i + j] += x * y
            product = new
            orbit_data.append({
                "representative": str(orbit.representative),
                "length": d,
                "members": [str(r) for r in orbit.members],
                "gauss_index": index,
                "gauss_value": [mpmath.nstr(g.real, 30), mpmath.nstr(g.imag, 30)],
                "factor_coefficient": [mpmath.nstr(coeff.real, 30), mpmath.nstr(coeff.imag, 30)],
                "root_magnitude": mpmath.nstr(abs(coeff), 20),
                "expected_magnitude": mpmath.nstr(mpmath.mpf(p) ** (mpmath.mpf(d * (n - 1)) / 2), 20),
            })
        denominator = p ** orbits.degree()
        nontrivial = Poly(tuple(_round_poly(product, denominator, bits)))
    if nontrivial.degree != m - 1:
        raise Mismatch(f"nontrivial degree {nontrivial.degree} != m - 1 = {m - 1}")
    logger.info("zeta of X_0 over F_%d (n=%d): %d orbits, degree %d",
                p, n, len(orbits.orbits), nontrivial.degree)
    return ZetaX0Report(p, n, a, m, trivial, nontrivial, orbits, orbit_data, bits)


def zeta_X0_series(report, K):
    """Coefficients of Z(X_0, T) up to T^K."""
    s = series_mul(report.trivial.series(K), poly_series(report.nontrivial, K), K)
    if report.sign_exponent == -1:
        s = series_inv(s, K)
    return s


def zero_fiber_counts(p, n, K, config=None):
    """N_{p^k}(0) for k = 1..K, by enumeration within the work cap and by Gauss sums above it."""
    config = config or RunConfig()
    counts = []
    for k in range(1, K + 1):
        if p ** k > config.field_cap:
            raise CapExceeded(f"F_{p}^{k} beyond field cap", p=p, k=k)
        ctx = config.field(p, k)
        if (p ** k - 1) ** n <= config.work_cap:
            counts.append(count_bruteforce(ctx, n, 0, config.work_cap).N)
        else:
            counts.append(count_gauss_zero(ctx, config.gauss_table(ctx), n).N)
    return counts


def validate_zeta_X0(report, K, config=None):
    """
    Compare the report's expansion with the zeta series of independent counts.

    Returns:
        Fraction: Largest absolute coefficient deviation (0 on success)

    Raises:
        Mismatch: Any coefficient differs
    """
    counts = zero_fiber_counts(report.p, report.n, K, config)
    expected = series_exp_from_counts(counts, report.p).coeffs
    observed = zeta_X0_series(report, K)
    deviation = max(abs(Fraction(x) - Fraction(y)) for x, y in zip(observed, expected))
    if deviation:
        derived = counts_from_series(observed)
        raise Mismatch(
            f"zeta of X_0 (p={report.p}, n={report.n}) disagrees with counts {counts}; "
            f"expansion implies {[str(c) for c in derived]}",
            deviation=str(deviation),
        )
    return deviation
