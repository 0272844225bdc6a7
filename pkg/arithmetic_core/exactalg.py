"""
Exact Algebra Module

This module provides exact rational, polynomial and truncated power-series
arithmetic for the zeta-function pipeline: zeta series from point counts,
rational-function reconstruction from truncated series, conversions between
power sums and characteristic polynomials, and the two numeric certificates
(root magnitudes and the functional-equation sign).

All L-function arithmetic is exact over fractions.Fraction; high-precision
complex values (mpmath) only appear in root_magnitudes.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from math import lcm

import mpmath

from arithmetic_core.errors import (
    InconsistentDet,
    MismatchBeyondOrder,
    NoFunctionalEquation,
    NonConvergence,
    SingularSystem,
)

logger = logging.getLogger(__name__)

DEFAULT_BITS = 128
PADE_SLACK = 2
# ComplexHP: mpmath's complex type evaluated under mpmath.workprec(bits)
ComplexHP = mpmath.mpc


def _frac(value):
    if isinstance(value, Fraction):
        return value
    return Fraction(value)


@dataclass(frozen=True)
class Poly:
    """Dense polynomial over the rationals, lowest degree first."""

    coeffs: tuple

    def __post_init__(self):
        coeffs = [_frac(c) for c in self.coeffs]
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs.pop()
        if not coeffs:
            coeffs = [Fraction(0)]
        object.__setattr__(self, "coeffs", tuple(coeffs))

    @classmethod
    def one(cls):
        return cls((1,))

    @classmethod
    def linear(cls, alpha):
        """The factor 1 - alpha*T."""
        return cls((1, -_frac(alpha)))

    @property
    def degree(self):
        if self.is_zero():
            return -1
        return len(self.coeffs) - 1

    def is_zero(self):
        return len(self.coeffs) == 1 and self.coeffs[0] == 0

    def __call__(self, x):
        acc = Fraction(0) if not isinstance(x, mpmath.mpc) else mpmath.mpc(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __add__(self, other):
        a, b = self.coeffs, other.coeffs
        size = max(len(a), len(b))
        return Poly(tuple(
            (a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)
            for i in range(size)
        ))

    def __neg__(self):
        return Poly(tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, Poly):
            return Poly(tuple(c * _frac(other) for c in self.coeffs))
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Poly(tuple(out))

    __rmul__ = __mul__

    def __pow__(self, exponent):
        result = Poly.one()
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def divmod(self, other):
        """Euclidean division over the rationals."""
        if other.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        rem = list(self.coeffs)
        quot = [Fraction(0)] * max(1, len(rem) - len(other.coeffs) + 1)
        lead = other.coeffs[-1]
        dd = other.degree
        for i in range(len(rem) - 1, dd - 1, -1):
            coef = rem[i] / lead
            if coef == 0:
                continue
            quot[i - dd] = coef
            for j, c in enumerate(other.coeffs):
                rem[i - dd + j] -= coef * c
        return Poly(tuple(quot)), Poly(tuple(rem[:max(1, dd)]))

    def exact_div(self, other):
        quot, rem = self.divmod(other)
        if not rem.is_zero():
            raise ArithmeticError("polynomial division is not exact")
        return quot

    def monic(self):
        return self * (1 / self.coeffs[-1])

    def normalized(self):
        """Scale so that the constant coefficient is 1."""
        return self * (1 / self.coeffs[0])

    def derivative(self):
        if self.degree < 1:
            return Poly((0,))
        return Poly(tuple(i * c for i, c in enumerate(self.coeffs) if i))

    def root_multiplicity(self, root):
        """Multiplicity of T = root as a zero of this polynomial."""
        count = 0
        poly = self
        divisor = Poly((-_frac(root), 1))
        while not poly.is_zero():
            quot, rem = poly.divmod(divisor)
            if not rem.is_zero():
                break
            poly = quot
            count += 1
        return count


def poly_gcd(a, b):
    """Monic gcd of two polynomials over the rationals."""
    while not b.is_zero():
        a, b = b, a.divmod(b)[1]
    if a.is_zero():
        return a
    return a.monic()


def squarefree_factors(p):
    """
    Square-free decomposition p = c * prod f_i^i (Yun).

    Returns:
        list: (f_i, i) pairs with deg f_i >= 1, each f_i square-free
    """
    if p.degree < 1:
        return []
    d = p.derivative()
    a = poly_gcd(p, d)
    b, c = p.exact_div(a), d.exact_div(a)
    out = []
    i = 1
    while b.degree >= 1:
        dd = c - b.derivative()
        g = poly_gcd(b, dd)
        if g.degree >= 1:
            out.append((g, i))
        b, c = b.exact_div(g), dd.exact_div(g)
        i += 1
    return out


@dataclass(frozen=True)
class ZetaSeries:
    """Truncated power series 1 + z_1 T + ... + z_K T^K."""

    order: int
    coeffs: tuple
    base_q: int = 1

    def __post_init__(self):
        coeffs = tuple(_frac(c) for c in self.coeffs)
        object.__setattr__(self, "coeffs", coeffs)
        if self.order < 1:
            raise ValueError("series order must be at least 1")
        if len(coeffs) != self.order + 1:
            raise ValueError("series needs order + 1 coefficients")
        if coeffs[0] != 1:
            raise ValueError("series must start with 1")

    def is_integral(self):
        return all(c.denominator == 1 for c in self.coeffs)

    def truncate(self, order):
        return ZetaSeries(order, self.coeffs[: order + 1], self.base_q)


@dataclass(frozen=True)
class RationalFunctionRF:
    """Reduced quotient num/den with den(0) = 1."""

    num: Poly
    den: Poly
    verified_to: int

    def __post_init__(self):
        if self.den.coeffs[0] != 1:
            raise ValueError("denominator must have constant term 1")

    @property
    def total_degree(self):
        return self.num.degree - self.den.degree

    def series(self, order):
        return series_from_rational(self.num, self.den, order)


# Truncated series on coefficient lists

def series_mul(a, b, order):
    out = [Fraction(0)] * (order + 1)
    for i, x in enumerate(a[: order + 1]):
        if x == 0:
            continue
        for j, y in enumerate(b[: order + 1 - i]):
            out[i + j] += x * y
    return out


def series_inv(a, order):
    a = [_frac(c) for c in a]
    if a[0] == 0:
        raise ZeroDivisionError("series with zero constant term is not invertible")
    inv0 = 1 / a[0]
    out = [inv0] + [Fraction(0)] * order
    for k in range(1, order + 1):
        acc = Fraction(0)
        for j in range(1, min(k, len(a) - 1) + 1):
            acc += a[j] * out[k - j]
        out[k] = -acc * inv0
    return out


def series_power(a, alpha, order):
    """
    Rational power of a series with constant term 1.

    Uses the J.C.P. Miller recurrence
    r_k = (1/k) * sum_{j=1}^{k} ((alpha + 1) j - k) a_j r_{k-j}.

    Args:
        a (list): Coefficients, a[0] == 1
        alpha (Fraction): Exponent
        order (int): Truncation order

    Returns:
        list: Coefficients of a^alpha up to T^order
    """
    a = [_frac(c) for c in a] + [Fraction(0)] * max(0, order + 1 - len(a))
    if a[0] != 1:
        raise ValueError("series_power expects constant term 1")
    alpha = _frac(alpha)
    out = [Fraction(1)] + [Fraction(0)] * order
    for k in range(1, order + 1):
        acc = Fraction(0)
        for j in range(1, k + 1):
            if a[j]:
                acc += ((alpha + 1) * j - k) * a[j] * out[k - j]
        out[k] = acc / k
    return out


def poly_series(poly, order):
    coeffs = list(poly.coeffs[: order + 1])
    return coeffs + [Fraction(0)] * (order + 1 - len(coeffs))


def series_from_rational(num, den, order):
    return series_mul(poly_series(num, order), series_inv(den.coeffs, order), order)


def trivial_product_series(exponents, q, order):
    """
    Expand prod_i (1 - q^i T)^{e_i} to the given order.

    Args:
        exponents (dict): Map q-power i -> integer exponent e_i
        q (int): Base
        order (int): Truncation order

    Returns:
        list: Fraction coefficients
    """
    out = [Fraction(1)] + [Fraction(0)] * order
    for power, exp in sorted(exponents.items()):
        if exp == 0:
            continue
        root = _frac(q) ** power
        if exp > 0:
            factor = poly_series(Poly.linear(root) ** exp, order)
        else:
            geometric = [root ** k for k in range(order + 1)]
            factor = [Fraction(1)] + [Fraction(0)] * order
            for _ in range(-exp):
                factor = series_mul(factor, geometric, order)
        out = series_mul(out, factor, order)
    return out


def series_exp_from_counts(counts, base_q=1):
    """
    Zeta series exp(sum_k N_k T^k / k) from the counts N_1..N_K.

    Uses k z_k = sum_{j=1}^{k} N_j z_{k-j}.

    Args:
        counts (list): Integer counts N_1..N_K
        base_q (int): Field size recorded on the series

    Returns:
        ZetaSeries: Series of order K
    """
    order = len(counts)
    if order < 1:
        raise ValueError("need at least one count")
    z = [Fraction(1)] + [Fraction(0)] * order
    for k in range(1, order + 1):
        acc = Fraction(0)
        for j in range(1, k + 1):
            acc += counts[j - 1] * z[k - j]
        z[k] = acc / k
    return ZetaSeries(order, tuple(z), base_q)


def counts_from_series(coeffs):
    """
    Inverse of series_exp_from_counts: recover N_1..N_K.

    Args:
        coeffs (list or ZetaSeries): Series coefficients with constant term 1

    Returns:
        list: Fraction counts N_1..N_K
    """
    if isinstance(coeffs, ZetaSeries):
        coeffs = coeffs.coeffs
    z = [_frac(c) for c in coeffs]
    counts = []
    for k in range(1, len(z)):
        acc = k * z[k]
        for j in range(1, k):
            acc -= counts[j - 1] * z[k - j]
        counts.append(acc)
    return counts


# Rational-function reconstruction

def _solve_bareiss(rows, rhs):
    """Solve a square system exactly, fraction-free. Returns None if singular."""
    size = len(rows)
    if size == 0:
        return []
    aug = []
    for row, value in zip(rows, rhs):
        entries = [_frac(x) for x in row] + [_frac(value)]
        scale = lcm(*(x.denominator for x in entries))
        aug.append([int(x * scale) for x in entries])
    prev = 1
    for k in range(size):
        pivot = next((r for r in range(k, size) if aug[r][k] != 0), None)
        if pivot is None:
            return None
        if pivot != k:
            aug[k], aug[pivot] = aug[pivot], aug[k]
        for i in range(k + 1, size):
            for j in range(k + 1, size + 1):
                aug[i][j] = (aug[i][j] * aug[k][k] - aug[i][k] * aug[k][j]) // prev
            aug[i][k] = 0
        prev = aug[k][k]
    solution = [Fraction(0)] * size
    for i in range(size - 1, -1, -1):
        acc = Fraction(aug[i][size])
        for j in range(i + 1, size):
            acc -= aug[i][j] * solution[j]
        solution[i] = acc / aug[i][i]
    return solution


def _residual_ok(den, c, deg_num, order):
    for k in range(deg_num + 1, order + 1):
        acc = Fraction(0)
        for j, d in enumerate(den):
            if j > k:
                break
            acc += d * c[k - j]
        if acc != 0:
            return False
    return True


def pade_reconstruct(series, deg_num, deg_den):
    """
    Recover num/den from a truncated series.

    Candidate degree pairs (m, e) with m <= deg_num, e <= deg_den are tried by
    increasing e; each solves the e x e Hankel system
    sum_{j=1}^{e} d_j c_{k-j} = -c_k, k = m+1..m+e, and the first candidate that
    reproduces every coefficient up to the series order is returned, reduced.

    Args:
        series (ZetaSeries): Truncated series
        deg_num (int): Numerator degree bound
        deg_den (int): Denominator degree bound

    Returns:
        RationalFunctionRF: Reduced rational function verified to series.order

    Raises:
        SingularSystem: Every system was singular
        MismatchBeyondOrder: Solutions exist but none matches the extra terms
    """
    order = series.order
    if order < deg_num + deg_den + PADE_SLACK:
        raise ValueError(f"series of order {order} too short for bounds ({deg_num}, {deg_den}); "
                         f"need {PADE_SLACK} extra terms")
    c = list(series.coeffs)
    nonsingular = 0
    for e in range(deg_den + 1):
        for m in range(deg_num, -1, -1):
            rows = [
                [c[k - j] if k - j >= 0 else Fraction(0) for j in range(1, e + 1)]
                for k in range(m + 1, m + e + 1)
            ]
            rhs = [-c[k] for k in range(m + 1, m + e + 1)]
            sol = _solve_bareiss(rows, rhs)
            if sol is None:
                continue
            nonsingular += 1
            den = [Fraction(1)] + sol
            if not _residual_ok(den, c, m, order):
                continue
            num = series_mul(den, c, m)
            num_poly, den_poly = Poly(tuple(num)), Poly(tuple(den))
            common = poly_gcd(num_poly, den_poly)
            if common.degree > 0:
                num_poly = num_poly.exact_div(common)
                den_poly = den_poly.exact_div(common)
            scale = den_poly.coeffs[0]
            logger.debug("pade: degrees (%d, %d) verified to order %d", m, e, order)
            return RationalFunctionRF(num_poly * (1 / scale), den_poly * (1 / scale), order)
    if nonsingular == 0:
        raise SingularSystem(
            f"no nonsingular Hankel system for bounds ({deg_num}, {deg_den})",
            deg_num=deg_num, deg_den=deg_den,
        )
    raise MismatchBeyondOrder(
        f"no reconstruction with bounds ({deg_num}, {deg_den}) matches to order {order}",
        deg_num=deg_num, deg_den=deg_den, order=order,
    )


# Newton identities

def elementary_from_power_sums(power_sums, top):
    """e_0..e_top from p_1..p_top via k e_k = sum (-1)^{i-1} e_{k-i} p_i."""
    e = [Fraction(1)]
    for k in range(1, top + 1):
        acc = Fraction(0)
        for i in range(1, k + 1):
            term = e[k - i] * power_sums[i - 1]
            acc += term if i % 2 == 1 else -term
        e.append(acc / k)
    return e


def complete_from_power_sums(power_sums, top):
    """h_0..h_top from p_1..p_top via k h_k = sum p_i h_{k-i}."""
    h = [Fraction(1)]
    for k in range(1, top + 1):
        acc = Fraction(0)
        for i in range(1, k + 1):
            acc += power_sums[i - 1] * h[k - i]
        h.append(acc / k)
    return h


def power_sums_to_charpoly(power_sums, rank, det_value=None):
    """
    Characteristic polynomial prod(1 - alpha_i T) from its power sums.

    Args:
        power_sums (list): p_1..p_r
        rank (int): Number of eigenvalues
        det_value (Fraction, optional): prod alpha_i; required when r = rank - 1

    Returns:
        Poly: Degree-rank polynomial with constant term 1

    Raises:
        InconsistentDet: r = rank and det_value disagrees with e_rank
    """
    ps = [_frac(x) for x in power_sums]
    r = len(ps)
    if r == rank:
        e = elementary_from_power_sums(ps, rank)
        if det_value is not None and e[rank] != _frac(det_value):
            raise InconsistentDet(
                f"determinant {det_value} disagrees with power sums ({e[rank]})",
                expected=det_value, observed=e[rank],
            )
    elif r == rank - 1 and det_value is not None:
        e = elementary_from_power_sums(ps, rank - 1) + [_frac(det_value)]
    else:
        raise ValueError(f"need {rank} power sums, or {rank - 1} with a determinant")
    return Poly(tuple(ek if k % 2 == 0 else -ek for k, ek in enumerate(e)))


def charpoly_from_functional_equation(power_sums, rank, det_value, q, weight):
    """
    Fill a self-dual characteristic polynomial from its lower half.

    The roots are stable under alpha -> q^weight / alpha, which forces
    c_{r-i} = (-1)^r q^{w(r-i)} c_i / det. Only floor(rank/2) power sums are
    needed.
    """
    half = rank // 2
    e = elementary_from_power_sums([_frac(x) for x in power_sums], half)
    low = [ek if k % 2 == 0 else -ek for k, ek in enumerate(e)]
    coeffs = [Fraction(0)] * (rank + 1)
    for i, ci in enumerate(low):
        coeffs[i] = ci
    det_value = _frac(det_value)
    sign = -1 if rank % 2 else 1
    for i in range(0, rank - half):
        coeffs[rank - i] = sign * _frac(q) ** (weight * (rank - i)) * coeffs[i] / det_value
    return Poly(tuple(coeffs))


def charpoly_power_sums(cp, top):
    """p_1..p_top of the reciprocal roots of cp, with cp(0) = 1."""
    c = list(cp.coeffs)
    ps = []
    for k in range(1, top + 1):
        acc = -k * c[k] if k < len(c) else Fraction(0)
        for i in range(1, min(k, len(c))):
            acc -= c[i] * ps[k - i - 1]
        ps.append(acc)
    return ps


def charpoly_power_sum(cp, d):
    """
    Sum of alpha_i^d where cp = prod(1 - alpha_i T).

    Args:
        cp (Poly): Polynomial with constant term 1
        d (int): Power, d >= 1

    Returns:
        Fraction: The power sum
    """
    if cp.coeffs[0] != 1:
        raise ValueError("charpoly must have constant term 1")
    return charpoly_power_sums(cp, d)[d - 1]


# Numeric certificates

@dataclass(frozen=True)
class RootMagnitude:
    value: mpmath.mpf
    error: mpmath.mpf


def root_magnitudes(p, bits=DEFAULT_BITS):
    """
    Magnitudes of the complex roots of p, with an error bound.

    Repeated roots are separated exactly first, so polyroots only sees
    square-free factors; each root is listed with its multiplicity.

    Args:
        p (Poly): Polynomial of degree >= 1
        bits (int): Working precision

    Returns:
        list: RootMagnitude per root, sorted by value

    Raises:
        NonConvergence: Root iteration did not converge
    """
    if p.degree < 1:
        raise ValueError("root_magnitudes needs degree >= 1")
    out = []
    with mpmath.workprec(bits):
        for factor, multiplicity in squarefree_factors(p):
            coeffs = [mpmath.mpf(c.numerator) / c.denominator for c in reversed(factor.coeffs)]
            try:
                roots, err = mpmath.polyroots(
                    coeffs, maxsteps=50 + 20 * factor.degree, extraprec=bits, error=True
                )
            except mpmath.mp.NoConvergence as exc:
                raise NonConvergence(f"polyroots failed for degree {factor.degree}") from exc
            bound = max(err, mpmath.mpf(2) ** (8 - bits))
            out.extend(RootMagnitude(abs(r), bound) for r in roots for _ in range(multiplicity))
    return sorted(out, key=lambda rm: rm.value)


def reciprocal_root_magnitudes(p, bits=DEFAULT_BITS):
    """Magnitudes |alpha_i| of the reciprocal roots of p = prod(1 - alpha_i T)."""
    with mpmath.workprec(bits):
        return sorted(1 / rm.value for rm in root_magnitudes(p, bits))


def functional_equation_check(p, weight, q):
    """
    Sign of the functional equation of a pure polynomial.

    The reported sign is the normalised determinant prod(alpha_i) / q^{wr/2},
    i.e. the eps in P(T) = eps * (-T)^r * q^{wr/2} * P(1/(q^w T)).

    Args:
        p (Poly): Polynomial with p(0) = 1
        weight (int): Weight w
        q (int): Field size

    Returns:
        int: +1 or -1

    Raises:
        NoFunctionalEquation: Neither sign works
    """
    c = p.coeffs
    r = p.degree
    if r <= 0:
        return 1
    lead_sign = 1 if c[r] > 0 else -1
    q = _frac(q)
    for i in range(r + 1):
        lhs, rhs = c[r - i], c[i]
        twice_exp = weight * (r - 2 * i)
        if (weight * r) % 2 == 0:
            if lhs != lead_sign * q ** (twice_exp // 2) * rhs:
                break
        else:
            if lhs * lhs != q ** twice_exp * rhs * rhs or lead_sign * lhs * rhs < 0:
                break
    else:
        return lead_sign * (-1) ** r
    raise NoFunctionalEquation(
        f"no functional equation of weight {weight} over q={q}",
        weight=weight, q=int(q),
    )
