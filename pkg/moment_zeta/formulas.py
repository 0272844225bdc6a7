"""
Closed-Form Formulas Module

This module provides every combinatorial quantity attached to the sheaves
G_{a,b} = Sym^a F (x) wedge^b F of the family: the counting functions C, B, N,
the exponents alpha of the local factor at infinity, the beta generating
function, the delta table, the inertia-invariant dimensions D at the singular
fibres, the degree of P_{a,b}, and the trivial factors of the moment zeta
functions.

Formula registries follow a simple convention: integer polynomials are lists of
coefficients (lowest degree first) and products of (1 - q^i T)^e are
TrivialFactorSpec exponent maps.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, combinations_with_replacement
from math import comb

from arithmetic_core.errors import CapExceeded, HalfIntegerPower, Mismatch, NegativeDegree
from arithmetic_core.exactalg import Poly, trivial_product_series

logger = logging.getLogger(__name__)

ENUMERATION_MAX_WEIGHT = 12
ENUMERATION_MAX_N = 8


def binom(x, y):
    """Binomial coefficient with C(x, y) = 0 for y < 0 or x < y, except C(-1, -1) = 1."""
    if y < 0:
        return 1 if x == -1 and y == -1 else 0
    if x < y:
        return 0
    return comb(x, y)


# Integer polynomial helpers

def _imul(a, b, top=None):
    size = len(a) + len(b) - 1
    if top is not None:
        size = min(size, top + 1)
    out = [0] * max(size, 1)
    for i, x in enumerate(a):
        if x == 0 or i >= size:
            continue
        for j, y in enumerate(b):
            if i + j >= size:
                break
            out[i + j] += x * y
    return out


def _one_minus_x_power(i):
    out = [0] * (i + 1)
    out[0] += 1
    out[i] -= 1
    return out


def _div_one_minus_x_power(a, i):
    """Exact division of a by (1 - x^i)."""
    out = list(a)
    for j in range(i, len(out)):
        out[j] += out[j - i]
    if any(out[len(out) - i:]):
        raise ArithmeticError(f"division by 1 - x^{i} is not exact")
    return out[: len(out) - i] or [0]


def _geometric(i, top):
    out = [0] * (top + 1)
    for j in range(0, top + 1, i):
        out[j] = 1
    return out


def _coeff(poly, k):
    return poly[k] if 0 <= k < len(poly) else 0


def _check_cap(n, weight):
    if weight > ENUMERATION_MAX_WEIGHT or n > ENUMERATION_MAX_N:
        raise CapExceeded(
            f"enumeration capped at weight {ENUMERATION_MAX_WEIGHT}, n {ENUMERATION_MAX_N}",
            n=n, weight=weight,
        )


def _agree(name, enumerated, generated):
    if enumerated != generated:
        raise Mismatch(f"{name}: enumeration {enumerated} != generating function {generated}")
    return generated


# Counting functions C, B, N

@lru_cache(maxsize=None)
def _c_poly(n, a):
    """Gaussian binomial [n+a-1 choose a]_x = sum_k C_{n,a,k} x^k."""
    poly = [1]
    for i in range(1, a + 1):
        poly = _imul(poly, _one_minus_x_power(n - 1 + i))
    for i in range(1, a + 1):
        poly = _div_one_minus_x_power(poly, i)
    return tuple(poly)


@lru_cache(maxsize=None)
def _b_polys(n):
    """Row b of prod_{i<n} (1 + x^i z) as x-polynomials."""
    rows = [[1]]
    for i in range(n):
        new_rows = [list(r) for r in rows] + [[0]]
        for b, row in enumerate(rows):
            shifted = [0] * i + list(row)
            target = new_rows[b + 1]
            if len(target) < len(shifted):
                target.extend([0] * (len(shifted) - len(target)))
            for j, c in enumerate(shifted):
                target[j] += c
        rows = new_rows
    return tuple(tuple(r) for r in rows)


def _b_poly(n, b):
    rows = _b_polys(n)
    return list(rows[b]) if 0 <= b < len(rows) else [0]


def C_count(n, a, k, method="generating"):
    """
    C_{n,a,k}: multisets of size a from {0..n-1} with sum k.

    Args:
        n, a, k (int): Arguments
        method (str): 'generating', 'enumerate' or 'both'

    Returns:
        int: The count

    Raises:
        CapExceeded: Enumeration requested beyond its cap
    """
    generated = _coeff(_c_poly(n, a), k)
    if method == "generating":
        return generated
    _check_cap(n, a)
    enumerated = sum(1 for t in combinations_with_replacement(range(n), a) if sum(t) == k)
    if method == "enumerate":
        return enumerated
    return _agree(f"C({n},{a},{k})", enumerated, generated)


def B_count(n, b, j, method="generating"):
    """B_{n,b,j}: strictly increasing b-tuples from {0..n-1} with sum j."""
    generated = _coeff(_b_poly(n, b), j)
    if method == "generating":
        return generated
    _check_cap(n, b)
    enumerated = sum(1 for t in combinations(range(n), b) if sum(t) == j)
    if method == "enumerate":
        return enumerated
    return _agree(f"B({n},{b},{j})", enumerated, generated)


@lru_cache(maxsize=None)
def _n_poly(n, a, b):
    return tuple(_imul(list(_c_poly(n, a)), _b_poly(n, b)))


def N_count(n, a, b, k, method="generating"):
    """N_{n,a,b,k} = sum_j C_{n,a,k-j} B_{n,b,j}."""
    generated = _coeff(_n_poly(n, a, b), k)
    if method == "generating":
        return generated
    _check_cap(n, a + b)
    enumerated = 0
    for left in combinations_with_replacement(range(n), a):
        for right in combinations(range(n), b):
            if sum(left) + sum(right) == k:
                enumerated += 1
    if method == "enumerate":
        return enumerated
    return _agree(f"N({n},{a},{b},{k})", enumerated, generated)


def _bracket(n, a):
    if a == 0:
        return [1, -1]
    if a == 1:
        return _one_minus_x_power(n)
    poly = [1]
    for i in range(n, a + n):
        poly = _imul(poly, _one_minus_x_power(i))
    for i in range(2, a + 1):
        poly = _div_one_minus_x_power(poly, i)
    return poly


def alpha(n, a, b, k):
    """
    alpha_{a,b}(k): exponent of (1 - q^k T) in the local factor at infinity.

    Coefficient of x^k z^b in bracket(a) * prod_{i<n} (1 + x^i z); checked
    against N_{n,a,b,k} - N_{n,a,b,k-1}.
    """
    generated = _coeff(_imul(_bracket(n, a), _b_poly(n, b)), k)
    difference = N_count(n, a, b, k) - N_count(n, a, b, k - 1)
    return _agree(f"alpha({n},{a},{b},{k})", difference, generated)


def beta(n, b, k, method="series"):
    """
    Coefficient of x^k z^b in prod_{i<n}(1 + x^i z) / prod_{i=2}^{n-1}(1 - x^i).

    method 'series' multiplies the z^b row by the denominator series;
    'expanded' expands the denominators first and then multiplies in the
    numerator factors one at a time; 'both' cross-checks.
    """
    top = k + 2
    if method in ("series", "both"):
        poly = _b_poly(n, b)
        for i in range(2, n):
            poly = _imul(poly, _geometric(i, top), top)
        series_value = _coeff(poly, k)
        if method == "series":
            return series_value
    table = [[0] * (top + 1) for _ in range(n + 1)]
    den = [1] + [0] * top
    for i in range(n - 1, 1, -1):
        den = _imul(den, _geometric(i, top), top)
    table[0] = den + [0] * (top + 1 - len(den))
    for i in range(n):
        for zdeg in range(n, 0, -1):
            for xdeg in range(top, i - 1, -1):
                table[zdeg][xdeg] += table[zdeg - 1][xdeg - i]
    expanded_value = table[b][k] if 0 <= b <= n and k <= top else 0
    if method == "expanded":
        return expanded_value
    return _agree(f"beta({n},{b},{k})", series_value, expanded_value)


def delta(n, a, b):
    """delta_{a,b} of the invariant-theory case table."""
    if n % 2 == 0:
        return int((a == 0 and b % 2 == 0) or (a == 1 and b % 2 == 1))
    return int((a % 2 == 0 and b == 0) or (a % 2 == 1 and b == 1))


def jordan_blocks(n, a, b):
    """
    Unipotent block sizes of local monodromy on G_{a,b} at a singular fibre, n even.

    Returns:
        dict: block size i -> multiplicity d(i), zero entries omitted
    """
    if n % 2:
        raise ValueError("jordan_blocks is defined for even n")
    out = {}
    for i in range(1, a + 3):
        first = binom(n - 3 + a - i, n - 3) + (binom(n - 1 + a - i, n - 3) if i >= 2 else 0)
        value = first * binom(n - 2, b - 1) + binom(n - 2 + a - i, n - 3) * (
            binom(n - 2, b - 2) + binom(n - 2, b))
        if value:
            out[i] = value
    return out


def D_local(n, a, b):
    """Dimension D_{n,a,b} of the inertia invariants of G_{a,b} at a singular fibre."""
    if b < 0 or b > n or a < 0:
        return 0
    if n % 2 == 0:
        closed = (binom(n - 3 + a, n - 2) + binom(n - 2 + a, n - 2)) * binom(n - 2, b - 1) \
            + binom(n - 2 + a, n - 2) * (binom(n - 2, b - 2) + binom(n - 2, b))
        blocks = sum(jordan_blocks(n, a, b).values())
        return _agree(f"D({n},{a},{b})", blocks, closed)
    even_sum = sum(binom(n - 2 + a - i, n - 2) for i in range(0, a + 1, 2))
    odd_sum = sum(binom(n - 2 + a - i, n - 2) for i in range(1, a + 1, 2))
    return binom(n - 1, b) * even_sum + binom(n - 1, b - 1) * odd_sum


def D_local_printed(n, a, b):
    """The even-n closed form as usually displayed, kept for comparison with D_local."""
    return (binom(n - 3 + a, n - 2) + binom(n - 1 + a, n - 2)) * binom(n - 2, b - 1) \
        + binom(n - 2 + a, n - 2) * (binom(n - 2, b - 2) + binom(n - 2, b))


def rank_G(n, a, b):
    return binom(n + a - 1, a) * binom(n, b)


def middle_index(n, a, b):
    return (a + b) * (n - 1) // 2


def degP(n, a, b):
    """
    Degree of the pure part P_{a,b}.

    n C(n+a-1, a) C(n, b) + 2 delta - N_{n,a,b,c} - (n+1) D_{n,a,b}; zero for b > n.

    Raises:
        NegativeDegree: The formula evaluated below zero
    """
    if b > n or b < 0 or a < 0:
        return 0
    c = middle_index(n, a, b)
    value = n * rank_G(n, a, b) + 2 * delta(n, a, b) - N_count(n, a, b, c) - (n + 1) * D_local(n, a, b)
    if value < 0:
        raise NegativeDegree(f"degP({n},{a},{b}) = {value}", n=n, a=a, b=b)
    return value


# Trivial factors

@dataclass(frozen=True)
class TrivialFactorSpec:
    """prod_i (1 - q^i T)^{e_i}; powers may be half-integers only with e_i = 0."""

    factors: tuple
    base_q: int = 0

    @classmethod
    def from_map(cls, exponents, base_q=0):
        merged = {}
        for power, exp in exponents:
            power = Fraction(power)
            merged[power] = merged.get(power, 0) + exp
        return cls(tuple(sorted((p, e) for p, e in merged.items() if e != 0)), base_q)

    def as_dict(self):
        return dict(self.factors)

    def __mul__(self, other):
        return TrivialFactorSpec.from_map(list(self.factors) + list(other.factors), self.base_q or other.base_q)

    def inverse(self):
        return TrivialFactorSpec(tuple((p, -e) for p, e in self.factors), self.base_q)

    def split(self):
        """(numerator, denominator) with positive exponents."""
        num = TrivialFactorSpec(tuple((p, e) for p, e in self.factors if e > 0), self.base_q)
        den = TrivialFactorSpec(tuple((p, -e) for p, e in self.factors if e < 0), self.base_q)
        return num, den

    def integral_exponents(self):
        out = {}
        for power, exp in self.factors:
            if power.denominator != 1:
                raise HalfIntegerPower(f"q^{power} appears with exponent {exp}")
            out[int(power)] = exp
        return out

    def degree(self):
        return sum(e for _, e in self.factors)

    def series(self, order, q=None):
        return trivial_product_series(self.integral_exponents(), q or self.base_q, order)

    def polys(self, q=None):
        """(numerator Poly, denominator Poly)."""
        q = q or self.base_q
        num, den = Poly.one(), Poly.one()
        for power, exp in self.integral_exponents().items():
            factor = Poly.linear(Fraction(q) ** power) ** abs(exp)
            if exp > 0:
                num = num * factor
            else:
                den = den * factor
        return num, den


def moment_exponents(n, d):
    """(a, b, (-1)^{b-1}(b-1)) over a + b = d, 0 <= b <= n, a >= 0."""
    return [(d - b, b, (b - 1) if b % 2 == 1 else -(b - 1)) for b in range(0, min(n, d) + 1)]


def delta_d(n, d):
    return sum(e * delta(n, a, b) for a, b, e in moment_exponents(n, d))


def _shape_exponents(n, d):
    half = Fraction(d * (n - 1), 2)
    items = [
        (half, (1 + (-1) ** (d + n)) // 2),
        (half + 1, ((-1) ** n + (-1) ** (n + d)) // 2),
    ]
    for k in range((n - 2) // 2 + 1):
        items.append((d * k, 1))
        items.append((d * k + 1, -1))
    return items


def _cohomology_exponents(n, d):
    return [(d * i + 1, (-1) ** (i + 1) * comb(n, i + 1)) for i in range(n)]


def L_Fd_trivial_shape(n, d, q):
    """Unified trivial shape of L(A^1, [F]^d) / P_d."""
    if d < 1:
        raise ValueError("d must be positive")
    spec = TrivialFactorSpec.from_map(_shape_exponents(n, d), q)
    spec.integral_exponents()
    return spec


def L_Fd_case_shape(n, d, q):
    """The same shape, read off case by case from the parities of n and d."""
    half = Fraction(d * (n - 1), 2)
    items = []
    for k in range((n - 2) // 2 + 1):
        items += [(d * k, 1), (d * k + 1, -1)]
    if n % 2 == 0 and d % 2 == 0:
        items += [(half, 1), (half + 1, 1)]
    elif n % 2 == 1 and d % 2 == 0:
        items += [(half + 1, -1)]
    elif n % 2 == 1 and d % 2 == 1:
        items += [(half, 1)]
    return TrivialFactorSpec.from_map(items, q)


def Q_d_trivial_spec(n, d, q):
    """Q_d as one signed exponent map."""
    spec = TrivialFactorSpec.from_map(_shape_exponents(n, d) + _cohomology_exponents(n, d), q)
    spec.integral_exponents()
    return spec


def Q_d_trivial(n, d, q):
    """
    The explicit trivial factor Q_d of Z_d^{(-1)^{n-1}} = P_d Q_d.

    Args:
        n (int): Dimension parameter
        d (int): Moment, d >= 1
        q (int): Field size

    Returns:
        tuple: (numerator, denominator) TrivialFactorSpec pair

    Raises:
        HalfIntegerPower: A half-integer q-power has nonzero exponent
    """
    if d < 1:
        raise ValueError("d must be positive")
    return Q_d_trivial_spec(n, d, q).split()


def infinity_factor_Fd(n, d):
    """
    Local factor at infinity of [F]^d as {k: exponent}.

    The eigenvalue count mu - nu equals 1 at k = 0, d, ..., (n-1)d; the
    exponent of (1 - q^k T) is (mu-nu)(k) - (mu-nu)(k-1) for k <= d(n-1)/2.
    """
    support = {d * i for i in range(n)}
    out = {}
    for k in range(d * (n - 1) // 2 + 1):
        exp = int(k in support) - int((k - 1) in support)
        if exp:
            out[k] = exp
    return out


def infinity_factor_from_alpha(n, d):
    """sum_b e_b alpha_{d-b,b}(k) for k <= d(n-1)/2."""
    out = {}
    for k in range(d * (n - 1) // 2 + 1):
        exp = sum(e * alpha(n, a, b, k) for a, b, e in moment_exponents(n, d) if e)
        if exp:
            out[k] = exp
    return out


def trivial_factor_Fd(n, d, q):
    """
    Trivial factor of Z_d^{(-1)^{n-1}} relative to the pure part, from first principles.

    Product of the constant-sheaf contributions prod_i (1 - q^{di+1} T)^{(-1)^{i+1} C(n,i+1)},
    the local factor at infinity of [F]^d, and the delta_d correction.
    """
    half = Fraction(d * (n - 1), 2)
    dd = delta_d(n, d)
    items = _cohomology_exponents(n, d) + list(infinity_factor_Fd(n, d).items())
    items += [(half, -dd), (half + 1, -dd)]
    spec = TrivialFactorSpec.from_map(items, q)
    spec.integral_exponents()
    return spec


def degP_d(n, d):
    """Predicted (numerator, denominator) degrees of P_d = prod P_{d-b,b}^{e_b}."""
    num = sum(e * degP(n, a, b) for a, b, e in moment_exponents(n, d) if e > 0)
    den = sum(-e * degP(n, a, b) for a, b, e in moment_exponents(n, d) if e < 0)
    return num, den


def moment_terms_budget(n, d, slack=2):
    """Number of series terms needed to reconstruct P_d."""
    num, den = degP_d(n, d)
    return num + den + slack


def estimate_main_term(n, q, d, k):
    """(q^{kd} - 1)^n / q^{k(d-1)} + (1 + (-1)^d)/2 q^{k(d(n-1)/2 + 1)}."""
    main = Fraction((q ** (k * d) - 1) ** n, q ** (k * (d - 1)))
    if d % 2 == 0:
        main += q ** (k * (d * (n - 1) // 2 + 1))
    return main


def estimate_holds(n, q, d, k, count, total_degree):
    """|N_d(k) - main| <= (D + 2) q^{k(d(n-1)+1)/2}, compared after squaring."""
    diff = Fraction(count) - estimate_main_term(n, q, d, k)
    bound_sq = (total_degree + 2) ** 2 * Fraction(q) ** (k * (d * (n - 1) + 1))
    return diff * diff <= bound_sq


def formula_row(n, a, b, alpha_terms=None, beta_terms=None):
    """One row of the formulas table."""
    c = middle_index(n, a, b)
    alpha_terms = alpha_terms if alpha_terms is not None else c + 1
    beta_terms = beta_terms if beta_terms is not None else c + 1
    row = {
        "n": n,
        "a": a,
        "b": b,
        "rank": rank_G(n, a, b),
        "delta": delta(n, a, b),
        "D": D_local(n, a, b),
        "degP": degP(n, a, b),
        "alpha": [alpha(n, a, b, k) for k in range(alpha_terms)],
        "beta": [beta(n, b, k) for k in range(beta_terms)],
    }
    if n % 2 == 0:
        row["jordan_blocks"] = {str(i): v for i, v in jordan_blocks(n, a, b).items()}
    return row
