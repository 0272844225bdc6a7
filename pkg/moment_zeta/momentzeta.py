"""
Moment Zeta Pipeline

This module provides the end-to-end computation of the moment zeta functions
Z_d(A^1, X_lambda): counts, the exact series, removal of the trivial factor,
reconstruction of the pure part P_d and its certificates (degree, purity,
functional equation, the point-count estimate and p-adic congruences).

It also provides the empirical L-functions of G_{a,b} = Sym^a F (x) wedge^b F
over U = A^1 minus the singular fibres, and the shape check
L(U, F) = (1 - T) P(T)^{n+1}.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

import mpmath

from arithmetic_core.errors import (
    CongruenceFailure,
    HypothesisViolated,
    Mismatch,
    NotAPerfectPower,
    PurityViolation,
    UsageError,
)
from arithmetic_core.exactalg import (
    PADE_SLACK,
    Poly,
    RationalFunctionRF,
    ZetaSeries,
    charpoly_power_sums,
    complete_from_power_sums,
    elementary_from_power_sums,
    functional_equation_check,
    pade_reconstruct,
    poly_gcd,
    poly_series,
    power_sums_to_charpoly,
    reciprocal_root_magnitudes,
    series_exp_from_counts,
    series_inv,
    series_mul,
    series_power,
)
from arithmetic_core.ffield import prime_power
from moment_zeta.config import RunConfig
from moment_zeta.counting import (
    bad_parameters,
    collect_frobenius_data,
    count_all_fibers,
    fiber_charpoly,
    frob_trace,
    moment_counts,
)
from moment_zeta.formulas import (
    D_local,
    Q_d_trivial,
    TrivialFactorSpec,
    alpha,
    degP,
    degP_d,
    delta,
    estimate_holds,
    middle_index,
    moment_exponents,
    rank_G,
    trivial_factor_Fd,
)

logger = logging.getLogger(__name__)

PURITY_TOLERANCE = 1e-6
PURITY_BITS = 128
RECONSTRUCTION_SLACK = 2


@dataclass
class MomentReport:
    n: int
    q: int
    d: int
    K: int
    method: str
    counts: tuple
    Zd: ZetaSeries
    Qd: tuple
    Pd: RationalFunctionRF
    Pd_literal: RationalFunctionRF
    trivial: TrivialFactorSpec
    bad_correction: tuple
    purity: list = field(default_factory=list)
    fe_signs: dict = field(default_factory=dict)
    degree_check: dict = field(default_factory=dict)
    estimate: list = field(default_factory=list)
    congruence_partners: list = field(default_factory=list)
    cross_checked: bool = False


@dataclass
class GabReport:
    n: int
    q: int
    a: int
    b: int
    mode: str
    K: int
    series: ZetaSeries
    L: RationalFunctionRF
    total_degree: int
    predicted_total_degree: int
    alpha: list
    delta: int
    D: int
    bad_factor: Poly
    residual: RationalFunctionRF
    degP: int
    alpha_agreement: bool
    exponents: dict = field(default_factory=dict)
    purity: list = field(default_factory=list)
    fe_sign: int = 1


@dataclass
class Prop31Report:
    n: int
    q: int
    K: int
    L: ZetaSeries
    P: Poly
    P_bad: Poly
    magnitudes: list = field(default_factory=list)
    L_poly: Poly = None
    reconstructed: bool = False


# Polynomial helpers

def substitute_power(poly, j):
    """poly(T^j)."""
    if j == 1:
        return poly
    coeffs = [Fraction(0)] * (j * (len(poly.coeffs) - 1) + 1)
    for i, c in enumerate(poly.coeffs):
        coeffs[i * j] = c
    return Poly(tuple(coeffs))


def adams_charpoly(cp, d):
    """prod(1 - alpha_i^d T) for cp = prod(1 - alpha_i T)."""
    r = cp.degree
    if r <= 0:
        return Poly.one()
    ps = charpoly_power_sums(cp, d * r)
    return power_sums_to_charpoly([ps[d * k - 1] for k in range(1, r + 1)], r)


def _reduced(num, den, verified_to):
    common = poly_gcd(num, den)
    if common.degree > 0:
        num, den = num.exact_div(common), den.exact_div(common)
    scale = 1 / den.coeffs[0]
    return RationalFunctionRF(num * scale, den * scale, verified_to)


def _product(polys):
    out = Poly.one()
    for poly in polys:
        out = out * poly
    return out


# Local model at the singular fibres

def split_bad_charpoly(n, cp_bad, Q):
    """
    Separate the ramified part of F^I at a singular fibre.

    Returns:
        tuple: (cp0, special) where cp0 is the charpoly of the unramified
        complement V0 and special is u = +-Q^{(n-2)/2} (n even) or the
        square of the quadratic-character eigenvalue (n odd)
    """
    if n % 2 == 0:
        found = []
        for sign in (1, -1):
            u = sign * Q ** ((n - 2) // 2)
            if cp_bad(Fraction(1, u)) == 0:
                found.append(u)
        if len(found) != 1:
            raise PurityViolation(f"no unique weight-drop eigenvalue in {cp_bad.coeffs}", level=Q)
        u = found[0]
        return cp_bad.exact_div(Poly.linear(u)), u
    top = n - 1
    e_top = cp_bad.coeffs[top] if top % 2 == 0 else -cp_bad.coeffs[top]
    return cp_bad, Fraction(Q ** (n * (n - 1))) / (e_top * e_top)


def bad_local_pieces(n, a, b, cp_bad, Q):
    """(scale, r, s): pieces scale * Sym^r V0 (x) wedge^s V0 of the invariants of G_{a,b}."""
    cp0, special = split_bad_charpoly(n, cp_bad, Q)
    pieces = []
    if n % 2 == 0:
        u = special
        for i in range(a + 1):
            r = a - i
            pieces.append((Fraction(u) ** i, r, b))
            if i == 0:
                pieces.append((Fraction(u), r, b - 1))
            else:
                pieces.append((Fraction(u) ** (i + 1), r, b - 1))
                pieces.append((Fraction(u) ** (i + 1) * Q, r, b - 1))
            pieces.append((Fraction(u) ** (i + 2) * Q, r, b - 2))
    else:
        beta_sq = special
        for i in range(a + 1):
            r = a - i
            if i % 2 == 0:
                pieces.append((beta_sq ** (i // 2), r, b))
            else:
                pieces.append((beta_sq ** ((i + 1) // 2), r, b - 1))
    return cp0, [(c, r, s) for c, r, s in pieces if s >= 0]


def _piece_charpoly(cp0, scale, r, s):
    rank0 = cp0.degree
    dim = (1 if r == 0 else comb(rank0 + r - 1, r)) * (comb(rank0, s) if s <= rank0 else 0)
    if dim == 0:
        return Poly.one()
    top = max(r, s, 1)
    ps_all = charpoly_power_sums(cp0, top * dim) if rank0 > 0 else [Fraction(0)] * (top * dim)
    power_sums = []
    for k in range(1, dim + 1):
        pk = [ps_all[i * k - 1] for i in range(1, top + 1)]
        h = complete_from_power_sums(pk, r)[r]
        e = elementary_from_power_sums(pk, s)[s]
        power_sums.append(Fraction(scale) ** k * h * e)
    return power_sums_to_charpoly(power_sums, dim)


def bad_local_factor(n, a, b, cp_bad, Q):
    """
    det(1 - Frob S | G_{a,b}^I) at a singular fibre of level Q.

    Args:
        n (int): Number of variables
        a, b (int): Sym and wedge degrees
        cp_bad (Poly): Charpoly of Frobenius on F^I (degree n-1)
        Q (int): Level of the fibre

    Returns:
        Poly: Degree D_local(n, a, b)

    Raises:
        Mismatch: Degree disagrees with D_local
    """
    cp0, pieces = bad_local_pieces(n, a, b, cp_bad, Q)
    out = _product(_piece_charpoly(cp0, c, r, s) for c, r, s in pieces)
    expected = D_local(n, a, b)
    if out.degree != expected:
        raise Mismatch(f"local factor of G_({a},{b}) has degree {out.degree}, expected {expected}")
    return out


def bad_fiber_correction(n, d, bad_points):
    """
    Ratio between the count-defined Z_d and the product of L(A^1, j_* G_{d-b,b})^{e_b}.

    prod_t prod_b Q_{d-b,b,t}(T^deg)^{e_b} / prod_beta (1 - beta^d T^deg).

    Returns:
        tuple: (numerator Poly, denominator Poly), reduced
    """
    num, den = Poly.one(), Poly.one()
    for fd in bad_points:
        j, Q = fd.degree, fd.level_q
        for a, b, e in moment_exponents(n, d):
            if e == 0:
                continue
            factor = substitute_power(bad_local_factor(n, a, b, fd.cp, Q), j)
            if e > 0:
                num = num * factor ** e
            else:
                den = den * factor ** (-e)
        den = den * substitute_power(adams_charpoly(fd.cp, d), j)
    reduced = _reduced(num, den, 0)
    return reduced.num, reduced.den


def bad_degree(n, q):
    """Degree of the field generated by the singular parameters (n+1) zeta."""
    modulus = n + 1
    f, power = 1, q % modulus
    while power != 1 % modulus:
        power = (power * q) % modulus
        f += 1
    return f


# Certificates

def _purity(poly, weight, q, label):
    if poly.degree < 1:
        return []
    out = []
    with mpmath.workprec(PURITY_BITS):
        expected = mpmath.mpf(q) ** (mpmath.mpf(weight) / 2)
        for mag in reciprocal_root_magnitudes(poly, PURITY_BITS):
            err = abs(mag / expected - 1)
            out.append({
                "part": label,
                "magnitude": mpmath.nstr(mag, 20),
                "expected": mpmath.nstr(expected, 20),
                "relative_error": mpmath.nstr(err, 5),
            })
            if err > PURITY_TOLERANCE:
                raise PurityViolation(
                    f"{label} root magnitude {mpmath.nstr(mag, 15)} != q^({weight}/2)",
                    weight=weight, q=q,
                )
    return out


def _signed(spec_pair, q):
    num_spec, den_spec = spec_pair
    return num_spec.polys(q)[0], den_spec.polys(q)[0]


def run_moment(n, q, d, K=None, method="charpoly", config=None, congruence=None,
               cross_check=False, frobenius=None):
    """
    Moment zeta function Z_d, its trivial factor and pure part.

    Args:
        n, q, d (int): Family, base field and moment
        K (int, optional): Number of terms, defaults to the reconstruction budget
        method (str): 'charpoly' or 'direct'
        config (RunConfig): Caps, precision, workers, force
        congruence (tuple, optional): (d2, m) congruence partner
        cross_check (bool): Recount with the direct method within caps
        frobenius (dict, optional): Precomputed closed-point data

    Returns:
        MomentReport: Series, factors and certificates

    Raises:
        HypothesisViolated: p divides n + 1
        UsageError: K below the budget without force
        Mismatch: Series identity or degree check failed
        PurityViolation: A root of P_d off the Weil circle
    """
    config = config or RunConfig()
    p, _ = prime_power(q)
    if (n + 1) % p == 0:
        raise HypothesisViolated(f"p={p} divides n+1={n + 1}")
    predicted = degP_d(n, d)
    budget = sum(predicted) + RECONSTRUCTION_SLACK
    K = K or budget
    if K < budget and not config.force:
        raise UsageError(f"K={K} below the reconstruction budget {budget}; use force to override")
    top = max(K, bad_degree(n, q)) if method == "charpoly" else bad_degree(n, q)
    if frobenius is None or max(frobenius, default=0) < top:
        frobenius = collect_frobenius_data(n, q, top, config)
    spec = moment_counts(n, q, d, K, method, config,
                         frobenius=frobenius if method == "charpoly" else None,
                         cross_check=cross_check)
    Zd = series_exp_from_counts(list(spec.counts), q)
    if not Zd.is_integral():
        raise Mismatch(f"Z_{d} has non-integral coefficients", n=n, q=q, d=d)
    zs = list(Zd.coeffs) if n % 2 == 1 else series_inv(Zd.coeffs, K)

    trivial = trivial_factor_Fd(n, d, q)
    bad_points = [fd for level in frobenius.values() for fd in level if fd.kind == "bad"]
    b_num, b_den = bad_fiber_correction(n, d, bad_points)
    t_num, t_den = trivial.polys(q)
    series = series_mul(zs, poly_series(t_den * b_den, K), K)
    series = series_mul(series, series_inv((t_num * b_num).coeffs, K), K)
    Pd = pade_reconstruct(ZetaSeries(K, tuple(series), q), *predicted)

    Qd = Q_d_trivial(n, d, q)
    q_num, q_den = _signed(Qd, q)
    literal = _reduced(Pd.num * b_num * t_num * q_den, Pd.den * b_den * t_den * q_num, K)
    check = series_mul(literal.series(K), series_from_spec_pair(Qd, q, K), K)
    if [Fraction(c) for c in check] != [Fraction(c) for c in zs]:
        raise Mismatch(f"Z_{d}^(+-1) != P_d Q_d to order {K}", n=n, q=q, d=d)

    weight = d * (n - 1) + 1
    purity = _purity(Pd.num, weight, q, "numerator") + _purity(Pd.den, weight, q, "denominator")
    fe_signs = {
        "numerator": functional_equation_check(Pd.num, weight, q),
        "denominator": functional_equation_check(Pd.den, weight, q),
    }
    observed = (Pd.num.degree, Pd.den.degree)
    degree_check = {
        "predicted": list(predicted),
        "observed": list(observed),
        "consistent": observed == tuple(predicted),
    }
    if not degree_check["consistent"]:
        raise Mismatch(f"P_{d} numerator/denominator degrees {observed} != predicted {tuple(predicted)}",
                       n=n, q=q, d=d)
    total = literal.num.degree + literal.den.degree
    estimate = [{"k": k, "count": str(N), "holds": estimate_holds(n, q, d, k, N, total)}
             for k, N in enumerate(spec.counts, 1)]
    report = MomentReport(n, q, d, K, method, spec.counts, Zd, Qd, Pd, literal, trivial,
                          (b_num, b_den), purity, fe_signs, degree_check, estimate,
                          cross_checked=spec.cross_checked)
    if congruence:
        d2, m = congruence
        verified = congruence_check(n, q, d, d2, m, K, config, frobenius)
        report.congruence_partners.append({"d": d2, "modulus": p ** (m + 1), "verified": verified})
    logger.info("moment zeta n=%d q=%d d=%d: P_d degrees %s", n, q, d, observed)
    return report


def series_from_spec_pair(spec_pair, q, order):
    num_spec, den_spec = spec_pair
    return series_mul(num_spec.series(order, q), series_inv(den_spec.series(order, q), order), order)


def congruence_check(n, q, d1, d2, m, K, config=None, frobenius=None):
    """
    Coefficientwise Z_{d1} = Z_{d2} mod p^{m+1} up to T^K.

    Requires n m + 1 <= d1 <= d2 and d1 = d2 mod (p-1) p^m.

    Returns:
        int: Verified prefix length K

    Raises:
        HypothesisViolated: The congruence hypotheses do not hold
        CongruenceFailure: A coefficient differs mod p^{m+1}
    """
    config = config or RunConfig()
    p, _ = prime_power(q)
    d1, d2 = min(d1, d2), max(d1, d2)
    if (d2 - d1) % ((p - 1) * p ** m) or n * m + 1 > d1:
        raise HypothesisViolated(f"d1={d1}, d2={d2}, m={m} outside the congruence hypotheses")
    if frobenius is None or max(frobenius, default=0) < K:
        frobenius = collect_frobenius_data(n, q, K, config)
    series = []
    for d in (d1, d2):
        spec = moment_counts(n, q, d, K, "charpoly", config, frobenius=frobenius)
        series.append(series_exp_from_counts(list(spec.counts), q).coeffs)
    modulus = p ** (m + 1)
    for k, (x, y) in enumerate(zip(*series)):
        diff = x - y
        if diff.denominator != 1 or diff.numerator % modulus:
            raise CongruenceFailure(
                f"Z_{d1} and Z_{d2} differ mod {modulus} at T^{k}", n=n, q=q, k=k)
    return K


# L-functions of G_{a,b} over U

def sym_wedge_trace(cp, a, b, e):
    """Trace of Frob^e on Sym^a (x) wedge^b: h_a(alpha^e) e_b(alpha^e)."""
    top = max(a, b)
    if top == 0:
        return Fraction(1)
    ps = charpoly_power_sums(cp, top * e) if cp.degree > 0 else [Fraction(0)] * (top * e)
    pe = [ps[i * e - 1] for i in range(1, top + 1)]
    return complete_from_power_sums(pe, a)[a] * elementary_from_power_sums(pe, b)[b]


def gab_power_sums(n, a, b, K, frobenius):
    """S_k = sum over good closed points x with deg x | k of deg x * tr(Frob_x^{k/deg x} | G_{a,b})."""
    sums = []
    for k in range(1, K + 1):
        total = Fraction(0)
        for j in range(1, k + 1):
            if k % j:
                continue
            for fd in frobenius.get(j, []):
                if fd.kind == "good":
                    total += j * sym_wedge_trace(fd.cp, a, b, k // j)
        sums.append(total)
    return sums


def gab_trivial_spec(n, a, b, q):
    """prod_{k<=c} (1 - q^k T)^{alpha(k)} / [(1 - q^{c'} T)(1 - q^{c'+1} T)]^{delta}."""
    c = middle_index(n, a, b)
    items = [(k, alpha(n, a, b, k)) for k in range(c + 1)]
    if delta(n, a, b):
        half = Fraction((a + b) * (n - 1), 2)
        items += [(half, -1), (half + 1, -1)]
    spec = TrivialFactorSpec.from_map(items, q)
    spec.integral_exponents()
    return spec


def _exponent_map(rf, q, top):
    out = {}
    for k in range(top + 1):
        root = Fraction(1, q ** k)
        exp = rf.num.root_multiplicity(root) - rf.den.root_multiplicity(root)
        if exp:
            out[k] = exp
    return out


def run_gab(n, q, a, b, mode="divided", K=None, config=None, frobenius=None):
    """
    Empirical L(U, G_{a,b}) against the predicted trivial and local factors.

    mode 'divided' removes the alpha product, the delta factors and the local
    factors at the singular fibres and reconstructs the residual P_{a,b} with
    bounds (degP, 0), then rebuilds L(U, G_{a,b}) from the factors and checks it
    against the count series to order K; mode 'full' also reconstructs
    L(U, G_{a,b}) itself with bounds from the total degree.

    Returns:
        GabReport: Degrees, exponents, residual and certificates

    Raises:
        UsageError: n outside {2, 3} or K below the budget
        HypothesisViolated: p divides n + 1
        Mismatch: The rebuilt L-function disagrees with the counts
    """
    config = config or RunConfig()
    if n not in (2, 3):
        raise UsageError("run_gab supports n = 2 and n = 3")
    if b < 0 or b > n or a < 0:
        raise UsageError(f"(a, b) = ({a}, {b}) out of range")
    if mode not in ("divided", "full"):
        raise UsageError(f"unknown mode {mode!r}")
    p, _ = prime_power(q)
    if (n + 1) % p == 0:
        raise HypothesisViolated(f"p={p} divides n+1={n + 1}")
    deg = degP(n, a, b)
    trivial = gab_trivial_spec(n, a, b, q)
    t_num, t_den = trivial.polys(q)
    f = bad_degree(n, q)
    D = D_local(n, a, b)
    bad_total = D * (n + 1)
    num_bound = deg + bad_total + t_num.degree
    den_bound = t_den.degree
    needed = (num_bound + den_bound if mode == "full" else deg) + RECONSTRUCTION_SLACK
    K = K or needed
    if K < needed and not config.force:
        raise UsageError(f"K={K} below the reconstruction budget {needed}; use force to override")
    if frobenius is None or max(frobenius, default=0) < max(K, f):
        frobenius = collect_frobenius_data(n, q, max(K, f), config)
    series = series_exp_from_counts(gab_power_sums(n, a, b, K, frobenius), q)
    bad_points = [fd for level in frobenius.values() for fd in level if fd.kind == "bad"]
    bad_factor = _product(substitute_power(bad_local_factor(n, a, b, fd.cp, fd.level_q), fd.degree)
                          for fd in bad_points)
    divided = series_mul(list(series.coeffs), poly_series(t_den, K), K)
    divided = series_mul(divided, series_inv((t_num * bad_factor).coeffs, K), K)
    residual = pade_reconstruct(ZetaSeries(K, tuple(divided), q), deg, 0)
    predicted = _reduced(residual.num * bad_factor * t_num, residual.den * t_den, K)
    agreement = residual.den.degree == 0 and residual.num.degree == deg
    if mode == "full":
        L = pade_reconstruct(series, num_bound, den_bound)
        agreement = agreement and L.num * predicted.den == predicted.num * L.den
    else:
        L = predicted
        if [Fraction(c) for c in L.series(K)] != list(series.coeffs):
            raise Mismatch(f"rebuilt L(U, G_({a},{b})) disagrees with the count series to order {K}",
                           n=n, q=q, a=a, b=b)
    weight = (a + b) * (n - 1) + 1
    purity = _purity(residual.num, weight, q, "residual")
    report = GabReport(
        n, q, a, b, mode, K, series, L,
        total_degree=L.total_degree,
        predicted_total_degree=n * rank_G(n, a, b),
        alpha=[alpha(n, a, b, k) for k in range(middle_index(n, a, b) + 1)],
        delta=delta(n, a, b),
        D=D,
        bad_factor=bad_factor,
        residual=residual,
        degP=deg,
        alpha_agreement=bool(agreement),
        exponents=_exponent_map(L, q, middle_index(n, a, b) + 1),
        purity=purity,
        fe_sign=functional_equation_check(residual.num, weight, q),
    )
    logger.info("G_(%d,%d) over U, n=%d q=%d: total degree %d, residual degree %d",
                a, b, n, q, report.total_degree, residual.num.degree)
    return report


def prop31_check(n, q, K=None, config=None):
    """
    L(U, F) = (1 - T) P(T)^{n+1} with deg P = n - 1, when (n+1) | (q-1).

    The series of L(U, F) is taken over levels k = 1..K (K defaults to
    2n - 1). The (n+1)-th root of L(U, F)/(1 - T) is extracted in the
    power-series ring and must terminate at degree n - 1. The polynomial
    (1 - T) P^{n+1} of degree 1 + (n+1)(n-1) is rebuilt and compared with
    every known coefficient; once K covers that degree plus the Pade slack,
    L(U, F) is also reconstructed independently with pade_reconstruct.
    P is compared with the characteristic polynomial of Frobenius on F^I
    at lambda = n + 1.

    Returns:
        Prop31Report: Series, P, L(U, F), bad-fibre charpoly and root magnitudes

    Raises:
        UsageError: n outside {2, 3} or K below n + 1
        HypothesisViolated: (n+1) does not divide q - 1
        NotAPerfectPower: The root does not terminate or has the wrong degree
        Mismatch: The rebuilt L(U, F) or P disagrees with the data
    """
    config = config or RunConfig()
    if n not in (2, 3):
        raise UsageError("prop31_check supports n = 2 and n = 3")
    if (q - 1) % (n + 1):
        raise HypothesisViolated(f"n+1={n + 1} does not divide q-1={q - 1}")
    K = K or 2 * n - 1
    if K < n + 1:
        raise UsageError(f"K={K} leaves no coefficient past degree {n - 1} to check; need K >= {n + 1}")
    p, m = prime_power(q)
    sums, levels = [], []
    for k in range(1, K + 1):
        ctx = config.field(p, m * k)
        counts = count_all_fibers(ctx, config.gauss_table(ctx), n, config.fft_threshold)
        bad = set(bad_parameters(ctx, n))
        sums.append(sum(frob_trace(n, ctx.q, int(N)) for code, N in enumerate(counts) if code not in bad))
        if k <= n - 1:
            levels.append(int(counts[(n + 1) % p]))
    L = series_exp_from_counts(sums, q)
    quotient = series_mul(list(L.coeffs), series_inv([1, -1], K), K)
    root = series_power(quotient, Fraction(1, n + 1), K)
    P = Poly(tuple(root[:n]))
    if any(c != 0 for c in root[n:]) or P.degree != n - 1:
        raise NotAPerfectPower(f"L(U,F)/(1-T) is not an {n + 1}-th power of a degree {n - 1} polynomial",
                               n=n, q=q)
    L_poly = Poly((1, -1)) * P ** (n + 1)
    expected_degree = 1 + (n + 1) * (n - 1)
    if L_poly.degree != expected_degree:
        raise Mismatch(f"L(U,F) has degree {L_poly.degree}, expected {expected_degree}", n=n, q=q)
    if poly_series(L_poly, K) != [Fraction(c) for c in L.coeffs]:
        raise Mismatch(f"(1-T) P^{n + 1} disagrees with L(U,F) to order {K}", n=n, q=q)
    reconstructed = K >= expected_degree + PADE_SLACK
    if reconstructed:
        rf = pade_reconstruct(L, expected_degree, 0)
        if rf.num != L_poly or rf.den.degree != 0:
            raise Mismatch(f"Pade reconstruction of L(U,F) gives {rf.num.coeffs}", n=n, q=q)
    base = config.field(p, m)
    P_bad = fiber_charpoly(base, n, (n + 1) % p, levels, level_q=q).cp
    if P != P_bad:
        raise Mismatch(f"P = {P.coeffs} differs from the singular-fibre charpoly {P_bad.coeffs}")
    with mpmath.workprec(PURITY_BITS):
        magnitudes = [mpmath.nstr(x, 20) for x in reciprocal_root_magnitudes(P, PURITY_BITS)]
    logger.info("L(U,F) for n=%d q=%d: degree %d, P = %s (reconstructed: %s)",
                n, q, L_poly.degree, P.coeffs, reconstructed)
    return Prop31Report(n, q, K, L, P, P_bad, magnitudes, L_poly, reconstructed)
