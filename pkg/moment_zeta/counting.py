"""
Point Counting Module

This module provides point counts on the fibres

    X_lambda : x_1 + ... + x_n + 1/(x_1 ... x_n) = lambda,   x_i != 0,

by exhaustive enumeration and by Gauss sums, the Frobenius trace on the
nontrivial part F of the cohomology, per-fibre characteristic polynomials,
and the moment counts N_d(k) = sum_{lambda in F_{q^k}} #X_lambda(F_{q^{dk}}).
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb
from multiprocessing import Pool

import mpmath
import numpy as np

from arithmetic_core.charsums import FFT_THRESHOLD, dft, fx_mul
from arithmetic_core.errors import (
    CapExceeded,
    HypothesisViolated,
    MethodMismatch,
    Mismatch,
    PrecisionLoss,
    PurityViolation,
    WorkCapExceeded,
)
from arithmetic_core.exactalg import (
    charpoly_from_functional_equation,
    charpoly_power_sum,
    power_sums_to_charpoly,
    reciprocal_root_magnitudes,
)
from arithmetic_core.ffield import (
    add_codes,
    dlog,
    frobenius_orbits,
    minimal_polynomial,
    neg_code,
    pow_code,
    prime_power,
    subfield_codes,
)
from moment_zeta.config import WORK_CAP, RunConfig

logger = logging.getLogger(__name__)

ROUNDING_GUARD = 1e-6
PURITY_TOLERANCE = 1e-6
PURITY_BITS = 96


@dataclass(frozen=True)
class FiberCount:
    lam: object
    field: object
    n: int
    N: int
    method: str


@dataclass(frozen=True)
class FrobeniusData:
    """Frobenius on F at a closed point, as cp = prod(1 - alpha_i T) at level_q."""

    lam: int
    level_q: int
    n: int
    cp: object
    kind: str
    degree: int = 1
    point: tuple = ()


@dataclass(frozen=True)
class MomentSeriesSpec:
    n: int
    q: int
    d: int
    K: int
    method: str
    counts: tuple
    cross_checked: bool = False


# Brute force

@lru_cache(maxsize=8)
def _bruteforce_histogram(ctx, n, work_cap):
    size = ctx.q - 1
    if size ** n > work_cap:
        raise WorkCapExceeded(f"(q-1)^n = {size ** n} exceeds work cap {work_cap}",
                              q=ctx.q, n=n)
    codes = ctx.exp_table.astype(np.int64)
    logs = np.arange(size, dtype=np.int64)
    partial = np.zeros(1, dtype=np.int64)
    log_sum = np.zeros(1, dtype=np.int64)
    for _ in range(n - 1):
        partial = add_codes(ctx, partial[:, None], codes[None, :]).ravel()
        log_sum = ((log_sum[:, None] + logs[None, :]) % size).ravel()
    hist = np.zeros(ctx.q, dtype=np.int64)
    for i in range(size):
        total = add_codes(ctx, partial, codes[i])
        inverse = codes[(-(log_sum + i)) % size]
        hist += np.bincount(add_codes(ctx, total, inverse), minlength=ctx.q)
    return hist


def bruteforce_all_fibers(ctx, n, work_cap=WORK_CAP):
    """Exhaustive #X_lambda(F_q) for every lambda, indexed by element code."""
    return _bruteforce_histogram(ctx, n, work_cap).copy()


def count_bruteforce(ctx, n, lam, work_cap=WORK_CAP):
    """
    Count X_lambda(F_q) by enumerating (F_q^*)^n.

    Args:
        ctx (FieldCtx): Field with tables
        n (int): Number of variables
        lam (FFElem or int): Parameter

    Returns:
        FiberCount: Exact count

    Raises:
        WorkCapExceeded: (q-1)^n above work_cap
    """
    code = ctx.code(lam)
    hist = _bruteforce_histogram(ctx, n, work_cap)
    return FiberCount(ctx.elem(code), ctx, n, int(hist[code]), "brute")


# Gauss-sum counts

def _round_count(value, what):
    nearest = int(mpmath.nint(value.real))
    if abs(value - nearest) >= ROUNDING_GUARD:
        raise PrecisionLoss(f"{what}: {mpmath.nstr(value, 12)} is not near an integer")
    return nearest


def count_gauss(ctx, gt, n, lam, cross_check=False):
    """
    N_q(lambda) for lambda != 0 from the Gauss-sum double sum.

    ((q-1)^n - (-1)^n)/q + (-1)^n/(q-1)
      + (-1)^n/(q(q-1)) * sum_{(n+1)a + b = 0, (a,b) != (0,0)} G(a)^{n+1} G(b) omega(-lambda)^b

    Args:
        ctx (FieldCtx): Field
        gt (GaussTable): Gauss sums of ctx
        n (int): Number of variables
        lam (FFElem or int): Nonzero parameter
        cross_check (bool): Compare against the all-fibre transform

    Returns:
        FiberCount: Rounded count

    Raises:
        PrecisionLoss: The sum is not within the rounding guard of an integer
    """
    code = ctx.code(lam)
    if code == 0:
        raise ValueError("count_gauss needs lambda != 0; use count_gauss_zero")
    q, size = ctx.q, ctx.q - 1
    sign = (-1) ** n
    with mpmath.workprec(gt.bits):
        total = mpmath.mpc(0)
        if size > 1:
            zeta = mpmath.expjpi(mpmath.mpf(2) / size)
            omega = dlog(ctx, neg_code(ctx, code))
            for a in range(1, size):
                b = (-(n + 1) * a) % size
                total += gt.value(a) ** (n + 1) * gt.value(b) * zeta ** ((omega * b) % size)
        value = (mpmath.mpf((q - 1) ** n - sign) / q + mpmath.mpf(sign) / (q - 1)
                 + sign * total / (q * (q - 1)))
        N = _round_count(value, f"N_{q}(lambda={code})")
    if cross_check:
        other = int(count_all_fibers(ctx, gt, n)[code])
        if other != N:
            raise Mismatch(f"double sum {N} != transform {other} at lambda={code}")
    return FiberCount(ctx.elem(code), ctx, n, N, "gauss")


def zero_fiber_modulus(p, n):
    """m with n + 1 = p^a m and p not dividing m."""
    m = n + 1
    while m % p == 0:
        m //= p
    return m


def count_gauss_zero(ctx, gt, n):
    """
    N_q(0) = ((q-1)^n - (-1)^n)/q + ((-1)^{n+1}/q) sum_{m k = 0, 1 <= k <= q-2} G(k)^{n+1}.
    """
    q, size = ctx.q, ctx.q - 1
    m = zero_fiber_modulus(ctx.p, n)
    with mpmath.workprec(gt.bits):
        total = mpmath.mpc(0)
        for k in range(1, size):
            if (m * k) % size == 0:
                total += gt.value(k) ** (n + 1)
        value = mpmath.mpf((q - 1) ** n - (-1) ** n) / q + (-1) ** (n + 1) * total / q
        N = _round_count(value, f"N_{q}(0)")
    return FiberCount(ctx.elem(0), ctx, n, N, "gauss")


def count_all_fibers(ctx, gt, n, fft_threshold=FFT_THRESHOLD):
    """
    N_q(lambda) for every lambda at once.

    With H[b] = G(b) sum_{a != 0, -(n+1)a = b} G(a)^{n+1} and -lambda = g^j,
    S(j) = sum_b H[b] zeta_{q-1}^{jb} is one Fourier transform, and
    q(q-1) N = ((q-1)^n - (-1)^n)(q-1) + (-1)^n q + (-1)^n S(j).

    Returns:
        np.ndarray: Object array of counts indexed by element code
    """
    q, size = ctx.q, ctx.q - 1
    scale = gt.scale_bits
    sign = (-1) ** n
    counts = np.zeros(q, dtype=object)
    counts[0] = count_gauss_zero(ctx, gt, n).N
    if size == 1:
        s_int = np.zeros(1, dtype=object)
    else:
        pw_re, pw_im = gt.re.copy(), gt.im.copy()
        for _ in range(n):
            pw_re, pw_im = fx_mul(pw_re, pw_im, gt.re, gt.im, scale)
        h_re = np.zeros(size, dtype=object)
        h_im = np.zeros(size, dtype=object)
        for a in range(1, size):
            b = (-(n + 1) * a) % size
            h_re[b] += pw_re[a]
            h_im[b] += pw_im[a]
        h_re, h_im = fx_mul(h_re, h_im, gt.re, gt.im, scale)
        s_re, s_im, method = dft(h_re, h_im, 1, scale, fft_threshold, orbit_step=ctx.p % size)
        s_int = (s_re + (1 << (scale - 1))) >> scale
        tol = (1 << scale) >> 20
        residual = np.abs(s_re - (s_int << scale))
        if np.any(residual > tol) or np.any(np.abs(s_im) > tol):
            raise PrecisionLoss(f"all-fibre transform over F_{q} lost precision", q=q)
        logger.debug("all-fibre counts over F_%d via %s transform", q, method)
    base = ((q - 1) ** n - sign) * (q - 1) + sign * q
    lam_codes = neg_code(ctx, ctx.exp_table.astype(np.int64))
    for j in range(size):
        numer = base + sign * int(s_int[j])
        value, rem = divmod(numer, q * (q - 1))
        if rem:
            raise PrecisionLoss(f"count numerator {numer} not divisible by q(q-1)", q=q)
        counts[int(lam_codes[j])] = value
    return counts


def bad_parameters(ctx, n):
    """Codes of lambda with lambda^{n+1} = (n+1)^{n+1}."""
    target = pow_code(ctx, (n + 1) % ctx.p, n + 1)
    if target == 0:
        return [0]
    size = ctx.q - 1
    t_log = int(ctx.log_table[target])
    logs = np.arange(size, dtype=np.int64)
    hits = logs[((n + 1) * logs - t_log) % size == 0]
    return sorted(int(c) for c in ctx.exp_table[hits])


def fiber_kind(ctx, n, lam):
    code = ctx.code(lam)
    target = pow_code(ctx, (n + 1) % ctx.p, n + 1)
    if target == 0:
        return "zero_fiber_wild" if code == 0 else "good"
    return "bad" if pow_code(ctx, code, n + 1) == target else "good"


# Traces and characteristic polynomials

def S_triv(n, Q):
    """sum_{j=n}^{2n-2} (-1)^j C(n, j-n+2) Q^{j-n+1}: the constant part of a fibre count."""
    return sum((-1) ** j * comb(n, j - n + 2) * Q ** (j - n + 1) for j in range(n, 2 * n - 1))


def frob_trace(n, q_level, N):
    """Frobenius trace on F from a fibre count: (-1)^{n-1}(N - S_triv) - n."""
    return (-1) ** (n - 1) * (N - S_triv(n, q_level)) - n


def count_from_trace(n, Q, trace):
    return S_triv(n, Q) + (-1) ** (n - 1) * (n + trace)


def det_value(ctx, n, lam, Q):
    """Frobenius determinant on F at level Q; lam lies in F_Q inside ctx."""
    value = Q ** (n * (n - 1) // 2)
    if n % 2 == 1 and (n + 1) % ctx.p != 0:
        u = add_codes(ctx, pow_code(ctx, ctx.code(lam), n + 1),
                      neg_code(ctx, pow_code(ctx, (n + 1) % ctx.p, n + 1)))
        value *= 1 if pow_code(ctx, u, (Q - 1) // 2) == 1 else -1
    return value


def _check_purity(cp, n, Q, kind):
    if cp.degree < 1:
        return
    with mpmath.workprec(PURITY_BITS):
        mags = reciprocal_root_magnitudes(cp, PURITY_BITS)
        pure = mpmath.mpf(Q) ** (mpmath.mpf(n - 1) / 2)
        low = mpmath.mpf(Q) ** (mpmath.mpf(n - 2) / 2)
        off = [m for m in mags if abs(m / pure - 1) > PURITY_TOLERANCE]
        if kind == "bad" and n % 2 == 0:
            if len(off) == 1 and abs(off[0] / low - 1) <= PURITY_TOLERANCE:
                return
        elif not off:
            return
    raise PurityViolation(
        f"{kind} fibre at level {Q}: magnitudes {[mpmath.nstr(m, 10) for m in mags]}",
        n=n, level=Q,
    )


def levels_needed(n, kind):
    return n // 2 if kind == "good" else n - 1


def fiber_charpoly(ctx, n, lam, counts_at_levels, level_q=None, check_purity=True):
    """
    Characteristic polynomial of Frobenius on F at lambda.

    Good fibres use the determinant and self-duality, so floor(n/2) counts
    suffice; bad fibres carry rank n - 1 and need n - 1 counts. Extra counts
    are checked against the polynomial.

    Args:
        ctx (FieldCtx): Field containing lambda
        n (int): Number of variables
        lam (FFElem or int): Parameter in F_{level_q}
        counts_at_levels (list): #X_lambda(F_{Q^j}) for j = 1..J
        level_q (int, optional): Q, defaults to ctx.q

    Returns:
        FrobeniusData: The data

    Raises:
        PurityViolation: A root off the expected circle
        Mismatch: An extra count disagrees with the polynomial
        HypothesisViolated: lambda = 0 with p | n+1
    """
    Q = level_q or ctx.q
    code = ctx.code(lam)
    kind = fiber_kind(ctx, n, code)
    if kind == "zero_fiber_wild":
        raise HypothesisViolated("the zero fibre is wildly ramified when p | n+1")
    need = levels_needed(n, kind)
    if len(counts_at_levels) < need:
        raise ValueError(f"{kind} fibre needs {need} levels, got {len(counts_at_levels)}")
    traces = [frob_trace(n, Q ** j, N) for j, N in enumerate(counts_at_levels, 1)]
    if kind == "good":
        det = det_value(ctx, n, code, Q)
        cp = charpoly_from_functional_equation(traces[:need], n, det, Q, n - 1)
        if len(traces) >= n - 1 > need:
            newton = power_sums_to_charpoly(traces[:n - 1], n, det)
            if newton != cp:
                raise Mismatch(f"self-dual charpoly {cp.coeffs} disagrees with {newton.coeffs} "
                               f"from {n - 1} power sums", lam=code, level=Q)
    else:
        cp = power_sums_to_charpoly(traces[:need], n - 1)
    for j in range(need + 1, len(traces) + 1):
        if charpoly_power_sum(cp, j) != traces[j - 1]:
            raise Mismatch(f"level {j} trace {traces[j - 1]} disagrees with the charpoly",
                           lam=code, level=Q)
    if check_purity:
        _check_purity(cp, n, Q, kind)
    return FrobeniusData(code, Q, n, cp, kind)


# Closed points and moment counts

def _closed_points_of_degree(task):
    n, q, j, config_dict = task
    config = RunConfig(**config_dict)
    p, m = prime_power(q)
    ctx = config.field(p, m * j)
    counts = count_all_fibers(ctx, config.gauss_table(ctx), n, config.fft_threshold)
    reps = [int(c) for c in frobenius_orbits(ctx, m).get(j, [])]
    kinds = {c: fiber_kind(ctx, n, c) for c in reps}
    if "zero_fiber_wild" in kinds.values():
        raise HypothesisViolated("charpoly counting needs p not dividing n+1", p=p, n=n)
    levels = {c: [int(counts[c])] for c in reps}
    top = max((levels_needed(n, k) for k in kinds.values()), default=1)
    names = {}
    if top > 1:
        names = {c: minimal_polynomial(ctx, c) for c in reps if levels_needed(n, kinds[c]) > 1}
    for i in range(2, top + 1):
        wanted = {names[c] for c in names if levels_needed(n, kinds[c]) >= i}
        big = config.field(p, m * j * i)
        big_counts = count_all_fibers(big, config.gauss_table(big), n, config.fft_threshold)
        located = {}
        for rep in frobenius_orbits(big, m).get(j, []):
            name = minimal_polynomial(big, int(rep))
            if name in wanted and name not in located:
                located[name] = int(rep)
        for c, name in names.items():
            if levels_needed(n, kinds[c]) >= i:
                levels[c].append(int(big_counts[located[name]]))
    out = []
    for c in reps:
        fd = fiber_charpoly(ctx, n, c, levels[c], level_q=q ** j)
        out.append(FrobeniusData(fd.lam, fd.level_q, n, fd.cp, fd.kind, j, names.get(c, ())))
    logger.info("Frobenius data for %d closed points of degree %d over F_%d", len(out), j, q)
    return j, out


def _run_tasks(func, tasks, workers):
    if workers > 1 and len(tasks) > 1:
        with Pool(processes=workers) as pool:
            return pool.map(func, tasks)
    return [func(t) for t in tasks]


def collect_frobenius_data(n, q, K, config=None):
    """
    Frobenius data of every closed point of the affine line of degree <= K.

    Returns:
        dict: degree j -> list of FrobeniusData
    """
    config = config or RunConfig()
    p, _ = prime_power(q)
    if (n + 1) % p == 0:
        raise HypothesisViolated(f"p={p} divides n+1={n + 1}")
    tasks = [(n, q, j, config.to_dict()) for j in range(1, K + 1)]
    return dict(_run_tasks(_closed_points_of_degree, tasks, config.workers))


def moment_count_from_frobenius(n, q, d, k, frobenius):
    """N_d(k) = sum_{j | k} sum_{deg x = j} j [S_triv(q^{dk}) + (-1)^{n-1}(n + p_{dk/j}(cp_x))]."""
    Q = q ** (d * k)
    total = Fraction(0)
    for j in range(1, k + 1):
        if k % j:
            continue
        for fd in frobenius.get(j, []):
            total += j * (S_triv(n, Q) + (-1) ** (n - 1) * (n + charpoly_power_sum(fd.cp, d * k // j)))
    if total.denominator != 1:
        raise ArithmeticError(f"non-integral moment count {total}")
    return int(total)


def _direct_moment_count(task):
    n, q, d, k, config_dict = task
    config = RunConfig(**config_dict)
    p, m = prime_power(q)
    ctx = config.field(p, m * d * k)
    counts = count_all_fibers(ctx, config.gauss_table(ctx), n, config.fft_threshold)
    return int(sum(counts[c] for c in subfield_codes(ctx, m * k)))


def moment_counts(n, q, d, K, method="charpoly", config=None, frobenius=None, cross_check=False):
    """
    Moment counts N_d(1..K).

    Args:
        n, q, d, K (int): Family, base field, moment and number of terms
        method (str): 'direct' (count over F_{q^{dk}}) or 'charpoly' (closed points)
        config (RunConfig): Caps, precision, workers
        frobenius (dict, optional): Precomputed collect_frobenius_data(n, q, K)
        cross_check (bool): Recount with the direct method wherever within caps

    Returns:
        MomentSeriesSpec: The counts

    Raises:
        CapExceeded: A needed field is beyond the cap
        MethodMismatch: The two methods disagree
    """
    config = config or RunConfig()
    if method not in ("direct", "charpoly"):
        raise ValueError(f"unknown method {method!r}")
    if method == "direct":
        for k in range(1, K + 1):
            if q ** (d * k) > config.field_cap:
                raise CapExceeded(f"F_{q}^{d * k} exceeds field cap", q=q, level=d * k)
        tasks = [(n, q, d, k, config.to_dict()) for k in range(1, K + 1)]
        counts = _run_tasks(_direct_moment_count, tasks, config.workers)
        return MomentSeriesSpec(n, q, d, K, method, tuple(counts))
    if frobenius is None:
        frobenius = collect_frobenius_data(n, q, K, config)
    counts = [moment_count_from_frobenius(n, q, d, k, frobenius) for k in range(1, K + 1)]
    checked = False
    if cross_check:
        for k in range(1, K + 1):
            if q ** (d * k) > config.field_cap:
                break
            direct = _direct_moment_count((n, q, d, k, config.to_dict()))
            if direct != counts[k - 1]:
                raise MethodMismatch(
                    f"N_{d}({k}): charpoly {counts[k - 1]} != direct {direct}",
                    n=n, q=q, d=d, k=k,
                )
            checked = True
    return MomentSeriesSpec(n, q, d, K, method, tuple(counts), checked)


def trace_sum(n, q, k, config=None):
    """sum_{lambda in F_{q^k}} of the Frobenius trace on F."""
    config = config or RunConfig()
    p, m = prime_power(q)
    ctx = config.field(p, m * k)
    counts = count_all_fibers(ctx, config.gauss_table(ctx), n, config.fft_threshold)
    return sum(frob_trace(n, ctx.q, int(N)) for N in counts)
