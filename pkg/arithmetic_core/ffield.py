"""
Finite Field Module

This module provides construction of F_{p^m} with a seeded irreducible
modulus, a generator of the multiplicative group, dense exp/log/trace tables,
and the element operations the counting code needs (traces to the prime
field, discrete logs, subfield enumeration, Frobenius orbits and minimal
polynomials).

Elements are stored as integer codes sum_j c_j p^j of their coordinate vectors
with respect to the power basis of the modulus.
"""

import os
import json
import logging
import random
from dataclasses import dataclass, field
from functools import lru_cache
from math import gcd

import numpy as np

from arithmetic_core.errors import (
    CapExceeded,
    FactoringTooHard,
    NoTable,
    NotADivisor,
    ZeroElement,
)

logger = logging.getLogger(__name__)

FIELD_CAP = 2 ** 24
TABLE_CAP = 2 ** 24
TRIAL_DIVISION_BOUND = 2 ** 16
CACHE_VERSION = 1
_EXP_BLOCK = 4096


# Integer helpers

def is_prime(n):
    """Trial-division primality test."""
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def prime_power(q):
    """
    Split a prime power into (p, m).

    Args:
        q (int): Prime power

    Returns:
        tuple: (p, m) with q = p^m

    Raises:
        ValueError: q is not a prime power
    """
    if q < 2:
        raise ValueError(f"{q} is not a prime power")
    p = next(f for f in range(2, q + 1) if q % f == 0)
    m, rest = 0, q
    while rest % p == 0:
        rest //= p
        m += 1
    if rest != 1:
        raise ValueError(f"{q} is not a prime power")
    return p, m


def factorize(n, bound=TRIAL_DIVISION_BOUND):
    """
    Factor n by trial division up to bound.

    Returns:
        dict: prime -> exponent

    Raises:
        FactoringTooHard: A cofactor beyond bound^2 remains
    """
    factors = {}
    f = 2
    while f * f <= n and f <= bound:
        while n % f == 0:
            factors[f] = factors.get(f, 0) + 1
            n //= f
        f += 1 if f == 2 else 2
    if n > 1:
        if n > bound * bound and not is_prime(n):
            raise FactoringTooHard(f"cofactor {n} beyond trial-division bound {bound}")
        factors[n] = factors.get(n, 0) + 1
    return factors


def euler_phi(n):
    result = n
    for r in factorize(n):
        result = result // r * (r - 1)
    return result


# Polynomials over F_p, lowest degree first

def _ptrim(a):
    while len(a) > 1 and a[-1] == 0:
        a = a[:-1]
    return a


def _pmod(a, f, p):
    a = [x % p for x in a]
    df = len(f) - 1
    inv_lead = pow(f[-1], -1, p)
    for i in range(len(a) - 1, df - 1, -1):
        coef = a[i] * inv_lead % p
        if coef:
            for j in range(df + 1):
                a[i - df + j] = (a[i - df + j] - coef * f[j]) % p
    return _ptrim(a[:df] or [0])


def _pmulmod(a, b, f, p):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _pmod(out, f, p)


def _ppowmod(a, e, f, p):
    result = [1]
    base = _pmod(a, f, p)
    while e:
        if e & 1:
            result = _pmulmod(result, base, f, p)
        base = _pmulmod(base, base, f, p)
        e >>= 1
    return result


def _pgcd(a, b, p):
    a, b = _ptrim([x % p for x in a]), _ptrim([x % p for x in b])
    while b != [0]:
        a, b = b, _pmod(a, b, p)
    return a


def is_irreducible(f, p):
    """Ben-Or test: gcd(X^{p^i} - X, f) = 1 for i <= deg f / 2."""
    m = len(f) - 1
    if m == 1:
        return True
    if f[0] % p == 0:
        return False
    x_power = [0, 1]
    for _ in range(m // 2):
        x_power = _ppowmod(x_power, p, f, p)
        diff = list(x_power) + [0] * max(0, 2 - len(x_power))
        diff[1] = (diff[1] - 1) % p
        if len(_pgcd(f, _ptrim(diff), p)) > 1:
            return False
    return True


def _find_modulus(p, m, seed):
    if m == 1:
        return (0, 1)
    rng = random.Random(f"modulus:{p}:{m}:{seed}")
    while True:
        lower = [rng.randrange(p) for _ in range(m)]
        if lower[0] == 0:
            continue
        candidate = lower + [1]
        if is_irreducible(candidate, p):
            return tuple(candidate)


def _code_to_coeffs(code, p, m):
    out = []
    for _ in range(m):
        code, r = divmod(code, p)
        out.append(r)
    return out


def _coeffs_to_code(coeffs, p):
    code = 0
    for c in reversed(coeffs):
        code = code * p + (c % p)
    return code


def _has_full_order(g, modulus, p, q, prime_factors):
    if q == 2:
        return _ptrim(list(g)) == [1]
    if _ppowmod(list(g), q - 1, list(modulus), p) != [1]:
        return False
    return all(
        _ppowmod(list(g), (q - 1) // r, list(modulus), p) != [1] for r in prime_factors
    )


def _find_generator(p, m, modulus, seed, prime_factors):
    q = p ** m
    first = None
    for code in range(1, q):
        coeffs = _ptrim(_code_to_coeffs(code, p, m))
        if _has_full_order(coeffs, modulus, p, q, prime_factors):
            first = coeffs
            break
    # seed picks the (seed mod phi)-th exponent coprime to q - 1
    target = seed % euler_phi(q - 1)
    j, seen = 0, -1
    while seen < target:
        j += 1
        if gcd(j, q - 1) == 1:
            seen += 1
    g = _ppowmod(first, j, list(modulus), p) if q > 2 else first
    return tuple(g + [0] * (m - len(g)))


# Field context

@dataclass(frozen=True)
class FFElem:
    """Field element as its coordinate vector over F_p."""

    coeffs: tuple


@dataclass(frozen=True, eq=False)
class FieldCtx:
    """A concrete F_{p^m} with generator and (optional) dense tables."""

    p: int
    m: int
    modulus: tuple
    generator: tuple
    seed: int
    prime_factors: tuple
    exp_table: np.ndarray = field(default=None, repr=False)
    log_table: np.ndarray = field(default=None, repr=False)
    trace_table: np.ndarray = field(default=None, repr=False)

    @property
    def q(self):
        return self.p ** self.m

    @property
    def has_tables(self):
        return self.log_table is not None

    def code(self, x):
        if isinstance(x, FFElem):
            return _coeffs_to_code(x.coeffs, self.p)
        return int(x)

    def elem(self, code):
        return FFElem(tuple(_code_to_coeffs(int(code), self.p, self.m)))

    def identity(self):
        """Cache and provenance identity of this field."""
        return {
            "p": self.p,
            "m": self.m,
            "seed": self.seed,
            "modulus": list(self.modulus),
            "generator": list(self.generator),
        }


@dataclass(frozen=True)
class SubfieldHandle:
    parent: FieldCtx
    e: int
    embed_gen: FFElem

    @property
    def size(self):
        return self.parent.p ** self.e

    @property
    def embed_code(self):
        return self.parent.code(self.embed_gen)


def _matrix_power_mod(mat, exponent, p):
    size = mat.shape[0]
    result = np.identity(size, dtype=np.int64)
    base = mat.copy()
    while exponent:
        if exponent & 1:
            result = (result @ base) % p
        base = (base @ base) % p
        exponent >>= 1
    return result


def _multiplication_matrix(elem_coeffs, modulus, p, m):
    mat = np.zeros((m, m), dtype=np.int64)
    for j in range(m):
        basis = [0] * j + [1]
        prod = _pmulmod(list(elem_coeffs), basis, list(modulus), p)
        prod = prod + [0] * (m - len(prod))
        mat[:, j] = prod[:m]
    return mat


def _build_tables(p, m, modulus, generator):
    q = p ** m
    weights = np.array([p ** j for j in range(m)], dtype=np.int64)
    mult_g = _multiplication_matrix(generator, modulus, p, m)
    block = min(_EXP_BLOCK, q - 1)
    vecs = np.zeros((m, block), dtype=np.int64)
    vecs[0, 0] = 1
    for i in range(1, block):
        vecs[:, i] = (mult_g @ vecs[:, i - 1]) % p
    step = _matrix_power_mod(mult_g, block, p)
    exp_table = np.zeros(q - 1, dtype=np.int64)
    for start in range(0, q - 1, block):
        stop = min(start + block, q - 1)
        exp_table[start:stop] = (weights @ vecs)[: stop - start]
        vecs = (step @ vecs) % p
    log_table = np.full(q, -1, dtype=np.int64)
    log_table[exp_table] = np.arange(q - 1, dtype=np.int64)
    if np.count_nonzero(log_table >= 0) != q - 1:
        raise ValueError("generator does not have full order")

    mult_x = _multiplication_matrix((0, 1) if m > 1 else (0,), modulus, p, m)
    power = np.identity(m, dtype=np.int64)
    basis_traces = []
    for _ in range(m):
        basis_traces.append(int(np.trace(power)) % p)
        power = (mult_x @ power) % p
    codes = np.arange(q, dtype=np.int64)
    trace_table = np.zeros(q, dtype=np.int64)
    for j in range(m):
        trace_table += ((codes // p ** j) % p) * basis_traces[j]
    trace_table %= p
    return exp_table, log_table, trace_table


def _cache_path(cache_dir, p, m, seed):
    return os.path.join(cache_dir, f"field_p{p}_m{m}_s{seed}.json")


def save_field_cache(ctx, cache_dir):
    """
    Save the modulus and generator of a field as versioned JSON.

    Args:
        ctx (FieldCtx): Field
        cache_dir (str): Cache directory

    Returns:
        bool: Success status
    """
    try:
        os.makedirs(cache_dir, exist_ok=True)
        data = {
            "version": CACHE_VERSION,
            "p": ctx.p,
            "m": ctx.m,
            "modulus_coeffs": list(ctx.modulus),
            "generator_coeffs": list(ctx.generator),
            "seed": ctx.seed,
        }
        with open(_cache_path(cache_dir, ctx.p, ctx.m, ctx.seed), "w", encoding="utf-8") as f:
            json.dump(data, f, indent=2)
        return True
    except Exception as e:
        logger.warning("Error saving field cache: %s", e)
        return False


def load_field_cache(p, m, seed, cache_dir):
    """
    Load a cached (modulus, generator) pair.

    Returns:
        tuple: (modulus, generator) or None if missing or stale
    """
    path = _cache_path(cache_dir, p, m, seed)
    try:
        if not os.path.exists(path):
            return None
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
        if data.get("version") != CACHE_VERSION or (data["p"], data["m"], data["seed"]) != (p, m, seed):
            logger.warning("Ignoring stale field cache %s", path)
            return None
        return tuple(data["modulus_coeffs"]), tuple(data["generator_coeffs"])
    except Exception as e:
        logger.warning("Error loading field cache %s: %s", path, e)
        return None


def build_field(p, m, seed=0, field_cap=FIELD_CAP, table_cap=TABLE_CAP, cache_dir=None,
                factor_bound=TRIAL_DIVISION_BOUND):
    """
    Build F_{p^m} deterministically from a seed.

    Args:
        p (int): Prime
        m (int): Extension degree
        seed (int): Seed for the modulus search and the generator choice
        field_cap (int): Largest allowed q
        table_cap (int): Largest q for which exp/log/trace tables are built
        cache_dir (str, optional): Field JSON cache directory
        factor_bound (int): Trial-division bound for factoring q - 1

    Returns:
        FieldCtx: The field

    Raises:
        CapExceeded: q beyond field_cap
        FactoringTooHard: q - 1 cannot be factored by trial division
    """
    if not is_prime(p) or m < 1:
        raise ValueError(f"invalid field parameters p={p}, m={m}")
    q = p ** m
    if q > field_cap:
        raise CapExceeded(f"field of size {q} exceeds cap {field_cap}", q=q, cap=field_cap)
    return _build_field_cached(p, m, seed, q <= table_cap, cache_dir, factor_bound)


@lru_cache(maxsize=32)
def _build_field_cached(p, m, seed, with_tables, cache_dir, factor_bound):
    q = p ** m
    prime_factors = tuple(sorted(factorize(q - 1, factor_bound))) if q > 2 else ()
    cached = load_field_cache(p, m, seed, cache_dir) if cache_dir else None
    modulus = generator = None
    if cached:
        modulus, generator = cached
        valid = (len(modulus) == m + 1 and is_irreducible(list(modulus), p)
                 and _has_full_order(_ptrim(list(generator)), modulus, p, q, prime_factors))
        if not valid:
            logger.warning("Field cache for p=%d m=%d seed=%d failed validation", p, m, seed)
            modulus = generator = None
    if modulus is None:
        modulus = _find_modulus(p, m, seed)
        generator = _find_generator(p, m, modulus, seed, prime_factors)
        if cache_dir:
            stub = FieldCtx(p, m, modulus, generator, seed, prime_factors)
            save_field_cache(stub, cache_dir)
    tables = (None, None, None)
    if with_tables:
        tables = _build_tables(p, m, modulus, generator)
    logger.debug("built F_%d (p=%d, m=%d, tables=%s)", q, p, m, with_tables)
    return FieldCtx(p, m, tuple(modulus), tuple(generator), seed, prime_factors, *tables)


# Element operations

def _require_tables(ctx):
    if not ctx.has_tables:
        raise NoTable(f"F_{ctx.q} has no discrete-log table")


def add_codes(ctx, a, b):
    """Digitwise addition of element codes (ints or numpy arrays)."""
    p = ctx.p
    out = 0 * a + 0 * b
    for j in range(ctx.m):
        w = p ** j
        out = out + (((a // w) % p + (b // w) % p) % p) * w
    return out


def neg_code(ctx, a):
    p = ctx.p
    out = 0
    for j in range(ctx.m):
        w = p ** j
        out = out + ((-((a // w) % p)) % p) * w
    return out


def mul_codes(ctx, a, b):
    if a == 0 or b == 0:
        return 0
    if ctx.has_tables:
        idx = (int(ctx.log_table[a]) + int(ctx.log_table[b])) % (ctx.q - 1)
        return int(ctx.exp_table[idx])
    prod = _pmulmod(_code_to_coeffs(a, ctx.p, ctx.m), _code_to_coeffs(b, ctx.p, ctx.m),
                    list(ctx.modulus), ctx.p)
    return _coeffs_to_code(prod, ctx.p)


def pow_code(ctx, a, e):
    if a == 0:
        return 0 if e > 0 else 1
    if ctx.has_tables:
        return int(ctx.exp_table[(int(ctx.log_table[a]) * e) % (ctx.q - 1)])
    coeffs = _ppowmod(_code_to_coeffs(a, ctx.p, ctx.m), e % (ctx.q - 1), list(ctx.modulus), ctx.p)
    return _coeffs_to_code(coeffs, ctx.p)


def generator_power(ctx, i):
    """Code of g^i."""
    if ctx.has_tables:
        return int(ctx.exp_table[i % (ctx.q - 1)])
    return pow_code(ctx, _coeffs_to_code(ctx.generator, ctx.p), i)


def trace_to_prime(ctx, x):
    """
    Absolute trace Tr_{F_q/F_p}(x) = sum_{i<m} x^{p^i}.

    Args:
        ctx (FieldCtx): Field
        x (FFElem or int): Element or element code

    Returns:
        int: Value in F_p
    """
    code = ctx.code(x)
    if ctx.has_tables:
        return int(ctx.trace_table[code])
    total, y = 0, code
    for _ in range(ctx.m):
        total = add_codes(ctx, total, y)
        y = pow_code(ctx, y, ctx.p)
    return total


def dlog(ctx, x):
    """
    Discrete logarithm with respect to the field generator.

    Raises:
        ZeroElement: x is zero
        NoTable: the field has no log table
    """
    code = ctx.code(x)
    if code == 0:
        raise ZeroElement("dlog of zero")
    _require_tables(ctx)
    return int(ctx.log_table[code])


def subfield(ctx, e):
    """Handle on the subfield F_{p^e}, e | m."""
    if e < 1 or ctx.m % e != 0:
        raise NotADivisor(f"{e} does not divide {ctx.m}")
    step = (ctx.q - 1) // (ctx.p ** e - 1)
    return SubfieldHandle(ctx, e, ctx.elem(generator_power(ctx, step)))


def subfield_elements(ctx, e):
    """
    Elements of F_{p^e} inside F_{p^m}: 0, then embed_gen^i for i < p^e - 1.

    Returns:
        list: FFElem values in deterministic order

    Raises:
        NotADivisor: e does not divide m
    """
    return [ctx.elem(c) for c in subfield_codes(ctx, e)]


def subfield_codes(ctx, e):
    handle = subfield(ctx, e)
    size = handle.size
    step = (ctx.q - 1) // (size - 1)
    if ctx.has_tables:
        idx = np.arange(size - 1, dtype=np.int64) * step
        return np.concatenate(([0], ctx.exp_table[idx])).astype(np.int64)
    codes, y = [0], 1
    for _ in range(size - 1):
        codes.append(y)
        y = mul_codes(ctx, y, handle.embed_code)
    return np.array(codes, dtype=np.int64)


def quadratic_character(ctx, u):
    """chi(u) in {1, -1, 0} via the parity of dlog(u); 1 on F_2."""
    code = ctx.code(u)
    if code == 0:
        return 0
    if ctx.p == 2:
        return 1
    if ctx.has_tables:
        return 1 if int(ctx.log_table[code]) % 2 == 0 else -1
    return 1 if pow_code(ctx, code, (ctx.q - 1) // 2) == 1 else -1


def frobenius_orbits(ctx, base_m):
    """
    Closed points of the affine line over F_{p^base_m} inside this field.

    Each Frobenius orbit x -> x^{p^base_m} is represented by the element of
    least discrete log; zero is the single orbit of degree 1 at code 0.

    Args:
        ctx (FieldCtx): Field with tables, base_m | m
        base_m (int): Degree of the base field over F_p

    Returns:
        dict: degree -> numpy array of representative codes
    """
    if ctx.m % base_m != 0:
        raise NotADivisor(f"{base_m} does not divide {ctx.m}")
    _require_tables(ctx)
    order = ctx.q - 1
    top = ctx.m // base_m
    base_q = ctx.p ** base_m
    logs = np.arange(order, dtype=np.int64)
    orbit_min = logs.copy()
    degree = np.zeros(order, dtype=np.int64)
    for r in range(1, top + 1):
        rotated = (logs * pow(base_q, r, order)) % order if order > 1 else logs
        fresh = (degree == 0) & (rotated == logs)
        degree[fresh] = r
        if r < top:
            orbit_min = np.minimum(orbit_min, rotated)
    reps = logs == orbit_min
    out = {1: [0]}
    for deg in range(1, top + 1):
        chosen = ctx.exp_table[logs[reps & (degree == deg)]]
        out[deg] = np.concatenate((out.get(deg, []), chosen)).astype(np.int64)
    return out


def minimal_polynomial(ctx, x):
    """
    Minimal polynomial of x over F_p, lowest degree first.

    Used as a field-independent name for a closed point.
    """
    code = ctx.code(x)
    conjugates = [code]
    y = pow_code(ctx, code, ctx.p)
    while y != code:
        conjugates.append(y)
        y = pow_code(ctx, y, ctx.p)
    poly = [1]
    for root in conjugates:
        shifted = [0] + poly
        neg_root = neg_code(ctx, root)
        for i, c in enumerate(poly):
            shifted[i] = add_codes(ctx, shifted[i], mul_codes(ctx, c, neg_root))
        poly = shifted
    if any(c >= ctx.p for c in poly):
        raise ArithmeticError("minimal polynomial left the prime field")
    return tuple(int(c) for c in poly)
