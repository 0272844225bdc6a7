"""
Character Sums Module

This module provides multiplicative and additive characters of a finite
field, the table of Gauss sums

    G_q(k) = - sum_{a != 0} omega(a)^{-k} zeta_p^{Tr(a)},    k = 0..q-2,

the inversion formula and Hasse-Davenport checks, and the p-action orbits on
S_m = {1/m, ..., (m-1)/m}.

Inner loops run on fixed-point Gaussian integers (numpy object arrays of
Python ints scaled by 2^bits); values are handed out as mpmath complex
numbers. Lengths above the FFT threshold go through Bluestein's chirp
transform on a radix-2 FFT.
"""

import os
import json
import hashlib
import logging
from dataclasses import dataclass, field
from functools import lru_cache
from math import gcd
from fractions import Fraction

import mpmath
import networkx as nx
import numpy as np

from arithmetic_core.errors import CapExceeded, NoTable, NotCoprime, PrecisionLoss
from arithmetic_core.ffield import (
    add_codes,
    build_field,
    dlog,
    pow_code,
    subfield,
    FIELD_CAP,
)

logger = logging.getLogger(__name__)

DEFAULT_BITS = 128
GUARD_BITS = 32
FFT_THRESHOLD = 4096
CACHE_VERSION = 1


# Fixed-point helpers

def _to_fixed(value, scale):
    return int(mpmath.nint(value * mpmath.mpf(2) ** scale))


@lru_cache(maxsize=16)
def unit_roots(order, scale):
    """zeta_order^j for j < order as fixed-point (re, im) object arrays."""
    re = np.empty(order, dtype=object)
    im = np.empty(order, dtype=object)
    with mpmath.workprec(scale + 24 + order.bit_length()):
        step = mpmath.expjpi(mpmath.mpf(2) / order)
        value = mpmath.mpc(1)
        for j in range(order):
            # re-anchor the running product every 1024 steps
            if j % 1024 == 0:
                value = mpmath.expjpi(mpmath.mpf(2 * j) / order)
            re[j] = _to_fixed(value.real, scale)
            im[j] = _to_fixed(value.imag, scale)
            value *= step
    return re, im


def fx_mul(ar, ai, br, bi, scale):
    """Fixed-point complex product."""
    return (ar * br - ai * bi) >> scale, (ar * bi + ai * br) >> scale


def fx_to_mpc(re, im, scale):
    unit = mpmath.mpf(2) ** scale
    return mpmath.mpc(mpmath.mpf(int(re)) / unit, mpmath.mpf(int(im)) / unit)


def _object_zeros(size):
    out = np.empty(size, dtype=object)
    out[:] = 0
    return out


def _fft_pow2(re, im, scale):
    """Radix-2 decimation-in-time FFT, X_k = sum x_j zeta_M^{jk}."""
    size = len(re)
    if size == 1:
        return re.copy(), im.copy()
    levels = size.bit_length() - 1
    rev = np.zeros(size, dtype=np.int64)
    for bit in range(levels):
        rev |= ((np.arange(size) >> bit) & 1) << (levels - 1 - bit)
    re, im = re[rev], im[rev]
    roots_re, roots_im = unit_roots(size, scale)
    half = 1
    while half < size:
        step = size // (2 * half)
        w_re = roots_re[: size // 2 : step][:half]
        w_im = roots_im[: size // 2 : step][:half]
        blocks_re = re.reshape(-1, 2 * half)
        blocks_im = im.reshape(-1, 2 * half)
        even_re, even_im = blocks_re[:, :half], blocks_im[:, :half]
        t_re, t_im = fx_mul(blocks_re[:, half:], blocks_im[:, half:], w_re, w_im, scale)
        re = np.concatenate((even_re + t_re, even_re - t_re), axis=1).reshape(-1)
        im = np.concatenate((even_im + t_im, even_im - t_im), axis=1).reshape(-1)
        half *= 2
    return re, im


def _dft_naive(re, im, scale, orbit_step):
    size = len(re)
    roots_re, roots_im = unit_roots(size, scale)
    out_re, out_im = _object_zeros(size), _object_zeros(size)
    done = np.zeros(size, dtype=bool)
    j = np.arange(size, dtype=np.int64)
    for k in range(size):
        if done[k]:
            continue
        idx = (k * j) % size
        w_re, w_im = roots_re[idx], roots_im[idx]
        vr = (np.dot(re, w_re) - np.dot(im, w_im)) >> scale
        vi = (np.dot(re, w_im) + np.dot(im, w_re)) >> scale
        members = [k]
        if orbit_step:
            nxt = (k * orbit_step) % size
            while nxt != k:
                members.append(nxt)
                nxt = (nxt * orbit_step) % size
        for member in members:
            out_re[member], out_im[member] = vr, vi
            done[member] = True
    return out_re, out_im


def _dft_bluestein(re, im, scale):
    size = len(re)
    conv = 1
    while conv < 2 * size - 1:
        conv *= 2
    chirp_re, chirp_im = unit_roots(2 * size, scale)
    sq = (np.arange(size, dtype=np.int64) ** 2) % (2 * size)
    c_re, c_im = chirp_re[sq], chirp_im[sq]
    a_re, a_im = _object_zeros(conv), _object_zeros(conv)
    a_re[:size], a_im[:size] = fx_mul(re, im, c_re, c_im, scale)
    b_re, b_im = _object_zeros(conv), _object_zeros(conv)
    b_re[:size], b_im[:size] = c_re, -c_im
    b_re[conv - size + 1:] = c_re[1:][::-1]
    b_im[conv - size + 1:] = -c_im[1:][::-1]
    fa_re, fa_im = _fft_pow2(a_re, a_im, scale)
    fb_re, fb_im = _fft_pow2(b_re, b_im, scale)
    p_re, p_im = fx_mul(fa_re, fa_im, fb_re, fb_im, scale)
    # inverse transform as conj(FFT(conj(x))) / conv
    inv_re, inv_im = _fft_pow2(p_re, -p_im, scale)
    shift = conv.bit_length() - 1
    conv_re = inv_re[:size] >> shift
    conv_im = (-inv_im[:size]) >> shift
    return fx_mul(conv_re, conv_im, c_re, c_im, scale)


def dft(re, im, sign, scale, fft_threshold=FFT_THRESHOLD, orbit_step=None):
    """
    Discrete Fourier transform X_k = sum_j x_j zeta_N^{sign jk} in fixed point.

    Args:
        re, im (np.ndarray): Object arrays of scaled integers, length N
        sign (int): +1 or -1
        scale (int): Fixed-point scale bits
        fft_threshold (int): Above this length use Bluestein/FFT
        orbit_step (int, optional): Caller guarantees X_{k*step} = X_k (naive path)

    Returns:
        tuple: (re, im, method) with method 'naive' or 'fft'
    """
    if sign < 0:
        out_re, out_im, method = dft(re, -im, 1, scale, fft_threshold, orbit_step)
        return out_re, -out_im, method
    if len(re) <= fft_threshold:
        out_re, out_im = _dft_naive(re, im, scale, orbit_step)
        return out_re, out_im, "naive"
    out_re, out_im = _dft_bluestein(re, im, scale)
    return out_re, out_im, "fft"


# Characters and Gauss tables

@dataclass(frozen=True, eq=False)
class CharTable:
    ctx: object
    zeta_p: mpmath.mpc
    zeta_q1: mpmath.mpc
    bits: int


def build_char_table(ctx, bits=DEFAULT_BITS):
    """omega(g^i) = zeta_{q-1}^i and zeta_p = exp(2 pi i / p)."""
    if bits < 64:
        raise ValueError("precision below 64 bits")
    with mpmath.workprec(bits):
        zeta_p = mpmath.expjpi(mpmath.mpf(2) / ctx.p)
        zeta_q1 = mpmath.expjpi(mpmath.mpf(2) / (ctx.q - 1)) if ctx.q > 2 else mpmath.mpc(1)
    return CharTable(ctx, zeta_p, zeta_q1, bits)


@dataclass(frozen=True, eq=False)
class GaussTable:
    """G_q(k), k = 0..q-2, held in fixed point with scale_bits."""

    ctx: object
    re: np.ndarray = field(repr=False)
    im: np.ndarray = field(repr=False)
    bits: int
    scale_bits: int
    built_by: str

    def __len__(self):
        return len(self.re)

    def value(self, k):
        k %= len(self.re)
        with mpmath.workprec(self.bits):
            return fx_to_mpc(self.re[k], self.im[k], self.scale_bits)

    def values(self):
        return [self.value(k) for k in range(len(self.re))]


def _validate_gauss(re, im, q, scale, bits):
    unit = 1 << scale
    tol = q << max(0, scale - bits + 16)
    if abs(re[0] - unit) > tol or abs(im[0]) > tol:
        return False
    target = q * unit * unit
    tol_sq = (q * unit * unit) >> max(0, bits - 16)
    norms = re[1:] * re[1:] + im[1:] * im[1:] if len(re) > 1 else []
    return all(abs(v - target) <= tol_sq for v in norms)


def _parity_ok(re, im, q, scale, bits):
    size = len(re)
    tol = q << max(0, scale - bits + 16)
    sign_base = -1 if q % 2 else 1
    for k in range(1, size):
        sgn = sign_base ** k
        if abs(re[-k % size] - sgn * re[k]) > tol or abs(im[-k % size] + sgn * im[k]) > tol:
            return False
    return True


def build_gauss_table(ct, fft_threshold=FFT_THRESHOLD, _retry=True):
    """
    Gauss sums G[k] = - sum_i zeta_{q-1}^{-ki} zeta_p^{Tr(g^i)}.

    Args:
        ct (CharTable): Characters of the field
        fft_threshold (int): q - 1 above this uses the chirp transform

    Returns:
        GaussTable: Validated table

    Raises:
        PrecisionLoss: Validation failed at the doubled precision too
    """
    ctx = ct.ctx
    if not ctx.has_tables:
        raise NoTable(f"F_{ctx.q} has no tables for a Gauss table")
    scale = ct.bits + GUARD_BITS
    size = ctx.q - 1
    zp_re, zp_im = unit_roots(ctx.p, scale)
    traces = ctx.trace_table[ctx.exp_table]
    out_re, out_im, method = dft(zp_re[traces], zp_im[traces], -1, scale,
                                 fft_threshold, orbit_step=ctx.p % size if size > 1 else None)
    out_re, out_im = -out_re, -out_im
    if not _validate_gauss(out_re, out_im, ctx.q, scale, ct.bits):
        if _retry:
            logger.warning("Gauss table for F_%d failed validation at %d bits; retrying", ctx.q, ct.bits)
            return build_gauss_table(build_char_table(ctx, 2 * ct.bits), fft_threshold, _retry=False)
        raise PrecisionLoss(f"Gauss table for F_{ctx.q} failed validation", q=ctx.q, bits=ct.bits)
    if not _parity_ok(out_re, out_im, ctx.q, scale, ct.bits):
        logger.warning("Gauss table for F_%d fails the parity self-check", ctx.q)
    logger.debug("Gauss table F_%d built by %s at %d bits", ctx.q, method, ct.bits)
    return GaussTable(ctx, out_re, out_im, ct.bits, scale, method)


def gauss_cache_key(ctx, bits):
    ident = [ctx.p, ctx.m, list(ctx.modulus), list(ctx.generator), bits]
    return hashlib.sha256(json.dumps(ident).encode("utf-8")).hexdigest()


def _gauss_cache_path(cache_dir, ctx, bits):
    return os.path.join(cache_dir, f"gauss_{gauss_cache_key(ctx, bits)[:24]}.bin")


def save_gauss_table(gt, cache_dir):
    """
    Write a Gauss table as a JSON header line plus fixed-width integers.

    Returns:
        bool: Success status
    """
    try:
        os.makedirs(cache_dir, exist_ok=True)
        ctx = gt.ctx
        shift = gt.scale_bits - gt.bits
        width = (gt.bits + ctx.q.bit_length() // 2 + 16) // 8 + 1
        header = {
            "version": CACHE_VERSION,
            "p": ctx.p,
            "m": ctx.m,
            "modulus": list(ctx.modulus),
            "generator": list(ctx.generator),
            "bits": gt.bits,
            "built_by": gt.built_by,
            "width": width,
        }
        with open(_gauss_cache_path(cache_dir, ctx, gt.bits), "wb") as f:
            f.write(json.dumps(header, sort_keys=True).encode("utf-8") + b"\n")
            for re, im in zip(gt.re, gt.im):
                f.write(int(re >> shift).to_bytes(width, "big", signed=True))
                f.write(int(im >> shift).to_bytes(width, "big", signed=True))
        return True
    except Exception as e:
        logger.warning("Error saving Gauss table: %s", e)
        return False


def load_gauss_table(ctx, bits, cache_dir):
    """
    Load a cached Gauss table for this exact field identity.

    Returns:
        GaussTable: Table or None if missing/stale
    """
    path = _gauss_cache_path(cache_dir, ctx, bits)
    try:
        if not os.path.exists(path):
            return None
        with open(path, "rb") as f:
            header = json.loads(f.readline().decode("utf-8"))
            expected = (ctx.p, ctx.m, list(ctx.modulus), list(ctx.generator), bits)
            found = (header["p"], header["m"], header["modulus"], header["generator"], header["bits"])
            if header.get("version") != CACHE_VERSION or found != expected:
                logger.warning("Ignoring stale Gauss cache %s", path)
                return None
            width = header["width"]
            payload = f.read()
        size = ctx.q - 1
        if len(payload) != 2 * width * size:
            logger.warning("Truncated Gauss cache %s", path)
            return None
        re, im = _object_zeros(size), _object_zeros(size)
        for k in range(size):
            base = 2 * width * k
            re[k] = int.from_bytes(payload[base: base + width], "big", signed=True) << GUARD_BITS
            im[k] = int.from_bytes(payload[base + width: base + 2 * width], "big", signed=True) << GUARD_BITS
        return GaussTable(ctx, re, im, bits, bits + GUARD_BITS, header["built_by"])
    except Exception as e:
        logger.warning("Error loading Gauss cache %s: %s", path, e)
        return None


def get_gauss_table(ctx, bits=DEFAULT_BITS, fft_threshold=FFT_THRESHOLD, cache_dir=None):
    """Cached build_gauss_table."""
    if cache_dir:
        cached = load_gauss_table(ctx, bits, cache_dir)
        if cached is not None:
            logger.debug("Gauss cache hit for F_%d", ctx.q)
            return cached
    gt = build_gauss_table(build_char_table(ctx, bits), fft_threshold)
    if cache_dir:
        save_gauss_table(gt, cache_dir)
    return gt


def gauss_sum(ctx, k, bits=DEFAULT_BITS):
    """Single Gauss sum G_q(k), summed directly in O(q)."""
    size = ctx.q - 1
    scale = bits + GUARD_BITS
    roots_re, roots_im = unit_roots(size, scale)
    zp_re, zp_im = unit_roots(ctx.p, scale)
    traces = ctx.trace_table[ctx.exp_table]
    idx = (-(k % size) * np.arange(size, dtype=np.int64)) % size
    t_re, t_im = fx_mul(zp_re[traces], zp_im[traces], roots_re[idx], roots_im[idx], scale)
    with mpmath.workprec(bits):
        return -fx_to_mpc(sum(t_re), sum(t_im), scale)


def subfield_gauss_sum(handle, j, bits=DEFAULT_BITS):
    """
    Gauss sum of the subfield F_{p^e} computed inside its parent.

    The subfield character is omega_sub(h^i) = zeta_{p^e-1}^i with h the
    embedded generator, which makes omega_sub o Norm a power of the parent
    character; the additive character uses the subfield trace.
    """
    ctx = handle.parent
    size = handle.size - 1
    total = mpmath.mpc(0)
    with mpmath.workprec(bits + GUARD_BITS):
        zeta_sub = mpmath.expjpi(mpmath.mpf(2) / size) if size > 1 else mpmath.mpc(1)
        zeta_p = mpmath.expjpi(mpmath.mpf(2) / ctx.p)
        y = 1
        for i in range(size):
            tr, z = 0, y
            for _ in range(handle.e):
                tr = add_codes(ctx, tr, z)
                z = pow_code(ctx, z, ctx.p)
            total += zeta_sub ** (-(i * j) % size if size > 1 else 0) * zeta_p ** tr
            y = pow_code(ctx, handle.embed_code, i + 1)
    with mpmath.workprec(bits):
        return -(+total)


def check_inversion(ct, gt, a):
    """
    Residual of zeta_p^{Tr a} = sum_k G(k) omega(a)^k / (1 - q).

    Args:
        ct (CharTable): Characters
        gt (GaussTable): Gauss table of the same field
        a (FFElem or int): Nonzero element

    Returns:
        mpmath.mpf: |lhs - rhs|
    """
    ctx = ct.ctx
    la = dlog(ctx, a)
    size = ctx.q - 1
    with mpmath.workprec(ct.bits):
        lhs = ct.zeta_p ** int(ctx.trace_table[ctx.code(a)])
        omega_a = ct.zeta_q1 ** la
        rhs = mpmath.fsum(gt.value(k) * omega_a ** k for k in range(size)) / (1 - ctx.q)
        return abs(lhs - rhs)


def hasse_davenport_check(p, d, k, r, bits=DEFAULT_BITS, field_cap=FIELD_CAP, seed=0):
    """
    Residual |G_{p^{dk}}(r(p^{dk}-1)) - G_{p^d}(r(p^d-1))^k|.

    Both sums are taken inside F_{p^{dk}} with norm-compatible characters.

    Args:
        p (int): Prime
        d (int): Degree of the small field
        k (int): Extension degree
        r (Fraction): Element with (p^d - 1) r integral

    Returns:
        mpmath.mpf: Residual

    Raises:
        CapExceeded: F_{p^{dk}} beyond field_cap
    """
    r = Fraction(r)
    small = p ** d - 1
    if (small * r).denominator != 1:
        raise ValueError(f"(p^d - 1) r is not integral for r={r}")
    if p ** (d * k) > field_cap:
        raise CapExceeded(f"F_{p}^{d * k} beyond cap {field_cap}")
    big_ctx = build_field(p, d * k, seed, field_cap=field_cap)
    big = gauss_sum(big_ctx, int(r * (big_ctx.q - 1)), bits)
    handle = subfield(big_ctx, d)
    small_g = subfield_gauss_sum(handle, int(r * small), bits)
    with mpmath.workprec(bits):
        return abs(big - small_g ** k)


# p-action on S_m

@dataclass(frozen=True)
class Orbit:
    representative: Fraction
    length: int
    members: tuple


@dataclass(frozen=True)
class OrbitSet:
    m: int
    p: int
    orbits: tuple

    def degree(self):
        return sum(o.length for o in self.orbits)


def p_orbits(m, p):
    """
    Orbits of r -> {p r} on S_m = {1/m, ..., (m-1)/m}.

    Args:
        m (int): Modulus, coprime to p
        p (int): Prime

    Returns:
        OrbitSet: Orbits sorted by (length, representative)

    Raises:
        NotCoprime: gcd(m, p) != 1
    """
    if gcd(m, p) != 1:
        raise NotCoprime(f"gcd({m}, {p}) != 1")
    graph = nx.DiGraph()
    for j in range(1, m):
        r = Fraction(j, m)
        image = (p * r) % 1
        graph.add_edge(r, image)
    orbits = []
    for component in nx.weakly_connected_components(graph):
        rep = min(component)
        members = [rep]
        nxt = (p * rep) % 1
        while nxt != rep:
            members.append(nxt)
            nxt = (p * nxt) % 1
        if len(members) != len(component):
            raise ArithmeticError("p-action component is not a single cycle")
        orbits.append(Orbit(rep, len(members), tuple(members)))
    orbits.sort(key=lambda o: (o.length, o.representative))
    return OrbitSet(m, p, tuple(orbits))
