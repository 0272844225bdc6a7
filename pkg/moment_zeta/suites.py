"""
Verification Suites

This module provides the named verification suites run by `verify` and
`bundle`. A suite yields (label, case) pairs; a case returns a detail dict or
raises. Verification errors fail the case, cap errors mark it "capped".

Every suite has a quick profile (exercised by the tests) and a full profile
(the complete grid).
"""

import os
import time
import logging
from dataclasses import dataclass, field
from fractions import Fraction

from arithmetic_core.charsums import hasse_davenport_check
from arithmetic_core.errors import CapExceeded, DworkZetaError, Mismatch, UnknownSuite
from arithmetic_core.ffield import prime_power
from moment_zeta.config import RunConfig
from moment_zeta.counting import (
    bruteforce_all_fibers,
    collect_frobenius_data,
    count_all_fibers,
    count_gauss,
    count_gauss_zero,
    det_value,
    fiber_charpoly,
    fiber_kind,
    trace_sum,
)
from moment_zeta.formulas import (
    B_count,
    C_count,
    D_local,
    N_count,
    alpha,
    beta,
    degP,
    delta,
    formula_row,
    jordan_blocks,
    middle_index,
)
from moment_zeta.momentzeta import congruence_check, prop31_check, run_gab, run_moment
from moment_zeta.utils.reports import build_report, save_csv, save_report, write_manifest
from moment_zeta.zeta0 import validate_zeta_X0, zeta_X0

logger = logging.getLogger(__name__)


@dataclass
class SuiteResult:
    name: str
    profile: str
    cases_run: int = 0
    cases_passed: int = 0
    cases_capped: int = 0
    first_failure: str = None
    wall_time: float = 0.0
    cases: list = field(default_factory=list)

    @property
    def status(self):
        if self.first_failure is not None:
            return "fail"
        if self.cases_capped:
            return "capped"
        return "pass"

    @property
    def passed(self):
        return self.first_failure is None


def _expect(condition, message, **details):
    if not condition:
        raise Mismatch(message, **details)


def prime_powers(limit, start=2):
    out = []
    for q in range(start, limit + 1):
        try:
            prime_power(q)
        except ValueError:
            continue
        out.append(q)
    return out


# Suites

def suite_gauss_vs_brute(profile, config):
    """Gauss-sum counts equal enumeration for every lambda, including lambda = 0."""
    if profile == "full":
        grid = [(2, q) for q in prime_powers(49)] + [(3, q) for q in prime_powers(13)] \
            + [(4, q) for q in prime_powers(9)]
    else:
        grid = [(2, 3), (2, 4), (2, 5), (2, 7), (3, 3), (3, 4), (4, 3), (4, 5)]
    for n, q in grid:
        def case(n=n, q=q):
            p, m = prime_power(q)
            ctx = config.field(p, m)
            gt = config.gauss_table(ctx)
            hist = bruteforce_all_fibers(ctx, n, config.work_cap)
            for code in range(1, q):
                N = count_gauss(ctx, gt, n, code).N
                _expect(N == hist[code], f"n={n} q={q} lambda={code}: gauss {N} != brute {hist[code]}")
            zero = count_gauss_zero(ctx, gt, n).N
            _expect(zero == hist[0], f"n={n} q={q}: N(0) gauss {zero} != brute {hist[0]}")
            fast = count_all_fibers(ctx, gt, n, config.fft_threshold)
            _expect(list(fast) == [int(x) for x in hist], f"n={n} q={q}: all-fibre transform disagrees")
            return {"n": n, "q": q, "N0": zero}
        yield f"n={n} q={q}", case


def suite_sk_minus_one(profile, config):
    """sum over lambda in F_{q^k} of the trace on F is -1."""
    if profile == "full":
        grid, levels = [(2, 5), (2, 7), (3, 7), (4, 7), (2, 13)], (1, 2, 3)
    else:
        grid, levels = [(2, 5), (2, 7), (3, 7)], (1, 2)
    for n, q in grid:
        for k in levels:
            def case(n=n, q=q, k=k):
                total = trace_sum(n, q, k, config)
                _expect(total == -1, f"n={n} q={q} k={k}: trace sum {total}")
                return {"n": n, "q": q, "k": k, "S": total}
            yield f"n={n} q={q} k={k}", case


def _quadratic_eigenvalue_cases(q, config):
    """n = 3 good fibres over a prime field: charpoly from two levels and the det, chi q a root."""
    n = 3
    ctx, big = config.field(q, 1), config.field(q, 2)
    low = count_all_fibers(ctx, config.gauss_table(ctx), n, config.fft_threshold)
    high = count_all_fibers(big, config.gauss_table(big), n, config.fft_threshold)
    checked = 0
    for lam in range(q):
        if fiber_kind(ctx, n, lam) != "good":
            continue
        fd = fiber_charpoly(ctx, n, lam, [int(low[lam]), int(high[lam])])
        det = det_value(ctx, n, lam, q)
        chi = Fraction(det, q ** 3)
        _expect(fd.cp.coeffs[3] == -det, f"lambda={lam}: top coefficient {fd.cp.coeffs[3]} != {-det}")
        _expect(fd.cp(1 / (chi * q)) == 0, f"lambda={lam}: chi q is not an eigenvalue")
        checked += 1
    return checked


def suite_purity(profile, config):
    """Good-fibre purity, bad-fibre traces for n = 2, the eigenvalue chi q for n = 3."""
    grid = [(2, 7), (2, 13), (3, 13)] if profile == "full" else [(2, 7), (3, 7)]
    for n, q in grid:
        def case(n=n, q=q):
            data = collect_frobenius_data(n, q, 1, config)[1]
            for fd in data:
                if fd.kind == "bad" and n == 2:
                    t = -fd.cp.coeffs[1]
                    _expect(abs(t) == 1, f"bad fibre lambda={fd.lam}: trace {t}")
            detail = {"n": n, "q": q, "fibres": len(data)}
            if n == 3:
                detail["chi_checked"] = _quadratic_eigenvalue_cases(q, config)
            return detail
        yield f"n={n} q={q}", case


def suite_hasse_davenport(profile, config):
    """Norm-compatible Gauss sums satisfy Hasse-Davenport to 1e-20."""
    grid = [(2, 1, 2), (2, 2, 2), (3, 1, 2), (3, 1, 3), (5, 1, 2)] if profile == "full" \
        else [(2, 1, 2), (3, 1, 2)]
    for p, d, k in grid:
        def case(p=p, d=d, k=k):
            small = p ** d - 1
            worst = 0
            for j in range(small):
                residual = hasse_davenport_check(p, d, k, Fraction(j, small), config.precision_bits,
                                                 config.field_cap, config.seed)
                _expect(residual < 1e-20, f"p={p} d={d} k={k} r={j}/{small}: residual {residual}")
                worst = max(worst, float(residual))
            return {"p": p, "d": d, "k": k, "max_residual": worst}
        yield f"p={p} d={d} k={k}", case


def suite_zeta0(profile, config):
    """Zeta of X_0 from p-orbits agrees with independent counts."""
    grid = [(2, 3, 5), (3, 5, 4), (2, 5, 6), (5, 4, 3), (2, 7, 4)] if profile == "full" \
        else [(2, 3, 5), (5, 4, 3)]
    for p, n, K in grid:
        def case(p=p, n=n, K=K):
            report = zeta_X0(p, n, config=config)
            validate_zeta_X0(report, K, config)
            return {"p": p, "n": n, "K": K, "m": report.m, "nontrivial": report.nontrivial}
        yield f"p={p} n={n} K={K}", case


def suite_combinatorics(profile, config):
    """Enumeration against generating functions and the structural identities."""
    top_n, top_a = (6, 8) if profile == "full" else (4, 3)
    for n in range(2, top_n + 1):
        def case(n=n):
            checked = 0
            for a in range(top_a + 1):
                for b in range(n + 1):
                    weight = (a + b) * (n - 1)
                    enumerate_ok = a + b <= 6
                    for k in range(weight + 1):
                        if enumerate_ok:
                            N_count(n, a, b, k, method="both")
                        _expect(N_count(n, a, b, k) == N_count(n, a, b, weight - k),
                                f"N({n},{a},{b}) not symmetric at {k}")
                    c = middle_index(n, a, b)
                    _expect(sum(alpha(n, a, b, k) for k in range(c + 1)) == N_count(n, a, b, c),
                            f"alpha({n},{a},{b}) does not telescope")
                    if n % 2 == 0:
                        _expect(sum(jordan_blocks(n, a, b).values()) == D_local(n, a, b),
                                f"blocks of ({n},{a},{b}) do not sum to D")
                    degP(n, a, b)
                    checked += 1
                for k in range(a * (n - 1) + 1):
                    C_count(n, a, k, method="both" if a <= 12 else "generating")
            for b in range(n + 1):
                for j in range(b * (n - 1) + 1):
                    B_count(n, b, j, method="both")
            for k in range(2 * n + 2):
                value = sum((-1) ** (b - 1) * b * beta(n, b, k, method="both") for b in range(1, n + 1))
                _expect(value == {0: 1, 1: -1}.get(k, 0), f"alternating beta sum at n={n} k={k}: {value}")
            for a in range(4):
                for b in range(n + 1):
                    if delta(n, a, b):
                        _expect((a + b) * (n - 1) % 2 == 0, f"delta({n},{a},{b}) at an odd middle weight")
            _expect(delta(n, 0, 0) == 1 and delta(n, 1, 1) == 1, f"delta table n={n}")
            return {"n": n, "rows": checked}
        yield f"n={n}", case


def suite_moment_factorization(profile, config):
    """Moment zeta factorization, purity, degrees and the point-count estimate."""
    grid = [(2, 5, 1), (2, 5, 2), (2, 7, 1), (2, 7, 2), (2, 7, 3)] if profile == "full" \
        else [(2, 5, 1), (2, 5, 2)]
    for n, q, d in grid:
        def case(n=n, q=q, d=d):
            report = run_moment(n, q, d, config=config)
            failed = [row for row in report.estimate if not row["holds"]]
            _expect(not failed, f"estimate fails at n={n} q={q} d={d}: {failed}")
            return {"n": n, "q": q, "d": d, "K": report.K, "Pd": report.Pd,
                    "degree_check": report.degree_check}
        yield f"n={n} q={q} d={d}", case


def suite_congruence(profile, config):
    """Z_{d1} = Z_{d2} mod p^{m+1} on the first coefficients."""
    grid = [(2, 5, 1, 5, 0, 4), (2, 7, 2, 8, 0, 4)] if profile == "full" else [(2, 5, 1, 5, 0, 4)]
    for n, q, d1, d2, m, K in grid:
        def case(n=n, q=q, d1=d1, d2=d2, m=m, K=K):
            verified = congruence_check(n, q, d1, d2, m, K, config)
            return {"n": n, "q": q, "d1": d1, "d2": d2, "m": m, "verified_to": verified}
        yield f"n={n} q={q} Z_{d1}~Z_{d2}", case


def suite_prop31(profile, config):
    """L(U, F) = (1 - T) P^{n+1} with P the singular-fibre polynomial."""
    grid = [(2, 7), (2, 13), (3, 13)] if profile == "full" else [(2, 7)]
    for n, q in grid:
        def case(n=n, q=q):
            report = prop31_check(n, q, config=config)
            return {"n": n, "q": q, "P": report.P}
        yield f"n={n} q={q}", case


def suite_gab(profile, config):
    """L-functions of Sym^a (x) wedge^b over U: degrees, exponents at infinity, purity."""
    pairs = [(1, 0), (2, 0), (0, 2), (1, 1), (3, 0)] if profile == "full" else [(1, 0), (0, 2)]
    n, q = 2, 7
    for a, b in pairs:
        def case(a=a, b=b):
            report = run_gab(n, q, a, b, config=config)
            _expect(report.total_degree == report.predicted_total_degree,
                    f"G_({a},{b}) total degree {report.total_degree} != {report.predicted_total_degree}")
            _expect(report.alpha_agreement, f"G_({a},{b}) trivial factor disagrees")
            _expect(report.residual.num.degree == report.degP,
                    f"G_({a},{b}) residual degree {report.residual.num.degree} != {report.degP}")
            return {"a": a, "b": b, "total_degree": report.total_degree, "residual": report.residual}
        yield f"n={n} q={q} a={a} b={b}", case


SUITES = {
    "gauss_vs_brute": {"description": "Gauss-sum point counts against enumeration",
                       "runner": suite_gauss_vs_brute},
    "sk_minus_one": {"description": "Trace sum over the affine line equals -1",
                     "runner": suite_sk_minus_one},
    "purity": {"description": "Weil purity of fibre characteristic polynomials",
               "runner": suite_purity},
    "hasse_davenport": {"description": "Hasse-Davenport lifting of Gauss sums",
                        "runner": suite_hasse_davenport},
    "zeta0": {"description": "Zeta function of the zero fibre",
              "runner": suite_zeta0},
    "combinatorics": {"description": "Counting functions and degree formulas",
                      "runner": suite_combinatorics},
    "moment_thm11": {"description": "Moment zeta factorization and estimate",
                     "runner": suite_moment_factorization},
    "congruence": {"description": "p-adic congruences between moments",
                   "runner": suite_congruence},
    "prop31": {"description": "Shape of L(U, F)",
               "runner": suite_prop31},
    "gab": {"description": "L-functions of Sym^a (x) wedge^b",
            "runner": suite_gab},
}


def run_suite(name, config=None):
    """
    Run a named suite.

    Args:
        name (str): Registered suite name
        config (RunConfig): Profile, caps and workers

    Returns:
        SuiteResult: Counts, first failure and wall time

    Raises:
        UnknownSuite: No suite registered under name
    """
    if name not in SUITES:
        raise UnknownSuite(f"unknown suite {name!r}; known: {', '.join(sorted(SUITES))}")
    config = config or RunConfig()
    result = SuiteResult(name, config.profile)
    start = time.perf_counter()
    for label, case in SUITES[name]["runner"](config.profile, config):
        result.cases_run += 1
        entry = {"case": label}
        try:
            entry["detail"] = case()
            entry["status"] = "pass"
            result.cases_passed += 1
        except CapExceeded as e:
            entry["status"] = "capped"
            entry["detail"] = str(e)
            result.cases_capped += 1
            logger.warning("suite %s case %s capped: %s", name, label, e)
        except DworkZetaError as e:
            entry["status"] = "fail"
            entry["detail"] = f"{type(e).__name__}: {e}"
            if result.first_failure is None:
                result.first_failure = f"{label}: {entry['detail']}"
            logger.warning("suite %s case %s failed: %s", name, label, entry["detail"])
        result.cases.append(entry)
    result.wall_time = time.perf_counter() - start
    logger.info("suite %s (%s): %d/%d passed, %d capped", name, config.profile,
                result.cases_passed, result.cases_run, result.cases_capped)
    return result


def formula_rows(top_n=5, top_a=4):
    return [formula_row(n, a, b) for n in range(2, top_n + 1)
            for a in range(top_a + 1) for b in range(n + 1)]


def run_bundle(config=None, output_dir=None, suites=None):
    """
    Write every suite report, the formulas table and a manifest.

    Args:
        config (RunConfig): Run configuration
        output_dir (str): Bundle directory
        suites (list, optional): Subset of suite names

    Returns:
        tuple: (success status, manifest path)
    """
    config = config or RunConfig()
    if output_dir is None:
        output_dir = os.path.join(os.path.dirname(__file__), "..", "output", "bundle")
    os.makedirs(output_dir, exist_ok=True)
    artifacts = []
    for name in suites or SUITES:
        result = run_suite(name, config)
        file_name = f"{name}.json"
        data = build_report("suite", result, method=name, oracle_checked=result.passed, config=config)
        data["result"].pop("wall_time", None)
        save_report(data, os.path.join(output_dir, file_name), timestamp=False)
        artifacts.append({"name": file_name, "status": result.status})
    rows = formula_rows()
    csv_name = "formulas.csv"
    ok = save_csv(rows, os.path.join(output_dir, csv_name),
                  columns=["n", "a", "b", "rank", "delta", "D", "degP", "alpha", "beta"])
    artifacts.append({"name": csv_name, "status": "pass" if ok else "fail"})
    manifest = write_manifest(output_dir, config.to_dict(), artifacts)
    success = manifest is not None and all(a["status"] in ("pass", "capped") for a in artifacts)
    return success, manifest
