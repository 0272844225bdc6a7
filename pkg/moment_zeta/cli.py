"""
Moment Zeta Command Line

This script exposes point counts, the formula tables, the zeta function of the
zero fibre, moment zeta functions, the L-functions of G_{a,b}, the shape check
of L(U, F), the verification suites and the report bundle.

    python -m moment_zeta.cli count --n 2 --q 3 --lambda 2
    python -m moment_zeta.cli moment --n 2 --q 5 --d 2
    python -m moment_zeta.cli verify combinatorics

Exit codes: 0 pass, 1 computational failure, 2 usage error, 3 verification failure.
"""

import sys
import logging
import argparse

from arithmetic_core.errors import (
    EXIT_COMPUTATIONAL,
    EXIT_OK,
    EXIT_USAGE,
    EXIT_VERIFICATION,
    DworkZetaError,
    MethodMismatch,
    UsageError,
    WorkCapExceeded,
    exit_code_for,
)
from arithmetic_core.ffield import FFElem, is_prime, prime_power
from moment_zeta.config import RunConfig
from moment_zeta.counting import (
    count_bruteforce,
    count_gauss,
    count_gauss_zero,
    fiber_kind,
    frob_trace,
)
from moment_zeta.formulas import formula_row
from moment_zeta.momentzeta import prop31_check, run_gab, run_moment
from moment_zeta.suites import SUITES, run_bundle, run_suite
from moment_zeta.utils.reports import build_report, dumps_report, save_report
from moment_zeta.zeta0 import validate_zeta_X0, zeta_X0

logger = logging.getLogger(__name__)


def parse_lambda(text, p):
    """'5' is an element code; '1,0,2' are coordinates over F_p, lowest first."""
    try:
        if "," in text:
            return FFElem(tuple(int(c) % p for c in text.split(",")))
        return int(text)
    except ValueError:
        raise UsageError(f"--lambda expects a code or coordinates a0,a1,..., got {text!r}")


def field_size(args):
    """
    Field size from --q, or from --p and --m as q = p^m.

    Raises:
        UsageError: Neither or both forms given, or not a prime power
    """
    if args.q is not None and args.p is not None:
        raise UsageError("give either --q or --p with --m, not both")
    if args.q is not None:
        try:
            prime_power(args.q)
        except ValueError as e:
            raise UsageError(str(e))
        return args.q
    if args.p is None:
        raise UsageError("one of --q or --p is required")
    if not is_prime(args.p) or args.m < 1:
        raise UsageError(f"--p {args.p} --m {args.m} does not name a finite field")
    return args.p ** args.m


def parse_congruence(text):
    try:
        d2, m = text.split(":")
        return int(d2), int(m)
    except ValueError:
        raise UsageError(f"--congruence expects d2:m, got {text!r}")


def emit(data, config):
    """Print the report and save it when --out is given."""
    print(dumps_report(data))
    if config.output:
        if save_report(data, config.output):
            print(f"Report saved to {config.output}", file=sys.stderr)
        else:
            print(f"Failed to save report to {config.output}", file=sys.stderr)


# Commands

def cmd_count(args, config):
    q = field_size(args)
    p, m = prime_power(q)
    ctx = config.field(p, m)
    lam = parse_lambda(args.lam, p)
    code = ctx.code(lam)
    if not 0 <= code < ctx.q:
        raise UsageError(f"lambda {args.lam} is not an element of F_{ctx.q}")
    n = args.n
    method = args.method
    gt = config.gauss_table(ctx) if method != "brute" else None
    if method in ("gauss", "both"):
        N = count_gauss_zero(ctx, gt, n).N if code == 0 else count_gauss(ctx, gt, n, code).N
    else:
        N = count_bruteforce(ctx, n, code, config.work_cap).N
    checked = False
    if method == "both":
        try:
            brute = count_bruteforce(ctx, n, code, config.work_cap).N
        except WorkCapExceeded:
            logger.warning("enumeration beyond work cap; Gauss-sum count not cross-checked")
        else:
            if brute != N:
                raise MethodMismatch(f"gauss {N} != brute {brute}", n=n, q=q, lam=code)
            checked = True
    result = {"n": n, "q": q, "lambda": code, "N": N, "kind": fiber_kind(ctx, n, code)}
    if result["kind"] != "zero_fiber_wild":
        result["t"] = frob_trace(n, q, N)
    return build_report("count", result, method, checked, config, field=ctx)


def cmd_formulas(args, config):
    table = {}
    for n in args.n:
        for a in args.a:
            for b in (args.b if args.b is not None else range(n + 1)):
                table[f"{n},{a},{b}"] = formula_row(n, a, b, args.alpha_terms, args.beta_terms)
    return build_report("formulas", table, "generating", True, config)


def cmd_zeta0(args, config):
    report = zeta_X0(args.p, args.n, config=config)
    validation = None
    if args.validate:
        deviation = validate_zeta_X0(report, args.validate, config)
        validation = {"K": args.validate, "deviation": deviation}
    result = {
        "p": report.p,
        "n": report.n,
        "m": report.m,
        "a": report.a,
        "sign_exponent": report.sign_exponent,
        "trivial_exponents": report.trivial,
        "nontrivial_coeffs": [str(c) for c in report.nontrivial.coeffs],
        "orbit_table": report.orbit_data,
        "validation": validation,
    }
    return build_report("zeta0", result, "p-orbits", validation is not None, config)


def cmd_moment(args, config):
    congruence = parse_congruence(args.congruence) if args.congruence else None
    report = run_moment(args.n, field_size(args), args.d, K=args.terms, method=args.method, config=config,
                        congruence=congruence, cross_check=args.cross_check)
    return build_report("moment", report, args.method, report.cross_checked, config)


def cmd_gab(args, config):
    report = run_gab(args.n, field_size(args), args.a, args.b, mode=args.mode, K=args.terms, config=config)
    return build_report("gab", report, args.mode, report.alpha_agreement, config)


def cmd_prop31(args, config):
    report = prop31_check(args.n, field_size(args), K=args.terms, config=config)
    return build_report("prop31", report, "root-extraction", True, config)


def cmd_verify(args, config):
    result = run_suite(args.suite, config)
    status = "PASS" if result.passed else "FAIL"
    print(f"{args.suite} [{config.profile}]: {status} "
          f"{result.cases_passed}/{result.cases_run} passed, {result.cases_capped} capped "
          f"in {result.wall_time:.1f}s", file=sys.stderr)
    if result.first_failure:
        print(f"First failure: {result.first_failure}", file=sys.stderr)
    return build_report("suite", result, args.suite, result.passed, config)


def cmd_bundle(args, config):
    success, manifest = run_bundle(config, args.output_dir, args.suites)
    print(f"Bundle manifest: {manifest}", file=sys.stderr)
    return success, manifest


COMMANDS = {
    "count": cmd_count,
    "formulas": cmd_formulas,
    "zeta0": cmd_zeta0,
    "moment": cmd_moment,
    "gab": cmd_gab,
    "prop31": cmd_prop31,
    "verify": cmd_verify,
}


def build_parser():
    """Argument parser with the shared run flags on every subcommand."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--precision-bits', type=int, default=None, help='Working precision in bits')
    common.add_argument('--field-cap', type=int, default=None, help='Largest field size')
    common.add_argument('--table-cap', type=int, default=None, help='Largest field with dense tables')
    common.add_argument('--work-cap', type=int, default=None, help='Largest enumeration')
    common.add_argument('--seed', type=int, default=None, help='Field construction seed')
    common.add_argument('--fft-threshold', type=int, default=None, help='Naive/Bluestein DFT switch')
    common.add_argument('--cache-dir', type=str, default=None, help='Cache directory')
    common.add_argument('--no-cache', action='store_true', help='Disable the field and Gauss caches')
    common.add_argument('--out', type=str, default=None, help='Report output path')
    common.add_argument('--workers', type=int, default=None, help='Worker processes')
    common.add_argument('--profile', type=str, default=None, help='Suite profile: quick or full')
    common.add_argument('--force', action='store_true', default=None, help='Run below the term budget')
    common.add_argument('--verbose', action='store_true', help='Debug logging')

    fieldargs = argparse.ArgumentParser(add_help=False)
    fieldargs.add_argument('--q', type=int, default=None, help='Field size')
    fieldargs.add_argument('--p', type=int, default=None, help='Characteristic, with --m instead of --q')
    fieldargs.add_argument('--m', type=int, default=1, help='Extension degree over F_p')

    parser = argparse.ArgumentParser(description='Point counts and moment zeta functions of x_1+...+x_n+1/(x_1...x_n)=lambda')
    sub = parser.add_subparsers(dest='command')

    p = sub.add_parser('count', parents=[common, fieldargs], help='Point count of one fibre')
    p.add_argument('--n', type=int, required=True)
    p.add_argument('--lambda', dest='lam', type=str, required=True, help='Element code or coordinates a0,a1,...')
    p.add_argument('--method', choices=['brute', 'gauss', 'both'], default='both')

    p = sub.add_parser('formulas', parents=[common], help='Combinatorial formula table')
    p.add_argument('--n', type=int, nargs='+', default=[2, 3, 4])
    p.add_argument('--a', type=int, nargs='+', default=[0, 1, 2, 3])
    p.add_argument('--b', type=int, nargs='+', default=None)
    p.add_argument('--alpha-terms', type=int, default=None)
    p.add_argument('--beta-terms', type=int, default=None)

    p = sub.add_parser('zeta0', parents=[common], help='Zeta function of the zero fibre')
    p.add_argument('--p', type=int, required=True)
    p.add_argument('--n', type=int, required=True)
    p.add_argument('--validate', type=int, default=None, metavar='K', help='Check against counts to order K')

    p = sub.add_parser('moment', parents=[common, fieldargs], help='Moment zeta function Z_d')
    p.add_argument('--n', type=int, required=True)
    p.add_argument('--d', type=int, required=True)
    p.add_argument('--terms', type=int, default=None, help='Number of series terms K')
    p.add_argument('--method', choices=['direct', 'charpoly'], default='charpoly')
    p.add_argument('--congruence', type=str, default=None, help='Partner moment and exponent, d2:m')
    p.add_argument('--cross-check', action='store_true', help='Recount directly within caps')

    p = sub.add_parser('gab', parents=[common, fieldargs], help='L-function of Sym^a (x) wedge^b over U')
    p.add_argument('--n', type=int, required=True)
    p.add_argument('--a', type=int, required=True)
    p.add_argument('--b', type=int, required=True)
    p.add_argument('--mode', choices=['divided', 'full'], default='divided')
    p.add_argument('--terms', type=int, default=None)

    p = sub.add_parser('prop31', parents=[common, fieldargs], help='Shape of L(U, F)')
    p.add_argument('--n', type=int, required=True)
    p.add_argument('--terms', type=int, default=None)

    p = sub.add_parser('verify', parents=[common], help='Run a verification suite')
    p.add_argument('suite', type=str, help=f"One of: {', '.join(SUITES)}")

    p = sub.add_parser('bundle', parents=[common], help='Write every suite report and a manifest')
    p.add_argument('--output-dir', type=str, default=None)
    p.add_argument('--suites', type=str, nargs='+', default=None)
    return parser


def main(argv=None):
    """Main entry point for the script."""
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if getattr(args, 'verbose', False) else logging.WARNING,
        format='%(asctime)s %(name)s %(levelname)s %(message)s',
    )
    if args.command is None:
        parser.print_help()
        return EXIT_USAGE
    try:
        config = RunConfig.from_args(args)
        if args.command == 'bundle':
            success, _ = cmd_bundle(args, config)
            return EXIT_OK if success else EXIT_VERIFICATION
        data = COMMANDS[args.command](args, config)
        emit(data, config)
        if args.command == 'verify' and not data["provenance"]["oracle_checked"]:
            return EXIT_VERIFICATION
        return EXIT_OK
    except DworkZetaError as e:
        print(f"Error ({type(e).__name__}): {e}", file=sys.stderr)
        return exit_code_for(e)
    except ValueError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_COMPUTATIONAL


if __name__ == "__main__":
    sys.exit(main())
