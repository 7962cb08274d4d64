"""Command-line entry point: ``sieve``, ``density`` and ``verify``.

Exit codes: 0 success, 2 configuration error, 3 numeric failure,
4 verification failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import DomainError, NumericError, RangeError, VerificationError
from .gaussian import sieve_primary_primes, write_primes_csv
from .sweep import RunConfig, default_cache_dir, run_density, write_outputs
from .verify import run_checks

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_VERIFY = 0, 2, 3, 4


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hecke-lowzeros", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="cmd", required=True)

    sv = sub.add_parser("sieve", help="list primary Gaussian primes as CSV")
    sv.add_argument("--max-norm", type=int, required=True)
    sv.add_argument("--out", help="output file (default: stdout)")

    de = sub.add_parser("density", help="empirical 1-level density for one X")
    de.add_argument("--x", type=float, default=1e3, help="family scale X")
    de.add_argument("--max-norm", type=int, default=None, help="cap on coefficient-table length")
    de.add_argument("--phi", default="fejer:nu=0.8", help="fejer:nu=V or bump:nu=V")
    de.add_argument("--w", default="bump:1,2", help="bump:T0,T1")
    de.add_argument("--tmax-cap", type=float, default=40.0, help="cap on the scaled scan height")
    de.add_argument("--tol", type=float, default=1e-9, help="bisection tolerance")
    de.add_argument("--jobs", type=int, default=1)
    de.add_argument("--cache-dir", default=None, help="defaults to $HECKE_LOWZEROS_CACHE or ~/.cache")
    de.add_argument("--no-cache", action="store_true")
    de.add_argument("--out", default=".", help="output directory")
    de.add_argument("--with-ratios", action="store_true")
    de.add_argument("--quick", action="store_true", help="lower scan height and ratios cut-off")

    ve = sub.add_parser("verify", help="run the self-check suite")
    ve.add_argument("--level", choices=("fast", "full"), default="fast")
    ve.add_argument("--inject-fault", choices=("table",), default=None, help=argparse.SUPPRESS)
    return ap


def _cmd_sieve(args) -> int:
    if args.max_norm < 0:
        raise DomainError("--max-norm must be non-negative")
    primes = sieve_primary_primes(args.max_norm) if args.max_norm >= 5 else []
    if args.out:
        write_primes_csv(primes, args.out)
    else:
        sys.stdout.write("re,im,norm\n")
        for p in primes:
            sys.stdout.write(f"{p.re},{p.im},{p.norm}\n")
    return EXIT_OK


def _cmd_density(args) -> int:
    cache = None if args.no_cache else str(args.cache_dir or default_cache_dir())
    cfg = RunConfig(
        x_scale=args.x,
        phi=args.phi,
        w=args.w,
        tmax_cap=args.tmax_cap,
        tol=args.tol,
        max_norm=args.max_norm,
        jobs=args.jobs,
        cache_dir=cache,
        out=args.out,
        with_ratios=args.with_ratios,
        quick=args.quick,
    ).validate()

    def progress(i: int, n: int) -> None:
        if i == n or i % 100 == 0:
            print(f"scanned {i}/{n}", file=sys.stderr)

    run = run_density(cfg, progress)
    paths = write_outputs(run, Path(args.out))
    rep = run.report
    summary = {
        "config_hash": rep.config_hash,
        "X": rep.X,
        "n_primes": len(rep.per_prime),
        "d_value": rep.d_value,
        "d_corrected": rep.d_corrected,
        "usp_limit": rep.usp_limit,
        "ratios_prediction": rep.ratios_prediction,
        "outputs": [str(p) for p in paths],
    }
    print(json.dumps(summary, indent=2))
    return EXIT_OK


def _cmd_verify(args) -> int:
    results = run_checks(args.level, args.inject_fault, echo=print)
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return EXIT_VERIFY if failed else EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    handlers = {"sieve": _cmd_sieve, "density": _cmd_density, "verify": _cmd_verify}
    try:
        return handlers[args.cmd](args)
    except (DomainError, RangeError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except VerificationError as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        return EXIT_VERIFY


if __name__ == "__main__":
    sys.exit(main())
