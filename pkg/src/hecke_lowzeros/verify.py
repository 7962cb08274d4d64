"""Self-checks run by ``hecke-lowzeros verify``.

Each check names the module it exercises so a failure points somewhere
useful. ``inject="table"`` corrupts one coefficient in every table the
checks build, which must make the table and L-function checks fail.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .gaussian import GaussInt, PrimaryPrime, sieve_primary_primes
from .lfunc import LEvaluator, L_afe, completed_Lambda
from .quadchar import (
    CoefficientTable,
    HeckeChar,
    coefficient_table,
    coefficient_table_multiplicative,
    euler_symbol,
    quad_symbol,
)
from .ratios import A, A_alpha_diag, prime_sum_identity_check
from .special import RESIDUE_ZETA_K, zeta_K
from .zeros import count_check, scan_zeros, verify_ordinates


@dataclass
class CheckResult:
    name: str
    module: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.module}/{self.name}: {self.detail}"


def _corrupt(table: CoefficientTable) -> CoefficientTable:
    sums = table.sums.copy()
    n = int(np.flatnonzero(sums[2:])[0]) + 2
    sums[n] += 1
    return CoefficientTable(table.char, table.max_norm, sums, table.counts.copy())


def _evaluator(p: PrimaryPrime, inject: str | None) -> LEvaluator:
    ev = LEvaluator.build(HeckeChar(p), t_cap=10.0, afe_height=10.0)
    if inject == "table":
        ev = LEvaluator(ev.char, _corrupt(ev.table), ev.x_param, ev.t_cap)
    return ev


def check_symbol_oracle(max_norm: int, per_prime: int) -> CheckResult:
    rng = random.Random(1)
    bad = total = 0
    for w in sieve_primary_primes(max_norm):
        for _ in range(per_prime):
            a = GaussInt(rng.randint(-10**6, 10**6), rng.randint(-10**6, 10**6))
            total += 1
            bad += quad_symbol(a, w.gen) != euler_symbol(a, w)
    return CheckResult("symbol-oracle", "quad_char", bad == 0, f"{bad} mismatches in {total}")


def check_reciprocity(max_norm: int) -> CheckResult:
    ps = sieve_primary_primes(max_norm)
    bad = total = 0
    for i, a in enumerate(ps):
        for b in ps[i + 1 :]:
            total += 1
            bad += quad_symbol(a.gen, b.gen) != quad_symbol(b.gen, a.gen)
    return CheckResult("reciprocity", "quad_char", bad == 0, f"{bad} mismatches in {total} pairs")


def check_tables(primes: list[PrimaryPrime], max_norm: int, inject: str | None) -> CheckResult:
    bad = []
    for p in primes:
        chi = HeckeChar(p)
        fast = coefficient_table(chi, max_norm)
        if inject == "table":
            fast = _corrupt(fast)
        ref = coefficient_table_multiplicative(chi, max_norm)
        if not np.array_equal(fast.sums, ref.sums):
            bad.append(str(p))
    return CheckResult("coefficient-table", "quad_char", not bad, f"mismatch for {bad}" if bad else "vectorised == multiplicative")


def check_afe(primes: list[PrimaryPrime], inject: str | None) -> list[CheckResult]:
    rng = random.Random(2)
    xdef = fedef = 0.0
    for p in primes:
        ev = _evaluator(p, inject)
        rc = math.sqrt(ev.analytic_conductor)
        for s in [0.5] + [complex(rng.uniform(0.25, 0.75), rng.uniform(-8, 8)) for _ in range(3)]:
            vals = [L_afe(ev, s, x=f * rc) for f in (0.5, 1.0, 2.0)]
            xdef = max(xdef, max(abs(v - vals[1]) for v in vals) / (1 + abs(vals[1])))
            lam = completed_Lambda(ev, s)
            ev2 = LEvaluator(ev.char, ev.table, 2 * rc, ev.t_cap)
            fedef = max(fedef, abs(lam - completed_Lambda(ev2, 1 - s)) / (1 + abs(lam)))
    return [
        CheckResult("afe-x-independence", "lfunc", xdef <= 1e-8, f"max defect {xdef:.2e}"),
        CheckResult("functional-equation", "lfunc", fedef <= 1e-8, f"max defect {fedef:.2e}"),
    ]


def check_critical_line(primes: list[PrimaryPrime], inject: str | None) -> CheckResult:
    worst = 0.0
    for p in primes:
        ev = _evaluator(p, inject)
        v = ev.critical_line().on_line(np.linspace(0, 10, 201))
        worst = max(worst, float(np.max(np.abs(v.imag) / (1 + np.abs(v)))))
    return CheckResult("critical-line-reality", "lfunc", worst <= 1e-6, f"max |Im|/(1+|Lambda|) {worst:.2e}")


def check_residue() -> CheckResult:
    eps = 1e-4
    val = complex(eps * zeta_K(1 + eps)).real
    ok = abs(val - RESIDUE_ZETA_K) <= 1e-4
    return CheckResult("pole-residue", "special_fn", ok, f"(s-1) zeta_K(s) at 1+1e-4 = {val:.8f}")


def check_zeros(inject: str | None) -> CheckResult:
    ev = _evaluator(PrimaryPrime.of(-1, 2), inject)
    zs = scan_zeros(ev, 10.0)
    ok = len(zs) > 0 and bool(verify_ordinates(ev, zs).all()) and count_check(zs) == "count-consistent"
    return CheckResult("scan-self-verify", "zeros", ok, f"{len(zs)} zeros below 10, {zs.completeness}")


def check_identity() -> CheckResult:
    c = prime_sum_identity_check(0.1)
    return CheckResult("prime-sum-identity", "ratios", c.defect <= 1e-4, f"defect {c.defect:.2e} at r=0.1")


def check_a_alpha() -> CheckResult:
    rng = random.Random(3)
    worst = 0.0
    h = 1e-6
    for _ in range(20):
        r = complex(rng.uniform(-0.4, 1.0), rng.uniform(-5, 5))
        fd = (A(r + h, r) - A(r - h, r)) / (2 * h)
        worst = max(worst, abs(fd - A_alpha_diag(r)))
    return CheckResult("A-alpha-closed-form", "ratios", worst <= 1e-6, f"max finite-difference gap {worst:.2e}")


def run_checks(level: str = "fast", inject: str | None = None, echo: Callable[[str], None] | None = None) -> list[CheckResult]:
    if level not in ("fast", "full"):
        raise ValueError("level must be 'fast' or 'full'")
    full = level == "full"
    sample = [PrimaryPrime.of(-1, 2), PrimaryPrime.of(-3, 0), PrimaryPrime.of(5, -4), PrimaryPrime.of(-11, 0)]
    if full:
        sample += [sieve_primary_primes(10_050, 9_990)[0]]
    jobs: list[tuple[str, str, Callable[[], CheckResult | list[CheckResult]]]] = [
        ("symbol-oracle", "quad_char", lambda: check_symbol_oracle(10_000 if full else 1_000, 100 if full else 10)),
        ("reciprocity", "quad_char", lambda: check_reciprocity(1_000 if full else 300)),
        ("coefficient-table", "quad_char", lambda: check_tables(sample[:3], 3_000, inject)),
        ("afe", "lfunc", lambda: check_afe(sample, inject)),
        ("critical-line-reality", "lfunc", lambda: check_critical_line(sample, inject)),
        ("pole-residue", "special_fn", check_residue),
        ("scan-self-verify", "zeros", lambda: check_zeros(inject)),
        ("A-alpha-closed-form", "ratios", check_a_alpha),
    ]
    if full:
        jobs.append(("prime-sum-identity", "ratios", check_identity))
    out: list[CheckResult] = []
    for name, module, job in jobs:
        try:
            res = job()
        except Exception as exc:  # a crashing check is a failing check
            res = CheckResult(name, module, False, f"{type(exc).__name__}: {exc}")
        for r in res if isinstance(res, list) else [res]:
            out.append(r)
            if echo:
                echo(r.line())
    return out
