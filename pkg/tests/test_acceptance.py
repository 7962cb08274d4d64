"""Acceptance criteria, each at its stated tolerance.

The density runs at X = 1e3, 1e4 and 1e5 share the zero cache in
``$HECKE_LOWZEROS_CACHE`` (default ``~/.cache/hecke_lowzeros``). A cold
run takes roughly 45 minutes on one core; a warm one under a minute.
"""

from __future__ import annotations

import math
import random
import time

import numpy as np
import pytest

from hecke_lowzeros.density import (
    explicit_formula_diagnostic,
    big_W,
    mellin_w,
    nonvanishing_report,
    weighted_power_diagnostic,
)
from hecke_lowzeros.gaussian import sieve_primary_primes
from hecke_lowzeros.lfunc import LEvaluator, L_afe, completed_Lambda
from hecke_lowzeros.quadchar import HeckeChar
from hecke_lowzeros.sweep import RunConfig, default_cache_dir, run_density
from hecke_lowzeros.verify import check_a_alpha, check_reciprocity, check_residue, check_symbol_oracle
from hecke_lowzeros.ratios import prime_sum_identity_check

X_GRID = (1e3, 1e4, 1e5)


@pytest.fixture(scope="module")
def runs():
    cache = str(default_cache_dir())
    return {X: run_density(RunConfig(x_scale=X, with_ratios=True, cache_dir=cache)) for X in X_GRID}


def test_c01_symbol_matches_euler_oracle(criterion):
    t0 = time.perf_counter()
    res = check_symbol_oracle(10_000, 100)
    dt = time.perf_counter() - t0
    ok = criterion(1, res.passed and dt < 60, f"{res.detail}, {dt:.1f}s")
    assert ok


def test_c02_reciprocity(criterion):
    res = check_reciprocity(1_000)
    assert criterion(2, res.passed, res.detail)


def test_c03_functional_equation_and_split_independence(criterion):
    t0 = time.perf_counter()
    pool = sieve_primary_primes(10_000)
    chars, seen = [], set()
    for target in np.geomspace(5, 10_000, 20):
        p = next(q for q in reversed(pool) if q.norm <= target and q.key not in seen)
        seen.add(p.key)
        chars.append(p)
    rng = random.Random(2024)
    fe = xi = 0.0
    for p in chars:
        chi = HeckeChar(p)
        rc = math.sqrt(128 * p.norm)
        ev1 = LEvaluator.build(chi, t_cap=8.0, afe_height=8.0, x_param=rc)
        ev2 = LEvaluator.build(chi, t_cap=8.0, afe_height=8.0, x_param=2 * rc)
        for _ in range(50):
            s = complex(rng.uniform(0.25, 0.75), rng.uniform(-8.0, 8.0))
            lam = completed_Lambda(ev1, s)
            fe = max(fe, abs(lam - completed_Lambda(ev2, 1 - s)) / (1 + abs(lam)))
            l1 = L_afe(ev1, s)
            xi = max(xi, abs(l1 - L_afe(ev2, s)) / (1 + abs(l1)))
    dt = time.perf_counter() - t0
    ok = fe <= 1e-8 and xi <= 1e-8 and dt < 600
    detail = f"20 chars, norms {chars[0].norm}..{chars[-1].norm}, FE {fe:.1e}, x-doubling {xi:.1e}, {dt:.0f}s"
    assert criterion(3, ok, detail)


def test_c04_critical_line_reality(criterion, runs):
    worst = max(z.imag_defect for r in runs.values() for z in r.zero_sets)
    n = sum(len(r.zero_sets) for r in runs.values())
    assert criterion(4, worst <= 1e-6, f"max |Im|/(1+|Lambda|) = {worst:.1e} over {n} characters")


def test_c05_symplectic_limit_trend(criterion, runs):
    gaps = [abs(runs[X].report.d_corrected - 0.75) for X in X_GRID]
    ok = gaps[0] > gaps[1] > gaps[2] and gaps[2] <= 0.15
    detail = "|D - 0.75| = " + ", ".join(f"{g:.4f}" for g in gaps)
    assert criterion(5, ok, detail)


def test_c06_ratios_prediction(criterion, runs):
    rows = []
    ok = True
    for X in (1e4, 1e5):
        rep = runs[X].report
        d = rep.d_corrected
        to_pred, to_lim = abs(d - rep.ratios_prediction), abs(d - rep.usp_limit)
        ok &= to_pred <= to_lim
        rows.append(f"X={X:.0e}: D={d:.4f} pred={rep.ratios_prediction:.4f} |D-pred|={to_pred:.4f}")
    ok &= abs(runs[1e5].report.d_corrected - runs[1e5].report.ratios_prediction) <= 0.05
    assert criterion(6, ok, "; ".join(rows))


def test_c07_explicit_formula(criterion, runs):
    X = 1e4
    run = runs[X]
    phi, w = run.config.phi_fn, run.config.w_fn
    wts = np.array([float(w(p.norm / X)) for p in run.primes])
    defects = np.array(
        [explicit_formula_diagnostic(HeckeChar(p), phi, X, zs).defect for p, zs in zip(run.primes, run.zero_sets)]
    )
    avg = float(np.dot(wts, np.abs(defects)) / wts.sum())
    bound = 5 * math.log(math.log(3 * X)) / math.log(X)
    assert criterion(7, avg <= bound, f"weighted mean |defect| {avg:.4f} <= {bound:.4f}")


def test_c08_weight_asymptotics(criterion, runs):
    w = RunConfig().w_fn
    m1 = mellin_w(w, 1.0).real
    ratio, power = [], []
    for X in X_GRID:
        L = math.log(X)
        W = big_W(runs[X].primes, w, X, coverage=w.t1 * X)
        ratio.append(abs(W * L / (X * m1) - 1))
        lhs, ref = weighted_power_diagnostic(runs[X].primes, w, X, 2j * math.pi * 0.5 / L)
        power.append(abs(lhs - ref))
    ok = ratio[2] <= 0.3 and ratio[0] > ratio[1] > ratio[2] and power[0] > power[1] > power[2]
    detail = "W defect " + ", ".join(f"{r:.3f}" for r in ratio) + "; power defect " + ", ".join(f"{p:.3f}" for p in power)
    assert criterion(8, ok, detail)


def test_c09_nonvanishing(criterion, runs):
    rep = nonvanishing_report(runs[1e4].zero_sets)
    detail = f"{rep.fraction:.4f} of {rep.total}; central zeros: {rep.central_zeros or 'none'}"
    if rep.near_zero:
        detail += f"; near zero: {rep.near_zero}"
    assert criterion(9, rep.fraction >= 0.75, detail)


def test_c10_ratios_identities(criterion):
    ident = prime_sum_identity_check(0.1, cap=10_000_000)
    aa = check_a_alpha()
    res = check_residue()
    ok = ident.defect <= 1e-4 and aa.passed and res.passed
    assert criterion(10, ok, f"identity defect {ident.defect:.1e}; {aa.detail}; {res.detail}")
