"""Family sweeps: configuration, per-prime zero scans with caching, and report assembly."""

from __future__ import annotations

import hashlib
import json
import math
import os
from dataclasses import asdict, dataclass, replace
from multiprocessing import Pool
from pathlib import Path
from typing import Callable, Sequence

from . import __version__
from .density import (
    DensityReport,
    TestFunction,
    WeightFunction,
    family,
    one_level_density,
    prime_row,
)
from .errors import DomainError, NumericError, RangeError, VerificationError
from .gaussian import PrimaryPrime
from .lfunc import LEvaluator
from .quadchar import TABLE_NORM_CAP, HeckeChar
from .ratios import JContext, Q_T_CUT, RatiosPrediction, predicted_density
from .zeros import DEFAULT_TOL, ZeroSet, cached_scan

CACHE_ENV = "HECKE_LOWZEROS_CACHE"
QUICK_TMAX_CAP = 10.0
QUICK_T_CUT = 150.0


def default_cache_dir() -> Path:
    env = os.environ.get(CACHE_ENV)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "hecke_lowzeros"


@dataclass(frozen=True)
class RunConfig:
    x_scale: float = 1e3
    phi: str = "fejer:nu=0.8"
    w: str = "bump:1,2"
    tmax_cap: float = 40.0
    tol: float = DEFAULT_TOL
    max_norm: int | None = None
    jobs: int = 1
    cache_dir: str | None = None
    out: str | None = None
    with_ratios: bool = False
    quick: bool = False

    def validate(self) -> RunConfig:
        if not self.x_scale > 1:
            raise DomainError("--x must exceed 1")
        self.phi_fn
        self.w_fn
        if self.tmax_cap <= 0 or self.tol <= 0:
            raise DomainError("--tmax-cap and --tol must be positive")
        if self.tol < 1e-9:
            raise DomainError("--tol below 1e-9 is not supported")
        if self.jobs < 1:
            raise DomainError("--jobs must be at least 1")
        if self.max_norm is not None and self.max_norm < 1:
            raise DomainError("--max-norm must be positive")
        return self

    @property
    def phi_fn(self) -> TestFunction:
        return TestFunction.parse(self.phi)

    @property
    def w_fn(self) -> WeightFunction:
        return WeightFunction.parse(self.w)

    @property
    def effective_cap(self) -> float:
        return min(self.tmax_cap, QUICK_TMAX_CAP) if self.quick else self.tmax_cap

    @property
    def t_max(self) -> float:
        return self.phi_fn.s_max(self.effective_cap) * 2 * math.pi / math.log(self.x_scale)

    @property
    def t_cut(self) -> float:
        return QUICK_T_CUT if self.quick else Q_T_CUT

    def hash(self) -> str:
        """Digest of every field that can change output bytes."""
        d = asdict(self)
        for k in ("jobs", "cache_dir", "out"):
            d.pop(k)
        d["version"] = __version__
        return hashlib.sha256(json.dumps(d, sort_keys=True).encode()).hexdigest()[:16]


def _table_guard(cfg: RunConfig) -> int:
    return cfg.max_norm if cfg.max_norm is not None else TABLE_NORM_CAP


def scan_prime(p: PrimaryPrime, t_max: float, tol: float, cache_dir: str | None, guard: int) -> ZeroSet:
    ev = LEvaluator.build(HeckeChar(p), t_cap=t_max, afe_height=0.0, max_norm_guard=guard)
    return cached_scan(ev, t_max, tol, cache_dir)


def _scan_task(args) -> ZeroSet:
    try:
        return scan_prime(*args)
    except (DomainError, RangeError, NumericError, VerificationError) as exc:
        exc.args = (f"prime {args[0]}: {exc.args[0] if exc.args else exc}",) + exc.args[1:]
        raise


def sweep(
    cfg: RunConfig,
    primes: Sequence[PrimaryPrime] | None = None,
    progress: Callable[[int, int], None] | None = None,
) -> list[ZeroSet]:
    """Zero sets for every prime in the weight support, in (norm, re, im) order."""
    if primes is None:
        primes = family(cfg.x_scale, cfg.w_fn)
    primes = sorted(primes, key=lambda q: q.key)
    cache = None if cfg.cache_dir is None else str(cfg.cache_dir)
    tasks = [(p, cfg.t_max, cfg.tol, cache, _table_guard(cfg)) for p in primes]
    out: list[ZeroSet] = []
    if cfg.jobs == 1 or len(tasks) < 2:
        for i, task in enumerate(tasks):
            out.append(_scan_task(task))
            if progress:
                progress(i + 1, len(tasks))
    else:
        with Pool(cfg.jobs) as pool:
            for i, zs in enumerate(pool.imap(_scan_task, tasks, chunksize=8)):
                out.append(zs)
                if progress:
                    progress(i + 1, len(tasks))
    return out


@dataclass
class DensityRun:
    config: RunConfig
    primes: list[PrimaryPrime]
    zero_sets: list[ZeroSet]
    report: DensityReport
    ratios: RatiosPrediction | None


def run_density(cfg: RunConfig, progress: Callable[[int, int], None] | None = None) -> DensityRun:
    cfg.validate()
    phi, w, X = cfg.phi_fn, cfg.w_fn, cfg.x_scale
    primes = family(X, w)
    if not primes:
        raise RangeError(f"no primary prime has N/X inside ({w.t0}, {w.t1}) at X={X}")
    zsets = sweep(cfg, primes, progress)
    rows = [prime_row(p, zs, phi, w, X) for p, zs in zip(primes, zsets)]
    h = cfg.hash()
    report = one_level_density(primes, zsets, phi, w, X, rows=rows, config_hash=h)
    ratios = None
    if cfg.with_ratios:
        ratios = predicted_density(primes, w, phi, X, ctx=JContext(phi, X, cfg.t_cut), config_hash=h)
        report.ratios_prediction = ratios.weighted_average
    return DensityRun(cfg, primes, zsets, report, ratios)


def write_outputs(run: DensityRun, out_dir) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    h = run.report.config_hash
    paths = [out / f"density_{h}.json", out / f"per_prime_{h}.csv"]
    paths[0].write_text(run.report.to_json() + "\n")
    paths[1].write_text(run.report.rows_csv())
    if run.ratios is not None:
        p = out / f"ratios_{h}.json"
        p.write_text(run.ratios.to_json() + "\n")
        paths.append(p)
    cfg = out / f"config_{h}.json"
    cfg.write_text(json.dumps({**asdict(replace(run.config, jobs=1, out=None, cache_dir=None)), "hash": h}, indent=2, sort_keys=True) + "\n")
    paths.append(cfg)
    return paths
