"""Critical-line zeros: grid scan, bisection, completeness checks, CSV cache."""

from __future__ import annotations

import csv
import hashlib
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .gaussian import GaussInt, PrimaryPrime
from .lfunc import CriticalLineEvaluator, LEvaluator, check_real, lambda_scale

DEFAULT_TOL = 1e-9
DIP_RATIO = 1e-3
CENTRAL_RATIO = 1e-8
COUNT_CONST = 2.0
_DIP_WINDOW = 5
_DIP_REFINE = 64


@dataclass
class ZeroSet:
    prime: PrimaryPrime
    t_max: float
    ordinates: np.ndarray
    tol: float
    grid_spacing: float
    central_value: float = float("nan")
    central_scale: float = float("nan")
    suspicious: list[tuple[float, float]] = field(default_factory=list)
    # max |Im Lambda| / (1 + |Lambda|) and max |Im Lambda| / scale over the scan grid
    imag_defect: float = 0.0
    imag_scale_ratio: float = 0.0

    @property
    def conductor(self) -> int:
        return 128 * self.prime.norm

    @property
    def central_zero(self) -> bool:
        return bool(abs(self.central_value) <= CENTRAL_RATIO * self.central_scale)

    @property
    def completeness(self) -> str:
        if self.suspicious or count_check(self) != "count-consistent":
            return "suspicious"
        return "count-consistent"

    def __len__(self) -> int:
        return int(self.ordinates.size)


def grid_spacing(conductor: float, t_max: float) -> float:
    return min(0.25, math.pi / (2 * math.log(conductor) * (1 + t_max / 10)))


def _bisect(cl: CriticalLineEvaluator, lo: np.ndarray, hi: np.ndarray, zlo: np.ndarray, tol: float):
    lo, hi, zlo = lo.copy(), hi.copy(), zlo.copy()
    while lo.size and np.max(hi - lo) > tol:
        mid = 0.5 * (lo + hi)
        zm = cl.hardy_Z(mid)
        left = np.sign(zm) == np.sign(zlo)
        lo = np.where(left, mid, lo)
        zlo = np.where(left, zm, zlo)
        hi = np.where(left, hi, mid)
    return 0.5 * (lo + hi)


def _sign_change_brackets(t: np.ndarray, z: np.ndarray):
    s = np.sign(z)
    k = np.flatnonzero(s[:-1] * s[1:] < 0)
    exact = np.flatnonzero(s == 0)
    return k, exact


def scan_zeros(ev: LEvaluator, t_max: float, tol: float = DEFAULT_TOL, refine: int = 1) -> ZeroSet:
    """All sign changes of ``hardy_Z`` on ``(0, t_max]``, bisected to ``tol``.

    ``refine`` divides the default grid spacing, which is used by the
    resolution-stability check.
    """
    if t_max <= 0:
        raise ValueError("t_max must be positive")
    if tol < 1e-9 * (1 - 1e-12):
        raise ValueError("tol below 1e-9 is not supported")
    cond = ev.analytic_conductor
    cl = ev.critical_line(t_max)
    h = grid_spacing(cond, t_max) / refine
    n = int(math.ceil(t_max / h))
    t = np.linspace(0.0, t_max, n + 1)
    zc = cl.on_line(t)
    check_real(zc, t, ev)
    z = zc.real
    scale = lambda_scale(cond, t)
    zn = z / scale
    k, exact = _sign_change_brackets(t, zn)
    roots = [_bisect(cl, t[k], t[k + 1], z[k], tol)]
    roots.append(t[exact[exact > 0]])
    suspicious = []
    for lo, hi in _dips(t, zn):
        tt = np.linspace(lo, hi, _DIP_REFINE + 1)
        zz = cl.hardy_Z(tt)
        kk, ex = _sign_change_brackets(tt, zz)
        if kk.size:
            roots.append(_bisect(cl, tt[kk], tt[kk + 1], zz[kk], tol))
            roots.append(tt[ex])
        else:
            suspicious.append((float(lo), float(hi)))
    gam = np.unique(np.concatenate(roots))
    gam = gam[(gam > 0) & (gam <= t_max)]
    return ZeroSet(
        prime=ev.prime,
        t_max=float(t_max),
        ordinates=gam,
        tol=float(tol),
        grid_spacing=float(h),
        central_value=float(z[0]),
        central_scale=float(lambda_scale(cond, 0.0)),
        suspicious=suspicious,
        imag_defect=float(np.max(np.abs(zc.imag) / (1 + np.abs(zc)))),
        imag_scale_ratio=float(np.max(np.abs(zc.imag) / scale)),
    )


def _dips(t: np.ndarray, zn: np.ndarray) -> list[tuple[float, float]]:
    """Local minima of ``|Z|`` far below the neighbourhood maximum with no sign change."""
    a = np.abs(zn)
    out = []
    if a.size < 3:
        return out
    s = np.sign(zn)
    for k in range(1, a.size - 1):
        if a[k] > a[k - 1] or a[k] > a[k + 1]:
            continue
        if s[k - 1] != s[k] or s[k] != s[k + 1]:
            continue
        local = a[max(0, k - _DIP_WINDOW) : k + _DIP_WINDOW + 1].max()
        if a[k] < DIP_RATIO * local:
            out.append((t[k - 1], t[k + 1]))
    return out


def verify_ordinates(ev: LEvaluator, zs: ZeroSet) -> np.ndarray:
    """Boolean mask: ``hardy_Z(g - tol) * hardy_Z(g + tol) < 0`` for each ordinate."""
    if not len(zs):
        return np.zeros(0, dtype=bool)
    cl = ev.critical_line(zs.t_max)
    lo = cl.hardy_Z(zs.ordinates - zs.tol)
    hi = cl.hardy_Z(zs.ordinates + zs.tol)
    return lo * hi < 0


def smooth_count(conductor: float, T: float) -> float:
    """Expected number of zeros with ``0 < gamma <= T``."""
    if T <= 0:
        return 0.0
    return T / math.pi * math.log(math.sqrt(conductor) * T / (2 * math.pi * math.e))


def count_check(zs: ZeroSet, T: float | None = None, const: float = COUNT_CONST) -> str:
    """Compare the zero count on ``(0, T]`` with the smooth count."""
    T = zs.t_max if T is None else T
    if T <= 0:
        return "count-consistent"
    cnt = int(np.count_nonzero(zs.ordinates <= T))
    band = const * math.log(zs.conductor * (2 + T))
    return "count-consistent" if abs(cnt - smooth_count(zs.conductor, T)) <= band else "count-deviation"


def scaled_zeros(zs: ZeroSet, X: float) -> np.ndarray:
    """Sorted ``+-gamma log X / (2 pi)``; a central zero enters with multiplicity 2."""
    if X <= 1:
        raise ValueError("X must exceed 1")
    g = zs.ordinates * (math.log(X) / (2 * math.pi))
    parts = [-g[::-1], np.zeros(2 if zs.central_zero else 0), g]
    return np.concatenate(parts)


def cache_key(t_max: float, tol: float, h: float) -> str:
    raw = f"{t_max!r}|{tol!r}|{h!r}|{__version__}"
    return hashlib.sha256(raw.encode()).hexdigest()[:12]


def zero_cache_path(cache_dir, prime: PrimaryPrime, t_max: float, tol: float) -> Path:
    h = grid_spacing(128 * prime.norm, t_max)
    return Path(cache_dir) / "zeros" / f"z_{prime.re}_{prime.im}_{cache_key(t_max, tol, h)}.csv"


_META = (
    "t_max",
    "tol",
    "grid_spacing",
    "version",
    "central_value",
    "central_scale",
    "imag_defect",
    "imag_scale_ratio",
    "suspicious",
)


def save_zero_set(zs: ZeroSet, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    susp = ";".join(f"{a!r}:{b!r}" for a, b in zs.suspicious)
    meta = {
        "t_max": repr(zs.t_max),
        "tol": repr(zs.tol),
        "grid_spacing": repr(zs.grid_spacing),
        "version": __version__,
        "central_value": repr(zs.central_value),
        "central_scale": repr(zs.central_scale),
        "imag_defect": repr(zs.imag_defect),
        "imag_scale_ratio": repr(zs.imag_scale_ratio),
        "suspicious": susp,
    }
    tmp = path.with_suffix(".tmp")
    with open(tmp, "w", newline="") as fh:
        for k in _META:
            fh.write(f"# {k}={meta[k]}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["re", "im", "norm", "gamma"])
        for g in zs.ordinates.tolist():
            w.writerow([zs.prime.re, zs.prime.im, zs.prime.norm, repr(g)])
    tmp.replace(path)
    return path


def load_zero_set(path, prime: PrimaryPrime | None = None) -> ZeroSet:
    meta: dict[str, str] = {}
    rows = []
    with open(path, newline="") as fh:
        lines = fh.read().splitlines()
    body = []
    for line in lines:
        if line.startswith("# "):
            k, _, v = line[2:].partition("=")
            meta[k] = v
        else:
            body.append(line)
    for r in csv.DictReader(body):
        rows.append(r)
    if prime is None:
        if not rows:
            raise ValueError("cannot infer the prime from an empty zero file")
        prime = PrimaryPrime(GaussInt(int(rows[0]["re"]), int(rows[0]["im"])), int(rows[0]["norm"]))
    susp = []
    if meta.get("suspicious"):
        for item in meta["suspicious"].split(";"):
            a, b = item.split(":")
            susp.append((float(a), float(b)))
    return ZeroSet(
        prime=prime,
        t_max=float(meta["t_max"]),
        ordinates=np.array([float(r["gamma"]) for r in rows]),
        tol=float(meta["tol"]),
        grid_spacing=float(meta["grid_spacing"]),
        central_value=float(meta["central_value"]),
        central_scale=float(meta["central_scale"]),
        suspicious=susp,
        imag_defect=float(meta["imag_defect"]),
        imag_scale_ratio=float(meta["imag_scale_ratio"]),
    )


def cached_scan(ev: LEvaluator, t_max: float, tol: float = DEFAULT_TOL, cache_dir=None) -> ZeroSet:
    """``scan_zeros`` with a per-prime CSV cache keyed by (t_max, tol, grid, version)."""
    if cache_dir is None:
        return scan_zeros(ev, t_max, tol)
    path = zero_cache_path(cache_dir, ev.prime, t_max, tol)
    if path.exists():
        zs = load_zero_set(path, ev.prime)
        if zs.t_max == t_max and zs.tol == tol and zs.grid_spacing == grid_spacing(ev.analytic_conductor, t_max):
            return zs
    zs = scan_zeros(ev, t_max, tol)
    save_zero_set(zs, path)
    return zs
