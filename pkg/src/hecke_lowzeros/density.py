"""Test and weight functions, the empirical 1-level density and its diagnostics."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
from scipy import integrate

from .errors import DomainError, RangeError
from .gaussian import PrimaryPrime, sieve_primary_primes
from .quadchar import HeckeChar, char_values
from .zeros import CENTRAL_RATIO, ZeroSet, scaled_zeros

SCHEMA_VERSION = 1
PHI_FLOOR = 1e-6
S_MAX_CAP = 40.0
_BUMP_NODES = 800


@dataclass(frozen=True)
class TestFunction:
    """Even ``phi`` whose Fourier transform is supported in ``[-nu, nu]``.

    ``fejer``: ``phi(x) = (sin(pi nu x) / (pi nu x))^2`` with a triangular
    transform. ``bump``: ``phi_hat`` is a normalised ``exp(-1/(1-(u/nu)^2))``
    and ``phi`` comes from a fixed Gauss-Legendre cosine transform.
    """

    __test__ = False  # not a pytest class

    kind: str = "fejer"
    nu: float = 0.8
    scale: float = 1.0

    def __post_init__(self):
        if self.kind not in ("fejer", "bump"):
            raise DomainError(f"unknown test function {self.kind!r}")
        if not 0 < self.nu < 1:
            raise DomainError("support parameter nu must lie in (0, 1)")

    @classmethod
    def parse(cls, spec: str) -> TestFunction:
        """``fejer:nu=0.8`` or ``bump:nu=0.5``."""
        kind, _, rest = spec.partition(":")
        kw = {}
        for item in filter(None, rest.split(",")):
            k, _, v = item.partition("=")
            if k != "nu":
                raise DomainError(f"unknown test-function option {k!r}")
            kw["nu"] = float(v)
        return cls(kind.strip(), **kw)

    def spec(self) -> str:
        out = f"{self.kind}:nu={self.nu!r}"
        return out if self.scale == 1.0 else out + f"*{self.scale!r}"

    def scaled(self, c: float) -> TestFunction:
        return TestFunction(self.kind, self.nu, self.scale * c)

    @cached_property
    def _bump(self):
        x, w = np.polynomial.legendre.leggauss(_BUMP_NODES)
        u = 0.5 * self.nu * (x + 1)
        wu = 0.5 * self.nu * w
        prof = np.exp(-1.0 / (1.0 - (u / self.nu) ** 2))
        norm = 2 * np.dot(wu, prof)
        return u, wu, prof / norm

    def phi(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.kind == "fejer":
            return self.scale * np.sinc(self.nu * x) ** 2
        u, wu, prof = self._bump
        flat = np.abs(x).ravel()
        out = np.empty(flat.shape)
        step = 4096
        for i in range(0, flat.size, step):
            out[i : i + step] = 2 * (np.cos(2 * np.pi * np.outer(flat[i : i + step], u)) @ (wu * prof))
        return self.scale * out.reshape(x.shape)

    def phi_hat(self, u) -> np.ndarray:
        u = np.abs(np.asarray(u, dtype=float))
        if self.kind == "fejer":
            return self.scale * np.maximum(0.0, 1.0 - u / self.nu) / self.nu
        inside = u < self.nu
        out = np.zeros(u.shape)
        r = u[inside] / self.nu
        out[inside] = np.exp(-1.0 / (1.0 - r * r)) / self._bump_norm
        return self.scale * out

    @cached_property
    def _bump_norm(self) -> float:
        u, wu, _ = self._bump
        return float(2 * np.dot(wu, np.exp(-1.0 / (1.0 - (u / self.nu) ** 2))))

    @property
    def phi0(self) -> float:
        return float(self.phi(0.0))

    @property
    def phi_hat0(self) -> float:
        return float(self.phi_hat(0.0))

    @property
    def usp_limit(self) -> float:
        """``int phi(x) (1 - sin(2 pi x)/(2 pi x)) dx = phi_hat(0) - phi(0)/2``."""
        return self.phi_hat0 - self.phi0 / 2

    def s_max(self, cap: float = S_MAX_CAP) -> float:
        """Scaled height beyond which ``|phi|`` stays below ``PHI_FLOOR * phi(0)``, capped."""
        if self.kind == "fejer":
            # envelope 1/(pi nu x)^2
            return min(cap, 1.0 / (math.pi * self.nu * math.sqrt(PHI_FLOOR)))
        x = np.linspace(0, cap, 8001)
        big = np.flatnonzero(np.abs(self.phi(x)) >= PHI_FLOOR * abs(self.phi0))
        return float(min(cap, x[big[-1] + 1] if big[-1] + 1 < x.size else cap))

    def tail_integral(self, a: float, slope: float, offset: float) -> float:
        """``int_a^inf phi(x) (offset + slope log x) dx`` for the smooth zero density."""
        if self.kind == "fejer":
            # phi = (1 - cos(2 pi nu x)) / (2 (pi nu x)^2): exact non-oscillatory part plus QAWF
            k = 1.0 / (2 * (math.pi * self.nu) ** 2) * self.scale
            smooth = k * (offset / a + slope * (math.log(a) + 1) / a)
            osc, _ = integrate.quad(
                lambda x: k * (offset + slope * math.log(x + a)) / (x + a) ** 2,
                0,
                np.inf,
                weight="cos",
                wvar=2 * math.pi * self.nu,
                limlst=200,
            )
            cphase = math.cos(2 * math.pi * self.nu * a)
            sphase = math.sin(2 * math.pi * self.nu * a)
            osc_s, _ = integrate.quad(
                lambda x: k * (offset + slope * math.log(x + a)) / (x + a) ** 2,
                0,
                np.inf,
                weight="sin",
                wvar=2 * math.pi * self.nu,
                limlst=200,
            )
            # cos(w(x+a)) = cos(wx)cos(wa) - sin(wx)sin(wa)
            return smooth - (cphase * osc - sphase * osc_s)
        val, _ = integrate.quad(lambda x: float(self.phi(x)) * (offset + slope * math.log(x)), a, a + 200, limit=400)
        return val


@dataclass(frozen=True)
class WeightFunction:
    """Smooth bump ``exp(-1/(t - t0) - 1/(t1 - t))`` on ``[t0, t1]`` with peak ``scale``."""

    t0: float = 1.0
    t1: float = 2.0
    scale: float = 1.0

    def __post_init__(self):
        if not 0 < self.t0 < self.t1:
            raise DomainError("weight support must be an interval inside (0, inf)")

    @classmethod
    def parse(cls, spec: str) -> WeightFunction:
        kind, _, rest = spec.partition(":")
        if kind.strip() != "bump":
            raise DomainError(f"unknown weight {kind!r}")
        a, b = (float(v) for v in rest.split(","))
        return cls(a, b)

    def spec(self) -> str:
        out = f"bump:{self.t0!r},{self.t1!r}"
        return out if self.scale == 1.0 else out + f"*{self.scale!r}"

    def scaled(self, c: float) -> WeightFunction:
        return WeightFunction(self.t0, self.t1, self.scale * c)

    def __call__(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape)
        inside = (t > self.t0) & (t < self.t1)
        ti = t[inside]
        peak = -4.0 / (self.t1 - self.t0)
        out[inside] = np.exp(-1.0 / (ti - self.t0) - 1.0 / (self.t1 - ti) - peak)
        return self.scale * out


def family(X: float, w: WeightFunction) -> list[PrimaryPrime]:
    """Primary primes with ``w(N/X) > 0``, in (norm, re, im) order."""
    return sieve_primary_primes(int(math.floor(w.t1 * X)), int(math.floor(w.t0 * X)))


def _weights(primes: Sequence[PrimaryPrime], w: WeightFunction, X: float) -> np.ndarray:
    return w(np.array([p.norm for p in primes], dtype=float) / X)


def _check_coverage(w: WeightFunction, X: float, coverage: float | None) -> None:
    if coverage is not None and coverage < w.t1 * X:
        raise RangeError(f"prime list covers norms up to {coverage}, need {w.t1 * X}")


def big_W(primes: Sequence[PrimaryPrime], w: WeightFunction, X: float, coverage: float | None = None) -> float:
    """``W(X) = sum w(N(p)/X)`` over the given primes."""
    _check_coverage(w, X, coverage)
    return math.fsum(_weights(primes, w, X).tolist())


def mellin_w(w: WeightFunction, s: complex) -> complex:
    """``int w(t) t^(s-1) dt`` by adaptive quadrature."""
    s = complex(s)

    def part(t: float, k: int) -> float:
        v = complex(w(t)) * t ** (s - 1)
        return v.real if k == 0 else v.imag

    pts = np.linspace(w.t0, w.t1, int(8 + abs(s.imag) * (w.t1 - w.t0) / 2) + 1)
    re = im = 0.0
    for a, b in zip(pts[:-1], pts[1:]):
        re += integrate.quad(part, a, b, args=(0,), epsabs=1e-13, epsrel=1e-12, limit=200)[0]
        im += integrate.quad(part, a, b, args=(1,), epsabs=1e-13, epsrel=1e-12, limit=200)[0]
    return complex(re, im)


def zero_density_tail(phi: TestFunction, zs: ZeroSet, X: float) -> float:
    """Expected ``sum phi(gamma~)`` over zeros with ``|gamma| > t_max``.

    Uses the smooth density ``(1/2 pi) log(C t^2 / (4 pi^2))`` for both signs.
    """
    L = math.log(X)
    a = zs.t_max * L / (2 * math.pi)
    # in x = t L / 2 pi: 2 * (1/2pi) log(C t^2/4pi^2) dt = (2/L) (log(C/L^2) + 2 log x) dx
    offset = 2.0 / L * math.log(zs.conductor / L**2)
    slope = 4.0 / L
    return phi.tail_integral(a, slope, offset)


@dataclass
class PrimeRow:
    re: int
    im: int
    norm: int
    weight: float
    zero_sum: float
    n_zeros: int
    central_zero: bool
    tail: float
    status: str = "count-consistent"


@dataclass
class DensityReport:
    X: float
    phi: str
    w: str
    big_w: float
    d_value: float
    tail_correction: float
    usp_limit: float
    ratios_prediction: float | None = None
    config_hash: str = ""
    per_prime: list[PrimeRow] = field(default_factory=list)
    schema_version: int = SCHEMA_VERSION

    @property
    def d_corrected(self) -> float:
        return self.d_value + self.tail_correction

    def recompute(self) -> tuple[float, float]:
        """``(d_value, tail_correction)`` rebuilt from the per-prime rows."""
        ws = [r.weight for r in self.per_prime]
        bw = math.fsum(ws)
        d = math.fsum(r.weight * r.zero_sum for r in self.per_prime) / bw
        tail = math.fsum(r.weight * r.tail for r in self.per_prime) / bw
        return d, tail

    def to_json(self) -> str:
        d = asdict(self)
        d.pop("per_prime")
        d["d_corrected"] = self.d_corrected
        d["n_primes"] = len(self.per_prime)
        return json.dumps(d, indent=2, sort_keys=True)

    def rows_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        names = [f for f in PrimeRow.__dataclass_fields__]
        wr.writerow(names + ["schema_version"])
        for r in self.per_prime:
            vals = [repr(v) if isinstance(v, float) else v for v in (getattr(r, n) for n in names)]
            wr.writerow(vals + [self.schema_version])
        return buf.getvalue()

    @classmethod
    def from_files(cls, json_text: str, csv_text: str) -> DensityReport:
        d = json.loads(json_text)
        d.pop("d_corrected", None)
        d.pop("n_primes", None)
        rows = []
        for r in csv.DictReader(io.StringIO(csv_text)):
            if int(r["schema_version"]) != d["schema_version"]:
                raise ValueError("per-prime rows and report disagree on schema_version")
            rows.append(
                PrimeRow(
                    int(r["re"]),
                    int(r["im"]),
                    int(r["norm"]),
                    float(r["weight"]),
                    float(r["zero_sum"]),
                    int(r["n_zeros"]),
                    r["central_zero"] == "True",
                    float(r["tail"]),
                    r["status"],
                )
            )
        return cls(per_prime=rows, **d)


def zero_sum(phi: TestFunction, zs: ZeroSet, X: float) -> float:
    return math.fsum(phi.phi(scaled_zeros(zs, X)).tolist())


def prime_row(p: PrimaryPrime, zs: ZeroSet, phi: TestFunction, w: WeightFunction, X: float) -> PrimeRow:
    return PrimeRow(
        p.re,
        p.im,
        p.norm,
        float(w(p.norm / X)),
        zero_sum(phi, zs, X),
        len(zs),
        zs.central_zero,
        zero_density_tail(phi, zs, X),
        zs.completeness,
    )


def one_level_density(
    primes: Sequence[PrimaryPrime],
    zero_sets: dict | Sequence[ZeroSet],
    phi: TestFunction,
    w: WeightFunction,
    X: float,
    rows: Sequence[PrimeRow] | None = None,
    config_hash: str = "",
) -> DensityReport:
    """Weighted family average of ``sum_j phi(gamma~_j)``.

    ``d_value`` uses the zeros actually found; ``tail_correction`` adds the
    smooth-density estimate for zeros above each scan height.
    """
    if rows is None:
        if not isinstance(zero_sets, dict):
            zero_sets = {z.prime.key: z for z in zero_sets}
        rows = []
        for p in sorted(primes, key=lambda q: q.key):
            if w(p.norm / X) == 0:
                continue
            zs = zero_sets.get(p.key)
            if zs is None:
                raise RangeError(f"no zero set for {p}")
            rows.append(prime_row(p, zs, phi, w, X))
    rows = list(rows)
    if not rows:
        raise RangeError("empty family")
    rep = DensityReport(
        X=float(X),
        phi=phi.spec(),
        w=w.spec(),
        big_w=math.fsum(r.weight for r in rows),
        d_value=0.0,
        tail_correction=0.0,
        usp_limit=phi.usp_limit,
        config_hash=config_hash,
        per_prime=rows,
    )
    rep.d_value, rep.tail_correction = rep.recompute()
    return rep


_PRIME_ARRAYS: dict[int, tuple[np.ndarray, np.ndarray, np.ndarray]] = {}


def _prime_arrays(limit: int):
    if limit not in _PRIME_ARRAYS:
        ps = sieve_primary_primes(limit) if limit >= 5 else []
        _PRIME_ARRAYS[limit] = (
            np.array([p.re for p in ps], dtype=np.int64),
            np.array([p.im for p in ps], dtype=np.int64),
            np.array([p.norm for p in ps], dtype=np.float64),
        )
    return _PRIME_ARRAYS[limit]


def primes_side(chi: HeckeChar, phi: TestFunction, X: float) -> float:
    """``sum chi(p) log N(p) / sqrt N(p) * phi_hat(log N(p) / log X)`` over ``N(p) <= X^nu``."""
    limit = int(math.floor(X**phi.nu * (1 + 1e-12)))
    re, im, n = _prime_arrays(limit)
    if n.size == 0:
        return 0.0
    vals = char_values(chi, re, im).astype(float)
    terms = vals * np.log(n) / np.sqrt(n) * phi.phi_hat(np.log(n) / math.log(X))
    return math.fsum(terms.tolist())


@dataclass
class ExplicitFormula:
    lhs: float
    rhs: float

    @property
    def defect(self) -> float:
        return self.lhs - self.rhs


def explicit_formula_diagnostic(
    chi: HeckeChar, phi: TestFunction, X: float, zs: ZeroSet, with_tail: bool = True
) -> ExplicitFormula:
    """Zero side versus ``phi_hat(0) log N(c)/log X - phi(0)/2 - 2 S(chi, X; phi_hat) / log X``.

    ``N(c) = 32 N(w)`` is the norm of the modulus ``(1+i)^5 w``. The prime
    sum is divided by ``log X`` so every term is O(1); what remains in the
    defect is the archimedean part, about ``phi_hat(0) log(1/pi^2) / log X``.
    """
    lhs = zero_sum(phi, zs, X) + (zero_density_tail(phi, zs, X) if with_tail else 0.0)
    L = math.log(X)
    rhs = phi.phi_hat0 * math.log(chi.conductor_norm) / L - 0.5 * phi.phi0 - 2 * primes_side(chi, phi, X) / L
    return ExplicitFormula(lhs, rhs)


def weighted_power_diagnostic(primes: Sequence[PrimaryPrime], w: WeightFunction, X: float, z: complex):
    """``((1/W) sum w(N/X) N^-z, X^-z)``."""
    z = complex(z)
    if abs(z) > 1 or not 0 <= z.real <= 0.5:
        raise RangeError("z must satisfy |z| <= 1 and 0 <= Re z <= 1/2")
    wt = _weights(primes, w, X)
    n = np.array([p.norm for p in primes], dtype=float)
    bw = math.fsum(wt.tolist())
    if bw == 0:
        raise RangeError("no prime in the weight support")
    terms = wt * np.exp(-z * np.log(n))
    lhs = complex(math.fsum(terms.real.tolist()), math.fsum(terms.imag.tolist())) / bw
    return lhs, complex(np.exp(-z * math.log(X)))


@dataclass
class NonvanishingReport:
    fraction: float | None
    total: int
    central_zeros: list[str]
    near_zero: list[tuple[str, float]]


def nonvanishing_report(zero_sets: Iterable[ZeroSet], ratio: float = CENTRAL_RATIO, near: float = 1e-4) -> NonvanishingReport:
    """Share of characters whose ``|Lambda(1/2)|`` exceeds ``ratio`` times its scale."""
    zs = list(zero_sets)
    if not zs:
        return NonvanishingReport(None, 0, [], [])
    rel = [abs(z.central_value) / z.central_scale for z in zs]
    zero = [str(z.prime) for z, r in zip(zs, rel) if r <= ratio]
    close = [(str(z.prime), r) for z, r in zip(zs, rel) if r <= near]
    return NonvanishingReport(1 - len(zero) / len(zs), len(zs), zero, close)
