"""Ratios-conjecture prediction for the 1-level density.

The per-prime integral is

    J(w) = (1/2pi) int_R ( 2 zK'/zK(1+2it) + 2 A_a(it,it) + log(32 N/pi^2)
                          + psi(1/2-it) + psi(1/2+it) + Q(t) ) phi(t L/2pi) dt,
    Q(t) = -(8/pi) X_w(1/2+it) zK(1-2it) A(-it,it),     L = log X.

The first two terms and ``Q`` each have a simple pole at ``t = 0`` that cancel.
:func:`J` evaluates the pieces separately:

* ``A_a(r,r) + zK'/zK(1+2r) = -sum over odd prime ideals p of
  log Np / (Np^(1+2r) - 1)``; expanding the geometric series and integrating
  term by term gives ``-(2/L) sum log Np Np^-j phi_hat(2 j log Np / L)``,
  a finite sum because ``phi_hat`` has compact support;
* the log and digamma terms reduce to closed forms in ``phi_hat``;
* ``Q`` is integrated as a principal value, ``(1/pi) int_0^inf Re Q phi dt``,
  plus half its residue ``phi(0)/2``.

:func:`J_direct` integrates the full integrand instead, with the
interpolation across ``t = 0``, and serves as an independent check.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np
from scipy import integrate
from scipy import special as sp

from .density import SCHEMA_VERSION, TestFunction, WeightFunction
from .errors import DomainError, RangeError
from .gaussian import PrimaryPrime, rational_primes
from .lfunc import X_factor
from .special import digamma, zeta_K, zeta_K_logderiv

LN2 = math.log(2.0)
EPS0 = 1e-3
Q_T_CUT = 400.0
_PANEL = 0.5
_GL_X, _GL_W = np.polynomial.legendre.leggauss(20)


def A(alpha, gamma):
    """``(2^(1+a+g) - 2^(g-a)) / (2^(1+a+g) - 1)``."""
    alpha = np.asarray(alpha, dtype=complex)
    gamma = np.asarray(gamma, dtype=complex)
    den = np.exp((1 + alpha + gamma) * LN2) - 1
    if np.any(den == 0):
        raise DomainError("A(alpha, gamma) has a pole where 2^(1+alpha+gamma) = 1")
    out = (np.exp((1 + alpha + gamma) * LN2) - np.exp((gamma - alpha) * LN2)) / den
    return out if out.ndim else complex(out)


def A_alpha_diag(r):
    """``dA/dalpha`` at ``alpha = gamma = r``, which is ``log 2 / (2^(1+2r) - 1)``."""
    r = np.asarray(r, dtype=complex)
    den = np.expm1((1 + 2 * r) * LN2)
    if np.any(den == 0):
        raise DomainError("A_alpha has a pole where 2^(1+2r) = 1")
    out = LN2 / den
    return out if out.ndim else complex(out)


def _bracket(norm: int, t: np.ndarray) -> np.ndarray:
    """The full integrand bracket at ``t != 0`` (complex; real up to rounding)."""
    it = 1j * t
    return (
        2 * zeta_K_logderiv(1 + 2 * it)
        + 2 * A_alpha_diag(it)
        + math.log(32 * norm / math.pi**2)
        + digamma(0.5 - it)
        + digamma(0.5 + it)
        - (8 / math.pi) * _xq(norm, t)
    )


def _xq(norm: int, t: np.ndarray) -> np.ndarray:
    it = 1j * t
    return X_factor(norm, 0.5 + it) * zeta_K(1 - 2 * it) * A(-it, it)


def J_integrand(w: PrimaryPrime | int, t, X: float, phi: TestFunction) -> np.ndarray:
    """``(1/2pi) * bracket(t) * phi(t log X / 2pi)``; real and even in ``t``.

    For ``|t| < EPS0`` the bracket is an even quadratic fitted through its
    values at ``EPS0``, ``1.5 EPS0`` and ``2 EPS0``.
    """
    norm = w if isinstance(w, int) else w.norm
    t = np.atleast_1d(np.abs(np.asarray(t, dtype=float)))
    br = np.empty(t.shape)
    far = t >= EPS0
    if np.any(far):
        br[far] = _bracket(norm, t[far]).real
    if np.any(~far):
        c0, c2 = _even_fit(norm)
        br[~far] = c0 + c2 * t[~far] ** 2
    out = br * phi.phi(t * math.log(X) / (2 * math.pi)) / (2 * math.pi)
    return out


def _even_fit(norm: int) -> tuple[float, float]:
    ts = np.array([1.0, 1.5, 2.0]) * EPS0
    ys = _bracket(norm, ts).real
    # least squares for c0 + c2 t^2 through three points
    M = np.stack([np.ones(3), ts**2], axis=1)
    (c0, c2), *_ = np.linalg.lstsq(M, ys, rcond=None)
    return float(c0), float(c2)


def _odd_prime_ideal_powers(limit: float) -> tuple[np.ndarray, np.ndarray]:
    """``(log Np, Np^j)`` for odd prime ideals with ``Np^j <= limit``."""
    logs, powers = [], []
    for p in rational_primes(int(limit)).tolist():
        if p == 2:
            continue
        q, mult = (p, 2) if p % 4 == 1 else (p * p, 1)
        pk = q
        while pk <= limit:
            logs += [math.log(q)] * mult
            powers += [pk] * mult
            pk *= q
    return np.array(logs), np.array(powers, dtype=float)


def _gamma_term(phi: TestFunction, L: float) -> float:
    """``(1/2pi) int (psi(1/2-it) + psi(1/2+it)) phi(tL/2pi) dt``."""
    h0 = phi.phi_hat0
    f = lambda u: math.exp(-u / 2) / -math.expm1(-u) * (h0 - float(phi.phi_hat(u / L)))
    brk = phi.nu * L
    a, _ = integrate.quad(f, 0, brk, limit=400, epsabs=1e-13)
    b, _ = integrate.quad(lambda u: math.exp(-u / 2) / -math.expm1(-u) * h0, brk, np.inf, limit=400, epsabs=1e-13)
    return (2 * float(sp.psi(0.5)) * h0 + 2 * (a + b)) / L


@dataclass
class QNodes:
    """Norm-independent part of ``Re Q(t) phi(tL/2pi)`` on quadrature nodes of ``[0, T]``."""

    t: np.ndarray
    g: np.ndarray
    t_cut: float
    L: float

    @classmethod
    def build(cls, phi: TestFunction, X: float, t_cut: float = Q_T_CUT) -> QNodes:
        L = math.log(X)
        k = int(math.ceil(t_cut / _PANEL))
        edges = np.linspace(0, t_cut, k + 1)
        half = np.diff(edges) / 2
        t = ((edges[:-1] + half)[:, None] + half[:, None] * _GL_X).ravel()
        wq = (half[:, None] * _GL_W).ravel()
        it = 1j * t
        # X_w(1/2+it) = Gamma(1/2-it)/Gamma(1/2+it) (pi^2/32)^it N^-it
        core = np.exp(sp.loggamma(0.5 - it) - sp.loggamma(0.5 + it) + it * math.log(math.pi**2 / 32))
        q = -(8 / math.pi) * core * zeta_K(1 - 2 * it) * A(-it, it)
        g = wq * q * phi.phi(t * L / (2 * math.pi))
        return cls(t, g, t_cut, L)

    def integral(self, norms: np.ndarray) -> np.ndarray:
        """``int_0^T Re Q(t; N) phi dt`` for each norm."""
        norms = np.asarray(norms, dtype=float)
        out = np.empty(norms.shape)
        step = max(1, 2_000_000 // self.t.size)
        for i in range(0, norms.size, step):
            ph = np.exp(-1j * np.outer(np.log(norms[i : i + step]), self.t))
            out[i : i + step] = (ph @ self.g).real
        return out

    def tail_bound(self, norms: np.ndarray) -> np.ndarray:
        """Size of the dropped oscillatory tail: last-panel amplitude over the phase rate."""
        amp = np.max(np.abs(self.g[-20:]) / np.abs(_GL_W * _PANEL / 2))
        rate = 2 * math.log(self.t_cut) + np.log(32 * np.asarray(norms, dtype=float) / math.pi**2)
        return amp / rate


class JContext:
    """Shared pieces of ``J`` for one (phi, X): prime sum, gamma term and Q nodes."""

    def __init__(self, phi: TestFunction, X: float, t_cut: float = Q_T_CUT):
        if X <= 1:
            raise DomainError("X must exceed 1")
        self.phi = phi
        self.X = float(X)
        self.L = L = math.log(X)
        logs, powers = _odd_prime_ideal_powers(math.exp(phi.nu * L / 2) * (1 + 1e-12))
        self.prime_term = -2 / L * math.fsum((logs / powers * phi.phi_hat(np.log(powers) * 2 / L)).tolist())
        self.gamma_term = _gamma_term(phi, L)
        self.nodes = QNodes.build(phi, X, t_cut)
        self._memo: dict[int, tuple[float, float]] = {}

    def values(self, norms: Sequence[int]) -> tuple[np.ndarray, np.ndarray]:
        """``(J, error estimate)`` for each norm, memoised by norm."""
        todo = sorted({int(n) for n in norms} - self._memo.keys())
        if todo:
            arr = np.array(todo, dtype=float)
            qi = self.nodes.integral(arr) / math.pi
            err = self.nodes.tail_bound(arr) / math.pi
            base = self.phi.phi0 / 2 + self.prime_term + self.gamma_term
            logt = np.log(32 * arr / math.pi**2) * self.phi.phi_hat0 / self.L
            for n, v, e in zip(todo, base + logt + qi, err):
                self._memo[n] = (float(v), float(e))
        vals = [self._memo[int(n)] for n in norms]
        return np.array([v for v, _ in vals]), np.array([e for _, e in vals])


def J(w: PrimaryPrime | int, phi: TestFunction, X: float, ctx: JContext | None = None) -> float:
    norm = w if isinstance(w, int) else w.norm
    ctx = ctx or JContext(phi, X)
    return float(ctx.values([norm])[0][0])


def J_direct(w: PrimaryPrime | int, phi: TestFunction, X: float, t_cut: float, panel: float = 0.25) -> float:
    """Gauss-Legendre quadrature of :func:`J_integrand` over ``[-t_cut, t_cut]``."""
    k = int(math.ceil(t_cut / panel))
    edges = np.linspace(0, t_cut, k + 1)
    edges = np.union1d(edges, [EPS0])
    half = np.diff(edges) / 2
    t = ((edges[:-1] + half)[:, None] + half[:, None] * _GL_X).ravel()
    wq = (half[:, None] * _GL_W).ravel()
    return 2 * float(np.dot(wq, J_integrand(w, t, X, phi)))


@dataclass
class RatiosPrediction:
    X: float
    phi: str
    per_prime: list[tuple[int, float]]
    weighted_average: float
    quadrature_error_estimate: float
    schema_version: int = SCHEMA_VERSION
    config_hash: str = ""
    weights: list[float] = field(default_factory=list, repr=False)

    def to_json(self) -> str:
        d = asdict(self)
        d["per_prime"] = [list(r) for r in self.per_prime]
        return json.dumps(d, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> RatiosPrediction:
        d = json.loads(text)
        d["per_prime"] = [tuple(r) for r in d["per_prime"]]
        return cls(**d)

    def recompute(self) -> float:
        bw = math.fsum(self.weights)
        return math.fsum(wt * j for wt, (_, j) in zip(self.weights, self.per_prime)) / bw


def predicted_density(
    primes: Sequence[PrimaryPrime],
    w: WeightFunction,
    phi: TestFunction,
    X: float,
    ctx: JContext | None = None,
    config_hash: str = "",
) -> RatiosPrediction:
    """``(1/W) sum w(N/X) J(N)`` over the primes in the weight support."""
    ctx = ctx or JContext(phi, X)
    ps = sorted((p for p in primes if w(p.norm / X) > 0), key=lambda q: q.key)
    if not ps:
        raise RangeError("no prime in the weight support")
    norms = [p.norm for p in ps]
    vals, errs = ctx.values(norms)
    wts = [float(w(n / X)) for n in norms]
    bw = math.fsum(wts)
    avg = math.fsum(a * b for a, b in zip(wts, vals.tolist())) / bw
    err = math.fsum(a * b for a, b in zip(wts, errs.tolist())) / bw
    return RatiosPrediction(
        X=float(X),
        phi=phi.spec(),
        per_prime=[(n, float(v)) for n, v in zip(norms, vals)],
        weighted_average=avg,
        quadrature_error_estimate=err,
        config_hash=config_hash,
        weights=wts,
    )


@dataclass
class IdentityCheck:
    lhs: float
    rhs: float
    tail: float

    @property
    def defect(self) -> float:
        return abs(self.lhs - self.rhs)


def _odd_prime_ideal_norms(cap: int) -> np.ndarray:
    ps = rational_primes(cap)
    split = ps[ps % 4 == 1]
    inert = ps[(ps % 4 == 3) & (ps * ps <= cap)]
    return np.concatenate([split, split, inert * inert]).astype(float)


def prime_sum_identity_check(r: complex, cap: int = 10_000_000) -> IdentityCheck:
    """``A_a(r,r) + zK'/zK(1+2r)`` against ``-sum log Np / (Np^(1+2r) - 1)`` over odd p.

    The sum is cut at ``Np <= cap``; the remainder is estimated from the
    prime ideal theorem with the observed ``theta_K(cap) - cap`` as a boundary
    correction.
    """
    r = complex(r)
    if not 1 / math.log(cap) < r.real < 0.25:
        raise DomainError("need 1/log(cap) < Re r < 1/4")
    lhs = complex(A_alpha_diag(r) + zeta_K_logderiv(1 + 2 * r))
    n = _odd_prime_ideal_norms(cap)
    ln = np.log(n)
    terms = ln / np.expm1((1 + 2 * r) * ln)
    head = complex(math.fsum(terms.real.tolist()), math.fsum(terms.imag.tolist()))
    theta = math.fsum(ln.tolist())
    f_cap = 1 / (cap ** (1 + 2 * r) - 1)
    tail = cap ** (-2 * r) / (2 * r) - f_cap * (theta - cap)
    rhs = -(head + tail)
    if r.imag == 0:
        return IdentityCheck(lhs.real, rhs.real, float(abs(tail)))
    return IdentityCheck(lhs, rhs, float(abs(tail)))
