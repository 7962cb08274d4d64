"""L(s, chi) for the family characters and its completed form.

Two evaluators share one coefficient table:

* :func:`L_afe` is the approximate functional equation with the smoothing
  ``V_s(x) = Gamma(s, x) / Gamma(s)``. It is valid anywhere, but at height
  ``t`` its terms grow like ``exp(pi t / 2)`` before cancelling, so it is
  used for spot values and self-tests.
* :class:`CriticalLineEvaluator` writes ``Lambda(s)`` as a Mellin integral of
  the theta series ``theta(y) = sum c(n) exp(-2 pi n y / sqrt(C))`` taken along
  a ray rotated towards the imaginary axis. The rotation keeps the integrand
  within a factor ``exp(c)`` of ``|Lambda|`` up to the design height, and the
  theta values are computed once so a whole t-grid costs a matrix product.

``C = 4 * N(m)`` is the analytic conductor with ``N(m) = 32 N(w)``; the
completed function ``Lambda(s) = C^(s/2) (2 pi)^-s Gamma(s) L(s)`` satisfies
``Lambda(s) = Lambda(1 - s)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special as sp

from .errors import DomainError, TruncationError, VerificationError
from .gaussian import PrimaryPrime
from .quadchar import CoefficientTable, HeckeChar, coefficient_table
from .special import upper_gamma

DK_ABS = 4
V_CUTOFF = 1e-14
IM_TOL = 1e-6

# theta-integral parameters: rotation margin, split radius, exponent cutoff
ROT_MARGIN = 5.0
SPLIT_RADIUS = 1.25
EXP_CUT = 40.0
GL_NODES = 20
PANEL_FACTOR = 1.5

_GL_X, _GL_W = np.polynomial.legendre.leggauss(GL_NODES)


def _log_bound_cutoff(a: complex, extra) -> float:
    """Smallest z (on a 0.25 grid) past which ``2 z^(Re a - 1) e^-z * exp(extra(z))`` stays below the cutoff."""
    z = max(2.0 * abs(a), 1.0)
    target = math.log(V_CUTOFF)
    while math.log(2.0) + (a.real - 1.0) * math.log(z) - z + extra(z) >= target:
        z += 0.25
    return z


def theta_table_norm(conductor: float, t_max: float) -> int:
    """Coefficient-table length that :class:`CriticalLineEvaluator` needs for ``t_max``."""
    eps = _rotation_eps(t_max)
    return int(math.ceil(EXP_CUT * math.sqrt(conductor) * SPLIT_RADIUS / (2 * math.pi * math.sin(eps)))) + 1


def _rotation_eps(t_max: float) -> float:
    return min(ROT_MARGIN / t_max, math.pi / 2) if t_max > 0 else math.pi / 2


@dataclass
class LEvaluator:
    """Coefficient table plus the AFE split point for one character."""

    char: HeckeChar
    table: CoefficientTable
    x_param: float | None = None
    t_cap: float = 40.0
    dk_abs: int = DK_ABS
    _line: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.x_param is None:
            self.x_param = math.sqrt(self.analytic_conductor)
        if self.x_param <= 1:
            raise DomainError("the AFE split point must exceed 1")

    @property
    def prime(self) -> PrimaryPrime:
        return self.char.modulus_prime

    @property
    def conductor_norm(self) -> int:
        return self.char.conductor_norm

    @property
    def analytic_conductor(self) -> int:
        return self.dk_abs * self.conductor_norm

    @classmethod
    def build(
        cls,
        chi: HeckeChar,
        t_cap: float = 40.0,
        afe_height: float = 20.0,
        x_param: float | None = None,
        cache_dir=None,
        max_norm_guard: int | None = None,
    ) -> LEvaluator:
        """Build a table long enough for both evaluators up to the given heights."""
        cond = DK_ABS * chi.conductor_norm
        x = math.sqrt(cond) if x_param is None else x_param
        need = max(
            theta_table_norm(cond, t_cap),
            afe_required_norm(cond, x, complex(0.25, afe_height)),
            afe_required_norm(cond, x, complex(0.75, afe_height)),
        )
        if max_norm_guard is not None and need > max_norm_guard:
            raise TruncationError(f"{chi} needs coefficients up to {need} (guard {max_norm_guard})", need)
        table = coefficient_table(chi, need, cache_dir=cache_dir)
        return cls(chi, table, x, t_cap)

    def critical_line(self, t_max: float | None = None) -> CriticalLineEvaluator:
        t_max = self.t_cap if t_max is None else t_max
        key = round(float(t_max), 12)
        if key not in self._line:
            self._line[key] = CriticalLineEvaluator(self, t_max)
        return self._line[key]


def _afe_cutoffs(cond: float, x: float, s: complex) -> tuple[float, float]:
    lg = sp.loggamma(s).real
    sig = s.real
    z1 = _log_bound_cutoff(s, lambda z: -lg - sig * math.log(max(z * x / (2 * math.pi), 1.0)))
    pref = (sig - 0.5) * math.log(4 * math.pi**2 / cond) - lg
    z2 = _log_bound_cutoff(
        1 - s, lambda z: pref + (sig - 1) * math.log(max(z * cond / (2 * math.pi * x), 1.0))
    )
    return z1 * x / (2 * math.pi), z2 * cond / (2 * math.pi * x)


def afe_required_norm(cond: float, x: float, s: complex) -> int:
    n1, n2 = _afe_cutoffs(cond, x, complex(s))
    return int(math.ceil(max(n1, n2)))


def L_afe(ev: LEvaluator, s: complex, x: float | None = None) -> complex:
    """``L(s, chi)`` by the approximate functional equation with ``G = 1``."""
    s = complex(s)
    x = ev.x_param if x is None else float(x)
    if x <= 1:
        raise DomainError("the AFE split point must exceed 1")
    cond = ev.analytic_conductor
    n1, n2 = _afe_cutoffs(cond, x, s)
    need = int(math.ceil(max(n1, n2)))
    if need > ev.table.max_norm:
        raise TruncationError(f"AFE at s={s} needs coefficients up to {need}", need)
    n, c = ev.table.support
    lgs = sp.loggamma(s)
    m1 = n <= n1
    z1 = 2 * math.pi * n[m1] / x
    s1 = np.sum(c[m1] * np.exp(-s * np.log(n[m1])) * upper_gamma(s, z1)) * np.exp(-lgs)
    m2 = n <= n2
    z2 = 2 * math.pi * n[m2] * x / cond
    s2 = np.sum(c[m2] * np.exp((s - 1) * np.log(n[m2])) * upper_gamma(1 - s, z2))
    factor = np.exp((s - 0.5) * math.log(4 * math.pi**2 / cond) - lgs)
    return complex(s1 + factor * s2)


def log_gamma_factor(cond: float, s):
    """``log(C^(s/2) (2 pi)^-s Gamma(s))``."""
    s = np.asarray(s, dtype=complex)
    return 0.5 * s * math.log(cond) - s * math.log(2 * math.pi) + sp.loggamma(s)


def completed_Lambda(ev: LEvaluator, s: complex) -> complex:
    """``Lambda(s) = C^(s/2) (2 pi)^-s Gamma(s) L(s)`` with L from the AFE."""
    s = complex(s)
    return complex(np.exp(log_gamma_factor(ev.analytic_conductor, s)) * L_afe(ev, s))


def lambda_scale(cond: float, t) -> np.ndarray:
    """``|C^(1/4) (2 pi)^(-1/2) Gamma(1/2 + it)|``: the size of the gamma factor on the line."""
    t = np.asarray(t, dtype=float)
    return np.exp(log_gamma_factor(cond, 0.5 + 1j * t).real)


def X_factor(w: PrimaryPrime | int, s):
    """``Gamma(1-s)/Gamma(s) * (pi^2 / (32 N(w)))^(s - 1/2)``; ``w`` may be given by its norm."""
    norm = w if isinstance(w, int) else w.norm
    s = np.asarray(s, dtype=complex)
    bad = (s.imag == 0) & (s.real >= 1) & (s.real == np.round(s.real))
    if np.any(bad):
        raise DomainError("Gamma(1 - s) has a pole")
    out = np.exp(sp.loggamma(1 - s) - sp.loggamma(s) + (s - 0.5) * math.log(math.pi**2 / (32 * norm)))
    return out if out.ndim else complex(out)


def _panel_nodes(length: float, width: float) -> tuple[np.ndarray, np.ndarray]:
    k = max(1, int(math.ceil(length / width)))
    edges = np.linspace(0.0, length, k + 1)
    half = np.diff(edges) / 2
    mid = edges[:-1] + half
    u = (mid[:, None] + half[:, None] * _GL_X[None, :]).ravel()
    w = (half[:, None] * _GL_W[None, :]).ravel()
    return u, w


class CriticalLineEvaluator:
    """``Lambda(s)`` near the critical line from a rotated theta integral.

    With ``y0 = lam * e^(i delta)``::

        Lambda(s) = y0^s int_0^U e^(us) theta(y0 e^u) du
                  + y0^(s-1) int_0^U e^(u(1-s)) theta(e^u / y0) du

    using ``theta(1/y) = y theta(y)``. ``delta = pi/2 - c/t_max`` keeps every
    term within ``exp(c)`` of ``|Lambda|`` for ``|t| <= t_max``; ``lam != 1``
    makes the two halves independent, so ``Im Lambda = 0`` on the line is a
    real consistency check.
    """

    def __init__(self, ev: LEvaluator, t_max: float):
        self.ev = ev
        self.t_max = float(t_max)
        cond = ev.analytic_conductor
        self.conductor = cond
        need = theta_table_norm(cond, self.t_max)
        if need > ev.table.max_norm:
            raise TruncationError(f"theta integral up to t={t_max} needs coefficients up to {need}", need)
        eps = _rotation_eps(self.t_max)
        self.delta = math.pi / 2 - eps
        cosd = math.sin(eps)
        n, c = ev.table.support
        rt = math.sqrt(cond)
        width = min(PANEL_FACTOR * eps, 0.75)
        self._halves = []
        for y0 in (SPLIT_RADIUS * np.exp(1j * self.delta), np.exp(-1j * self.delta) / SPLIT_RADIUS):
            a0 = 2 * math.pi * abs(y0) * cosd / rt  # damping rate of the n = 1 term at u = 0
            length = max(math.log(EXP_CUT / a0), 0.0) + 1.0
            u, w = _panel_nodes(length, width)
            theta = np.empty(u.size, dtype=complex)
            ends = np.searchsorted(n, EXP_CUT / (a0 * np.exp(u)), side="right")
            scale = -2 * math.pi * y0 / rt
            for k in range(u.size):
                m = ends[k]
                theta[k] = np.dot(c[:m], np.exp(scale * np.exp(u[k]) * n[:m]))
            self._halves.append((complex(np.log(y0)), u, w * theta))

    def Lambda(self, s) -> np.ndarray:
        s = np.atleast_1d(np.asarray(s, dtype=complex))
        # the rotation only suits Im s >= 0; real coefficients give the rest by conjugation
        lower = s.imag < 0
        s = np.where(lower, s.conj(), s)
        (l1, u1, g1), (l2, u2, g2) = self._halves
        out = np.empty(s.shape, dtype=complex)
        step = 512
        for i in range(0, s.size, step):
            ss = s[i : i + step]
            a = np.exp(np.outer(ss, u1)) @ g1
            b = np.exp(np.outer(1 - ss, u2)) @ g2
            out[i : i + step] = np.exp(ss * l1) * a + np.exp((ss - 1) * l1) * b
        return np.where(lower, out.conj(), out)

    def on_line(self, t) -> np.ndarray:
        """``Lambda(1/2 + it)`` as a complex array (imaginary part kept for checks)."""
        t = np.asarray(t, dtype=float)
        if np.any(np.abs(t) > self.t_max + 1e-6):
            raise DomainError(f"|t| exceeds the evaluator height {self.t_max}")
        return self.Lambda(0.5 + 1j * t)

    def hardy_Z(self, t, check: bool = True) -> np.ndarray:
        vals = self.on_line(t)
        if check:
            check_real(vals, np.atleast_1d(np.asarray(t, dtype=float)), self.ev)
        return vals.real


def check_real(vals: np.ndarray, t: np.ndarray, ev: LEvaluator) -> None:
    bad = np.abs(vals.imag) > IM_TOL * (1 + np.abs(vals))
    if np.any(bad):
        k = int(np.argmax(bad))
        raise VerificationError(
            f"Im Lambda(1/2+it) = {vals.imag[k]:.3e} at t={t[k]:.6f} for {ev.prime}; "
            "root number or coefficient table is wrong"
        )


def hardy_Z(ev: LEvaluator, t):
    """Real value ``Lambda(1/2 + it)``; checks that the imaginary part vanishes."""
    t_arr = np.asarray(t, dtype=float)
    if np.any(np.abs(t_arr) > ev.t_cap):
        raise DomainError(f"|t| exceeds the configured cap {ev.t_cap}")
    out = ev.critical_line().hardy_Z(np.atleast_1d(t_arr))
    return out if t_arr.ndim else float(out[0])
