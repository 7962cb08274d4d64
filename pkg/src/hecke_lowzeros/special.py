"""Complex special functions in double precision.

``log_gamma`` and ``digamma`` delegate to scipy; the incomplete gamma
function and the zeta functions are implemented here because scipy only
covers real arguments for them.

The Dedekind zeta function of Q(i) factors as ``zeta(s) * L(s, chi_4)`` and
``L(s, chi_4) = 4^-s (zeta(s, 1/4) - zeta(s, 3/4))``. Both Hurwitz values come
from one Euler-Maclaurin routine that also returns the exact s-derivative of
every term, which gives the logarithmic derivative without finite
differences.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import special as sp

from .errors import DomainError, NumericError

EULER_GAMMA = 0.57721566490153286061
CATALAN = 0.91596559417721901505
RESIDUE_ZETA_K = math.pi / 4

_EM_TERMS = 16
_BERNOULLI = sp.bernoulli(2 * _EM_TERMS)
_EM_COEF = np.array([_BERNOULLI[2 * j] / math.factorial(2 * j) for j in range(1, _EM_TERMS + 1)])


def _check_gamma_pole(s):
    s = np.asarray(s, dtype=complex)
    bad = (s.imag == 0) & (s.real <= 0) & (s.real == np.round(s.real))
    if np.any(bad):
        raise DomainError("Gamma has a pole at non-positive integers")
    return s


def log_gamma(s):
    """Principal branch of log Gamma(s)."""
    s = _check_gamma_pole(s)
    return sp.loggamma(s)


def digamma(s):
    """Gamma'(s) / Gamma(s)."""
    s = _check_gamma_pole(s)
    return sp.psi(s)


def _gamma_series_lower(s: complex, z: np.ndarray) -> np.ndarray:
    # gamma(s, z) = z^s e^-z sum_k z^k / (s (s+1) ... (s+k))
    term = np.full(z.shape, 1.0 / s, dtype=complex)
    total = term.copy()
    k = 0
    while True:
        k += 1
        term = term * z / (s + k)
        total += term
        if np.all(np.abs(term) <= 1e-17 * np.abs(total)):
            break
        if k > 2000:
            raise NumericError("incomplete gamma series did not converge")
    return np.exp(s * np.log(z) - z) * total


def _gamma_cf_upper(s: complex, z: np.ndarray) -> np.ndarray:
    # Legendre continued fraction, modified Lentz
    tiny = 1e-300
    b = z + 1.0 - s
    c = np.full(z.shape, 1.0 / tiny, dtype=complex)
    d = 1.0 / b
    h = d.copy()
    for i in range(1, 5000):
        an = -i * (i - s)
        b = b + 2.0
        d = an * d + b
        d = np.where(np.abs(d) < tiny, tiny, d)
        c = b + an / c
        c = np.where(np.abs(c) < tiny, tiny, c)
        d = 1.0 / d
        delta = d * c
        h = h * delta
        if np.all(np.abs(delta - 1.0) < 1e-15):
            break
    else:
        raise NumericError("incomplete gamma continued fraction did not converge")
    return np.exp(s * np.log(z) - z) * h


def upper_gamma(s: complex, z) -> np.ndarray:
    """Unnormalised upper incomplete gamma ``Gamma(s, z)`` for ``|arg z| < pi/2``.

    Vectorised over ``z``. Uses the power series when ``|z| <= |s| + 1`` and
    the continued fraction otherwise. Non-positive integer ``s`` goes
    through ``E1`` and the downward recurrence.
    """
    s = complex(s)
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if np.any(z.real <= 0) and np.any(z == 0):
        raise DomainError("Gamma(s, 0) requires Re s > 0")
    if s.imag == 0 and s.real <= 0 and s.real == round(s.real):
        m = -int(round(s.real))
        g = sp.exp1(z)
        for k in range(1, m + 1):
            # Gamma(-k, z) = (Gamma(-k+1, z) - z^-k e^-z) / k
            g = (np.exp(-k * np.log(z) - z) - g) / k
        return g
    out = np.empty(z.shape, dtype=complex)
    small = np.abs(z) <= abs(s) + 1.0
    if np.any(small):
        out[small] = np.exp(sp.loggamma(s)) - _gamma_series_lower(s, z[small])
    if np.any(~small):
        out[~small] = _gamma_cf_upper(s, z[~small])
    return out


def gamma_ratio_incomplete(s: complex, x):
    """``Gamma(s, x) / Gamma(s)``: the AFE weight ``V_s(x)`` with ``G = 1``."""
    s = complex(s)
    x = np.asarray(x, dtype=complex)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    out = np.empty(x.shape, dtype=complex)
    zero = x == 0
    out[zero] = 1.0
    if np.any(~zero):
        out[~zero] = upper_gamma(s, x[~zero]) * np.exp(-sp.loggamma(s))
    return out[0] if scalar else out


def _em_cutoff(s: np.ndarray) -> int:
    return int(15 + 0.5 * np.max(np.abs(s), initial=0.0))


def _hurwitz_tail(s: np.ndarray, a: float, m: int, with_pole: bool):
    """Partial sum plus Euler-Maclaurin tail of zeta(s, a), and its s-derivative."""
    n = np.arange(m, dtype=np.float64) + a
    logn = np.log(n)
    z = np.empty(s.shape, dtype=complex)
    dz = np.empty(s.shape, dtype=complex)
    step = max(1, 4_000_000 // m)
    for i in range(0, s.size, step):
        terms = np.exp(-np.outer(s[i : i + step], logn))
        z[i : i + step] = terms.sum(axis=1)
        dz[i : i + step] = -(terms @ logn)
    big_n = m + a
    ln = math.log(big_n)
    nps = np.exp(-s * ln)
    z += nps / 2
    dz += -ln * nps / 2
    if with_pole:
        pole = big_n * nps / (s - 1)
        z += pole
        dz += -ln * pole - pole / (s - 1)
    rising = s.copy()
    d_rising = np.ones_like(s)
    power = nps / big_n
    for j, coef in enumerate(_EM_COEF, start=1):
        z += coef * rising * power
        dz += coef * (d_rising - ln * rising) * power
        a1 = s + (2 * j - 1)
        a2 = s + 2 * j
        d_rising = d_rising * a1 * a2 + rising * (a1 + a2)
        rising = rising * a1 * a2
        power = power / (big_n * big_n)
    return z, dz


def _pole_difference(s: np.ndarray, big_a: float, big_b: float):
    """``(A^(1-s) - B^(1-s)) / (s - 1)`` and its s-derivative, stable near s = 1."""
    w = 1.0 - s
    la, lb = math.log(big_a), math.log(big_b)
    f = np.empty(s.shape, dtype=complex)
    df = np.empty(s.shape, dtype=complex)
    near = np.abs(w) * max(abs(la), abs(lb)) < 0.5
    if np.any(near):
        wn = w[near]
        acc = np.zeros(wn.shape, dtype=complex)
        dacc = np.zeros(wn.shape, dtype=complex)
        for k in range(1, 40):
            c = (lb**k - la**k) / math.factorial(k)
            acc += c * wn ** (k - 1)
            if k >= 2:
                dacc += c * (k - 1) * wn ** (k - 2)
        f[near] = acc
        df[near] = dacc
    far = ~near
    if np.any(far):
        wf = w[far]
        ba, bb = np.exp(wf * la), np.exp(wf * lb)
        f[far] = (bb - ba) / wf
        df[far] = (bb * lb - ba * la) / wf - (bb - ba) / wf**2
    # f is a function of w = 1 - s
    return f, -df


def _zeta_parts(s: np.ndarray):
    m = _em_cutoff(s)
    z1, dz1 = _hurwitz_tail(s, 1.0, m, with_pole=True)
    h1, dh1 = _hurwitz_tail(s, 0.25, m, with_pole=False)
    h3, dh3 = _hurwitz_tail(s, 0.75, m, with_pole=False)
    pd, dpd = _pole_difference(s, m + 0.25, m + 0.75)
    four = np.exp(-s * math.log(4.0))
    lval = four * (h1 - h3 + pd)
    dl = four * (dh1 - dh3 + dpd) - math.log(4.0) * lval
    return z1, dz1, lval, dl


def _prep(s, what: str):
    s = np.asarray(s, dtype=complex)
    if np.any(s == 1):
        raise DomainError(f"{what} has a pole at s = 1 (distance 0)")
    return s


def riemann_zeta(s):
    s = _prep(s, "zeta")
    z, _, _, _ = _zeta_parts(np.atleast_1d(s).ravel())
    return z.reshape(s.shape) if s.ndim else z[0]


def dirichlet_l4(s):
    """``L(s, chi_4)`` for the non-trivial character modulo 4."""
    s = np.asarray(s, dtype=complex)
    # the zeta half is discarded, so its pole at s = 1 is harmless here
    with np.errstate(divide="ignore", invalid="ignore"):
        _, _, lv, _ = _zeta_parts(np.atleast_1d(s).ravel())
    return lv.reshape(s.shape) if s.ndim else lv[0]


def zeta_k_with_derivative(s):
    """``(zeta_K(s), zeta_K'(s))`` for K = Q(i)."""
    s = _prep(s, "zeta_K")
    flat = np.atleast_1d(s).ravel()
    z, dz, lv, dl = _zeta_parts(flat)
    val = z * lv
    der = dz * lv + z * dl
    if s.ndim:
        return val.reshape(s.shape), der.reshape(s.shape)
    return val[0], der[0]


def zeta_K(s):
    """Dedekind zeta function of Q(i)."""
    return zeta_k_with_derivative(s)[0]


def zeta_K_logderiv(s, zero_tol: float = 1e-12):
    """``zeta_K'(s) / zeta_K(s)`` from term-wise differentiated Euler-Maclaurin."""
    s = _prep(s, "zeta_K'/zeta_K")
    flat = np.atleast_1d(s).ravel()
    z, dz, lv, dl = _zeta_parts(flat)
    scale = np.abs(z) * np.abs(lv)
    if np.any(scale < zero_tol):
        k = int(np.argmin(scale))
        raise NumericError(f"zeta_K nearly vanishes at s={flat[k]} (|zeta_K| = {scale[k]:.3e})")
    out = dz / z + dl / lv
    return out.reshape(s.shape) if s.ndim else out[0]
