"""Quadratic residue symbol in Z[i] and the family characters chi_{(1+i)^5 w}.

Two independent routes to the symbol are kept on purpose:

* :func:`euler_symbol` raises the numerator to ``(N(w)-1)/2`` modulo a prime
  ``w``; it is slow and only defined for prime denominators, and serves as
  ground truth.
* :func:`quad_symbol` is a Jacobi-style reduction loop driven by quadratic
  reciprocity and the two supplementary laws. For primary ``d = x + yi``::

      (i / d)     = (-1)^((N(d) - 1) / 4)
      ((1+i) / d) = (-1)^((x - y - y^2 - 1) / 4)
      (a / d)     = (d / a)        for a, d primary and coprime

The coefficient tables feeding the L-function evaluator use a vectorised
form of the same laws: for a primary ``a``,
``chi(a) = ((1+i)/a) * (a/w)``, and ``(a/w)`` is a Legendre symbol modulo
the rational prime under ``w``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from .errors import DomainError, RangeError
from .gaussian import (
    ONE,
    ONE_PLUS_I,
    GaussInt,
    PrimaryPrime,
    divides,
    gdivmod,
    norm,
    primary_associate,
    primary_lattice,
    rational_primes,
    sieve_primary_primes,
    split_odd_part,
)

TABLE_NORM_CAP = 20_000_000


def euler_symbol(a: GaussInt, w: PrimaryPrime) -> int:
    """``a^((N(w)-1)/2) mod w`` mapped to {-1, 0, 1}."""
    p = w.gen
    r = gdivmod(a, p)[1]
    if not r:
        return 0
    e = (w.norm - 1) // 2
    acc = ONE
    while e:
        if e & 1:
            acc = gdivmod(acc * r, p)[1]
        r = gdivmod(r * r, p)[1]
        e >>= 1
    if divides(p, acc - ONE):
        return 1
    if divides(p, acc + ONE):
        return -1
    raise DomainError(f"{p} is not prime: Euler criterion gave {acc}")


def _flip_i(d: GaussInt) -> bool:
    return ((norm(d) - 1) // 4) & 1 == 1


def _flip_one_plus_i(d: GaussInt) -> bool:
    x, y = d.re, d.im
    return ((x - y - y * y - 1) // 4) & 1 == 1


def quad_symbol(num: GaussInt, den: GaussInt) -> int:
    """The quadratic residue symbol ``(num / den)`` for odd, non-unit ``den``."""
    if not den.is_odd():
        raise DomainError(f"denominator {den} is even")
    if den.is_unit():
        raise DomainError("denominator must not be a unit")
    a, b = num, primary_associate(den)
    sign = 1
    while True:
        a = gdivmod(a, b)[1]
        if not a:
            return 0
        k, j, h = split_odd_part(a)
        if k & 1 and _flip_i(b):
            sign = -sign
        if j & 1 and _flip_one_plus_i(b):
            sign = -sign
        if h == ONE:
            return sign
        # reciprocity between primary h and b, then reduce b mod h
        a, b = b, h


@dataclass(frozen=True)
class HeckeChar:
    """``chi_{(1+i)^5 w}``: a primitive quadratic character of conductor ``(1+i)^5 w``."""

    modulus_prime: PrimaryPrime

    @property
    def conductor_norm(self) -> int:
        return 32 * self.modulus_prime.norm

    @cached_property
    def numerator(self) -> GaussInt:
        return ONE_PLUS_I**5 * self.modulus_prime.gen

    @cached_property
    def _residue_data(self) -> tuple[int, int, np.ndarray]:
        # (q, r, squares mod q): Z[i]/(w) = F_q via i -> r when w is split
        w = self.modulus_prime
        if w.is_split:
            q = w.norm
            r = (-w.re * pow(w.im, -1, q)) % q
        else:
            q = abs(w.re)
            r = -1
        sq = np.zeros(q, dtype=bool)
        k = np.arange(1, q, dtype=np.int64)
        sq[(k * k) % q] = True
        return q, r, sq

    def __str__(self) -> str:
        return f"chi[(1+i)^5 ({self.modulus_prime})]"


def char_value(chi: HeckeChar, a: GaussInt) -> int:
    """``chi(a)``: zero on even ``a`` and on multiples of ``w``."""
    if not a or not a.is_odd():
        return 0
    if a.is_unit():
        return 1
    return quad_symbol(chi.numerator, primary_associate(a))


def char_values(chi: HeckeChar, re: np.ndarray, im: np.ndarray) -> np.ndarray:
    """Vectorised ``chi`` on primary elements ``re + i*im`` (int8 array)."""
    re = np.asarray(re, dtype=np.int64)
    im = np.asarray(im, dtype=np.int64)
    q, r, sq = chi._residue_data
    if r >= 0:
        v = (re + im * r) % q
    else:
        v = (re * re + im * im) % q
    leg = np.where(sq[v], 1, -1).astype(np.int8)
    leg[v == 0] = 0
    flip = ((re - im - im * im - 1) >> 2) & 1
    return np.where(flip == 1, -leg, leg).astype(np.int8)


@dataclass(frozen=True)
class CoefficientTable:
    """Per-norm aggregates ``c(n) = sum_{N(A) = n} chi(A)`` over odd ideals."""

    char: HeckeChar
    max_norm: int
    sums: np.ndarray = field(repr=False)
    counts: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.sums.setflags(write=False)
        self.counts.setflags(write=False)

    @cached_property
    def support(self) -> tuple[np.ndarray, np.ndarray]:
        """``(n, c(n))`` restricted to ``c(n) != 0``, as float arrays."""
        n = np.flatnonzero(self.sums)
        return n.astype(np.float64), self.sums[n].astype(np.float64)

    def __getitem__(self, n: int) -> int:
        return int(self.sums[n])

    def cache_path(self, cache_dir: str | Path) -> Path:
        w = self.char.modulus_prime
        return Path(cache_dir) / f"coeff_{w.re}_{w.im}_{self.max_norm}.npz"

    def save(self, cache_dir: str | Path) -> Path:
        path = self.cache_path(cache_dir)
        path.parent.mkdir(parents=True, exist_ok=True)
        np.savez(path, sums=self.sums, counts=self.counts)
        return path

    @classmethod
    def load(cls, chi: HeckeChar, max_norm: int, cache_dir: str | Path) -> CoefficientTable | None:
        w = chi.modulus_prime
        path = Path(cache_dir) / f"coeff_{w.re}_{w.im}_{max_norm}.npz"
        if not path.exists():
            return None
        with np.load(path) as z:
            return cls(chi, max_norm, z["sums"].copy(), z["counts"].copy())


def coefficient_table(chi: HeckeChar, max_norm: int, cache_dir: str | Path | None = None) -> CoefficientTable:
    """Scan primary generators of all odd ideals of norm ``<= max_norm``."""
    if max_norm < 1:
        raise DomainError("max_norm must be positive")
    if max_norm > TABLE_NORM_CAP:
        raise RangeError(f"max_norm {max_norm} exceeds the table cap {TABLE_NORM_CAP}")
    if cache_dir is not None:
        hit = CoefficientTable.load(chi, max_norm, cache_dir)
        if hit is not None:
            return hit
    re, im, n = primary_lattice(max_norm)
    vals = char_values(chi, re, im)
    sums = np.bincount(n, weights=vals, minlength=max_norm + 1).round().astype(np.int64)
    counts = np.bincount(n, minlength=max_norm + 1).astype(np.int64)
    table = CoefficientTable(chi, max_norm, sums, counts)
    if cache_dir is not None:
        table.save(cache_dir)
    return table


def coefficient_table_multiplicative(chi: HeckeChar, max_norm: int) -> CoefficientTable:
    """Reference construction: scalar ``char_value`` at prime ideals, extended multiplicatively.

    Slow (one reciprocity loop per prime ideal); meant for cross-checking
    :func:`coefficient_table` on small ranges.
    """
    sums = np.ones(max_norm + 1, dtype=np.int64)
    counts = np.ones(max_norm + 1, dtype=np.int64)
    sums[0] = counts[0] = 0
    local: dict[int, list[tuple[int, int]]] = {}
    for w in sieve_primary_primes(max_norm) if max_norm >= 5 else []:
        local.setdefault(w.norm, []).append(char_value(chi, w.gen))
    for p in rational_primes(max_norm).tolist():
        fs = np.ones(max_norm + 1, dtype=np.int64)
        fc = np.ones(max_norm + 1, dtype=np.int64)
        pk, k = p, 1
        while pk <= max_norm:
            if p == 2:
                cv, cc = 0, 0
            elif p % 4 == 1:
                a, b = local[p]
                cv = sum(a**j * b ** (k - j) for j in range(k + 1))
                cc = k + 1
            else:
                if k % 2:
                    cv, cc = 0, 0
                else:
                    cv, cc = local[p * p][0] ** (k // 2), 1
            fs[pk::pk] = cv
            fc[pk::pk] = cc
            pk *= p
            k += 1
        sums *= fs
        counts *= fc
    return CoefficientTable(chi, max_norm, sums, counts)
