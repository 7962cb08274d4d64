"""Exact arithmetic in Z[i] and enumeration of primary Gaussian primes.

An element ``a + bi`` is *primary* when it is congruent to 1 modulo
``(1+i)^3 = -2+2i``; every ideal prime to 2 has exactly one primary
generator. The family of L-functions studied downstream is indexed by the
primary primes returned by :func:`sieve_primary_primes`.
"""

from __future__ import annotations

import csv
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np

from .errors import DomainError, RangeError

NORM_CAP = 2**63 - 1


def _guard(n: int) -> int:
    if n > NORM_CAP:
        raise RangeError(f"norm {n} exceeds the 64-bit guard")
    return n


def _round_half_down(num: int, den: int) -> int:
    # nearest integer to num/den (den > 0), ties toward -inf
    return -((den - 2 * num) // (2 * den))


@dataclass(frozen=True, slots=True)
class GaussInt:
    re: int
    im: int = 0

    def __add__(self, other: GaussInt | int) -> GaussInt:
        other = _coerce(other)
        return GaussInt(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other: GaussInt | int) -> GaussInt:
        other = _coerce(other)
        return GaussInt(self.re - other.re, self.im - other.im)

    def __rsub__(self, other: GaussInt | int) -> GaussInt:
        return _coerce(other) - self

    def __mul__(self, other: GaussInt | int) -> GaussInt:
        other = _coerce(other)
        return GaussInt(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __neg__(self) -> GaussInt:
        return GaussInt(-self.re, -self.im)

    def __pow__(self, k: int) -> GaussInt:
        if k < 0:
            raise DomainError("negative powers are not defined in Z[i]")
        result, base = ONE, self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __divmod__(self, other: GaussInt | int) -> tuple[GaussInt, GaussInt]:
        return gdivmod(self, _coerce(other))

    def __mod__(self, other: GaussInt | int) -> GaussInt:
        return gdivmod(self, _coerce(other))[1]

    def __bool__(self) -> bool:
        return bool(self.re or self.im)

    def conj(self) -> GaussInt:
        return GaussInt(self.re, -self.im)

    def norm(self) -> int:
        return norm(self)

    def is_unit(self) -> bool:
        return norm(self) == 1

    def is_odd(self) -> bool:
        # 1+i divides a+bi exactly when a+b is even
        return (self.re + self.im) % 2 == 1

    def __repr__(self) -> str:
        return f"GaussInt({self.re}, {self.im})"

    def __str__(self) -> str:
        return f"{self.re}{self.im:+d}i"


def _coerce(x: GaussInt | int) -> GaussInt:
    if isinstance(x, GaussInt):
        return x
    if isinstance(x, int):
        return GaussInt(x, 0)
    return NotImplemented


ZERO = GaussInt(0, 0)
ONE = GaussInt(1, 0)
I = GaussInt(0, 1)
ONE_PLUS_I = GaussInt(1, 1)
UNITS = (ONE, I, GaussInt(-1, 0), GaussInt(0, -1))


def norm(g: GaussInt) -> int:
    """``re^2 + im^2``, guarded against leaving the 64-bit range."""
    return _guard(g.re * g.re + g.im * g.im)


def gdivmod(a: GaussInt, b: GaussInt) -> tuple[GaussInt, GaussInt]:
    """Euclidean division with ``norm(r) <= norm(b) / 2``.

    The quotient rounds each coordinate of ``a/b`` to the nearest integer,
    breaking ties toward minus infinity.
    """
    nb = norm(b)
    if nb == 0:
        raise ZeroDivisionError("Gaussian division by zero")
    # a * conj(b)
    br, bi = b.re, b.im
    qr = _round_half_down(a.re * br + a.im * bi, nb)
    qi = _round_half_down(a.im * br - a.re * bi, nb)
    return GaussInt(qr, qi), GaussInt(a.re - (qr * br - qi * bi), a.im - (qr * bi + qi * br))


def divides(d: GaussInt, a: GaussInt) -> bool:
    return not gdivmod(a, d)[1]


def ggcd(a: GaussInt, b: GaussInt) -> GaussInt:
    while b:
        a, b = b, gdivmod(a, b)[1]
    return a


def is_primary(g: GaussInt) -> bool:
    """True when ``g - 1`` is exactly divisible by ``(1+i)^3``.

    Equivalently ``im`` is even and ``re + im = 1 mod 4``.
    """
    return g.im % 2 == 0 and (g.re + g.im) % 4 == 1


def primary_associate(g: GaussInt) -> GaussInt:
    """The unique associate ``u*g`` congruent to 1 mod ``(1+i)^3``."""
    if not g.is_odd():
        raise DomainError(f"{g} is even and has no primary associate")
    a, b = g.re, g.im
    # g, i g, -g, -i g
    for x, y in ((a, b), (-b, a), (-a, -b), (b, -a)):
        if y % 2 == 0 and (x + y) % 4 == 1:
            return GaussInt(x, y)
    raise AssertionError("an odd element always has a primary associate")


def split_odd_part(g: GaussInt) -> tuple[int, int, GaussInt]:
    """Write ``g = i^k (1+i)^j h`` with ``h`` primary; returns ``(k, j, h)``."""
    if not g:
        raise DomainError("zero has no factorisation")
    j = 0
    while not g.is_odd():
        # g / (1+i) = g (1-i) / 2
        g = GaussInt((g.re + g.im) // 2, (g.im - g.re) // 2)
        j += 1
    a, b = g.re, g.im
    # g = i^k h  <=>  h = i^-k g: g, -i g, -g, i g
    for k, (x, y) in enumerate(((a, b), (b, -a), (-a, -b), (-b, a))):
        if y % 2 == 0 and (x + y) % 4 == 1:
            return k, j, GaussInt(x, y)
    raise AssertionError("unit search exhausted")


@dataclass(frozen=True, slots=True)
class PrimaryPrime:
    gen: GaussInt
    norm: int

    @property
    def re(self) -> int:
        return self.gen.re

    @property
    def im(self) -> int:
        return self.gen.im

    @property
    def key(self) -> tuple[int, int, int]:
        return (self.norm, self.gen.re, self.gen.im)

    @property
    def is_split(self) -> bool:
        return self.gen.im != 0

    @classmethod
    def of(cls, re: int, im: int) -> PrimaryPrime:
        g = GaussInt(re, im)
        return cls(g, norm(g))

    def __str__(self) -> str:
        return str(self.gen)


def rational_primes(limit: int) -> np.ndarray:
    """All rational primes ``<= limit`` (plain Eratosthenes)."""
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    sieve = np.ones(limit + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, int(limit**0.5) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return np.flatnonzero(sieve).astype(np.int64)


def sqrt_minus_one(p: int, rng: random.Random | None = None) -> int:
    """A root of ``x^2 = -1 mod p`` for a prime ``p = 1 mod 4``."""
    rng = rng or random.Random(p)
    while True:
        c = rng.randrange(2, p)
        if pow(c, (p - 1) // 2, p) == p - 1:
            return pow(c, (p - 1) // 4, p)


def prime_above(p: int) -> GaussInt:
    """A Gaussian prime of norm ``p`` for ``p = 1 mod 4``."""
    x = sqrt_minus_one(p)
    return ggcd(GaussInt(p, 0), GaussInt(x, 1))


def sieve_primary_primes(max_norm: int, min_norm: int = 0) -> list[PrimaryPrime]:
    """Every primary prime with ``min_norm < N <= max_norm``, sorted by (norm, re, im).

    Split primes ``p = 1 mod 4`` contribute the two conjugate generators of
    norm ``p``; inert ``p = 3 mod 4`` contribute ``-p`` (norm ``p^2``). The
    ramified prime ``1+i`` is never primary and is excluded.
    """
    _guard(max_norm)
    out: list[PrimaryPrime] = []
    for p in rational_primes(max_norm).tolist():
        if p % 4 == 1 and p > min_norm:
            pi = primary_associate(prime_above(p))
            out.append(PrimaryPrime(pi, p))
            out.append(PrimaryPrime(pi.conj(), p))
        elif p % 4 == 3 and min_norm < p * p <= max_norm:
            out.append(PrimaryPrime(primary_associate(GaussInt(p, 0)), p * p))
    out.sort(key=lambda q: q.key)
    return out


_LATTICE: list = []


def primary_lattice(max_norm: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Arrays ``(re, im, norm)`` of every primary element with norm ``<= max_norm``.

    Each odd ideal of norm ``<= max_norm`` appears exactly once; entries are
    sorted by norm. The largest lattice built so far is kept and sliced, so
    repeated calls across a family sweep cost one ``searchsorted``.
    """
    if not _LATTICE or _LATTICE[0] < max_norm:
        _LATTICE[:] = [max_norm, *_build_lattice(max_norm)]
    _, re, im, n = _LATTICE
    k = int(np.searchsorted(n, max_norm, side="right"))
    return re[:k], im[:k], n[:k]


def _build_lattice(max_norm: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    r = int(np.sqrt(max_norm)) + 1
    b = np.arange(-r - (r % 2), r + 2, 2, dtype=np.int64)
    a = np.arange(-r - 1 + (r % 2), r + 2, 2, dtype=np.int64)
    A, B = np.meshgrid(a, b, indexing="ij")
    A = A.ravel()
    B = B.ravel()
    n = A * A + B * B
    keep = (n <= max_norm) & (((A + B) & 3) == 1)
    A, B, n = A[keep], B[keep], n[keep]
    order = np.lexsort((B, A, n))
    out = A[order], B[order], n[order]
    for arr in out:
        arr.setflags(write=False)
    return out


def write_primes_csv(primes: Iterable[PrimaryPrime], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["re", "im", "norm"])
        for q in primes:
            w.writerow([q.re, q.im, q.norm])


def read_primes_csv(path: str | Path) -> list[PrimaryPrime]:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return [PrimaryPrime(GaussInt(int(r["re"]), int(r["im"])), int(r["norm"])) for r in rows]
