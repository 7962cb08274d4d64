from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hecke_lowzeros.errors import DomainError, RangeError
from hecke_lowzeros.gaussian import (
    GaussInt,
    PrimaryPrime,
    gdivmod,
    ggcd,
    is_primary,
    norm,
    primary_associate,
    primary_lattice,
    rational_primes,
    read_primes_csv,
    sieve_primary_primes,
    split_odd_part,
    write_primes_csv,
)

coord = st.integers(-10**6, 10**6)
gauss = st.builds(GaussInt, coord, coord)
nonzero = gauss.filter(bool)
odd = gauss.filter(lambda g: g.is_odd())


@given(gauss, nonzero)
def test_division_remainder_is_small(a, b):
    q, r = gdivmod(a, b)
    assert q * b + r == a
    assert 2 * norm(r) <= norm(b)


small = st.builds(GaussInt, st.integers(-10**4, 10**4), st.integers(-10**4, 10**4))


@given(small, small)
def test_norm_is_multiplicative(a, b):
    assert norm(a * b) == norm(a) * norm(b)


@given(nonzero, nonzero)
def test_gcd_divides_both(a, b):
    g = ggcd(a, b)
    assert not (a % g) and not (b % g)


@given(odd)
def test_primary_associate_is_unique(g):
    h = primary_associate(g)
    assert is_primary(h)
    assert norm(h) == norm(g)
    assert sum(is_primary(u * g) for u in (GaussInt(1), GaussInt(0, 1), GaussInt(-1), GaussInt(0, -1))) == 1


@given(nonzero)
def test_split_odd_part_reassembles(g):
    k, j, h = split_odd_part(g)
    assert GaussInt(0, 1) ** k * GaussInt(1, 1) ** j * h == g
    assert is_primary(h)


def test_primary_means_one_mod_lambda_cubed():
    assert is_primary(GaussInt(1))
    assert is_primary(GaussInt(-3))
    assert is_primary(GaussInt(-1, 2))
    assert not is_primary(GaussInt(3))
    with pytest.raises(DomainError):
        primary_associate(GaussInt(2, 0))


def test_sieve_small_norms_brute_force():
    def is_gauss_prime(a, b):
        n = a * a + b * b
        if b == 0 or a == 0:
            m = abs(a or b)
            return m % 4 == 3 and all(m % d for d in range(2, int(m**0.5) + 1))
        return n > 1 and all(n % d for d in range(2, int(n**0.5) + 1))

    brute = sorted(
        (a * a + b * b, a, b)
        for a in range(-60, 61)
        for b in range(-60, 61)
        if a * a + b * b <= 2000 and is_primary(GaussInt(a, b)) and is_gauss_prime(a, b)
    )
    assert [p.key for p in sieve_primary_primes(2000)] == brute


def test_sieve_matches_prime_counting():
    ps = sieve_primary_primes(10_000)
    rp = rational_primes(10_000)
    split = sum(1 for p in rp if p % 4 == 1)
    inert = sum(1 for p in rp if p % 4 == 3 and p * p <= 10_000)
    assert len(ps) == 2 * split + inert
    assert all(is_primary(p.gen) for p in ps)
    assert len({p.key for p in ps}) == len(ps)


def test_sieve_min_norm_window():
    ps = sieve_primary_primes(1000, 500)
    assert ps and all(500 < p.norm <= 1000 for p in ps)


def test_lattice_counts_odd_ideals():
    re, im, n = primary_lattice(2000)
    assert (n <= 2000).all() and (n[:-1] <= n[1:]).all()
    # the number of odd ideals of norm n is the number of primary elements
    assert sum(is_primary(GaussInt(int(a), int(b))) for a, b in zip(re, im)) == len(re)
    assert list(n[:4]) == [1, 5, 5, 9]


def test_norm_guard():
    with pytest.raises(RangeError):
        norm(GaussInt(2**32, 2**32))


def test_csv_round_trip(tmp_path):
    ps = sieve_primary_primes(500)
    path = tmp_path / "p.csv"
    write_primes_csv(ps, path)
    assert read_primes_csv(path) == ps


def test_split_primes_come_in_conjugate_pairs():
    by_norm: dict[int, list[PrimaryPrime]] = {}
    for p in sieve_primary_primes(4000):
        by_norm.setdefault(p.norm, []).append(p)
    for n, ps in by_norm.items():
        if n % 4 == 1 and ps[0].is_split:
            assert len(ps) == 2 and ps[0].gen.conj() == ps[1].gen
        else:
            assert len(ps) == 1 and not ps[0].is_split
