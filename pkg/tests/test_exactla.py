"""Exact linear algebra kernels: Bareiss elimination and modular rank."""

from __future__ import annotations

import random
from fractions import Fraction

import numpy as np
import pytest

from multislice.exactla import (
    MODULAR_PRIMES,
    exact_nullity,
    fraction_free_rank,
    kernel_rank_certified,
    nullity_mod_p,
    rank_mod_p,
)


def known_rank_matrix(rng: random.Random, n: int, m: int, rank: int) -> list[list[int]]:
    """Construct an integer matrix of exactly the requested rank.

    Start from a diagonal with ``rank`` units, then apply unimodular row and
    column operations (which preserve rank exactly).
    """
    a = [[int(i == j and i < rank) for j in range(m)] for i in range(n)]
    for _ in range(3 * (n + m)):
        kind = rng.randrange(4)
        if kind == 0 and n > 1:
            i, j = rng.sample(range(n), 2)
            c = rng.randint(-3, 3)
            a[i] = [x + c * y for x, y in zip(a[i], a[j])]
        elif kind == 1 and m > 1:
            i, j = rng.sample(range(m), 2)
            c = rng.randint(-3, 3)
            for row in a:
                row[i] += c * row[j]
        elif kind == 2 and n > 1:
            i, j = rng.sample(range(n), 2)
            a[i], a[j] = a[j], a[i]
        elif kind == 3 and m > 1:
            i, j = rng.sample(range(m), 2)
            for row in a:
                row[i], row[j] = row[j], row[i]
    return a


class TestBareiss:
    def test_known_ranks(self):
        rng = random.Random(0)
        for _ in range(40):
            n = rng.randint(1, 8)
            m = rng.randint(1, 8)
            r = rng.randint(0, min(n, m))
            a = known_rank_matrix(rng, n, m, r)
            assert fraction_free_rank(a) == r

    def test_fraction_entries(self):
        a = [[Fraction(1, 2), Fraction(1, 3)], [Fraction(3, 2), Fraction(2)]]
        assert fraction_free_rank(a) == 2
        b = [[Fraction(1, 2), Fraction(1, 3)], [Fraction(3, 2), Fraction(1)]]
        assert fraction_free_rank(b) == 1  # second row is 3x the first

    def test_rejects_floats(self):
        with pytest.raises(TypeError):
            fraction_free_rank([[1.5, 2.0]])

    def test_cap(self):
        big = [[1] * 10 for _ in range(10)]
        with pytest.raises(ValueError):
            fraction_free_rank(big, cap=5)

    def test_nullity_with_shift(self):
        # 2-vertex swap Laplacian: eigenvalues 0 and 2
        lap = [[1, -1], [-1, 1]]
        assert exact_nullity(lap, shift=0) == 1
        assert exact_nullity(lap, shift=2) == 1
        assert exact_nullity(lap, shift=1) == 0

    def test_nullity_fraction_shift(self):
        mat = [[Fraction(0), Fraction(1)], [Fraction(1), Fraction(0)]]
        assert exact_nullity(mat, shift=Fraction(1)) == 1
        assert exact_nullity(mat, shift=Fraction(-1)) == 1
        assert exact_nullity(mat, shift=Fraction(1, 2)) == 0


class TestModularRank:
    def test_matches_bareiss_random(self):
        rng = random.Random(1)
        for _ in range(40):
            n = rng.randint(1, 10)
            m = rng.randint(1, 10)
            r = rng.randint(0, min(n, m))
            a = known_rank_matrix(rng, n, m, r)
            # tiny block size exercises panel boundaries
            assert rank_mod_p(np.array(a), block=3) == r
            assert rank_mod_p(np.array(a)) == r

    def test_all_primes_agree(self):
        rng = random.Random(2)
        a = np.array(known_rank_matrix(rng, 12, 9, 5))
        for p in MODULAR_PRIMES:
            assert rank_mod_p(a, p) == 5

    def test_block_boundary_sizes(self):
        rng = random.Random(3)
        for n in (4, 5, 7, 8, 9, 16):
            a = known_rank_matrix(rng, n, n, n - 1)
            assert rank_mod_p(np.array(a), block=4) == n - 1

    def test_nullity(self):
        a = np.array([[1, 2, 3], [2, 4, 6], [0, 0, 1]])
        assert nullity_mod_p(a) == 1

    def test_negative_entries(self):
        a = np.array([[-7, 14], [3, -6]])
        assert rank_mod_p(a) == 1

    def test_zero_matrix(self):
        assert rank_mod_p(np.zeros((4, 6), dtype=np.int64)) == 0

    def test_medium_laplacian_agrees_with_bareiss(self):
        # cross-engine consistency on a real certification matrix
        from multislice.core import Composition
        from multislice.operators import laplacian_dense

        k = Composition((2, 2, 1))
        lap = laplacian_dense(k)
        shifted = lap - k.n * np.eye(lap.shape[0], dtype=np.int64)
        want = exact_nullity(lap.tolist(), shift=k.n)
        assert nullity_mod_p(shifted.astype(np.int64)) == want == 8


class TestKernelRank:
    def test_full_rank_family(self):
        rng = random.Random(4)
        a = known_rank_matrix(rng, 5, 30, 5)
        assert kernel_rank_certified(np.array(a)) == 5

    def test_deficient_family(self):
        a = np.array([[1, 2, 3], [2, 4, 6]])
        assert kernel_rank_certified(a) == 1

    def test_empty(self):
        assert kernel_rank_certified(np.zeros((0, 5), dtype=np.int64)) == 0
