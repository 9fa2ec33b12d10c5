"""Multiset-permutation graphs: vertex sets, adjacency, enumeration, ranking.

A *multislice* is the set of length-N tuples over levels {0, ..., r-1} in
which level m occurs exactly ``counts[m]`` times.  Two distinct tuples are
adjacent when one is obtained from the other by swapping two entries.  The
connected components of the swap dynamics on level sequences are exactly
these multislices, so everything downstream (Laplacians, spectra, walks)
is parameterized by a :class:`Composition`.

Positions are 0-based everywhere: ``transpose(x, i, j)`` swaps entries
``x[i]`` and ``x[j]`` with ``0 <= i < j < N``.  The canonical vertex order
is lexicographic on the level sequence; :func:`vertex_rank` and
:func:`vertex_unrank` realize that order as a bijection with
``range(cardinality)``.

All types here are immutable after construction and safe to share across
threads; enumeration generators are independent per consumer.
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import IO, Iterable, Iterator, Sequence

Vertex = tuple[int, ...]

#: Default cap on the number of vertices any exhaustive operation may touch.
DEFAULT_BUDGET = 10**6


class BudgetError(RuntimeError):
    """An exhaustive operation would exceed its vertex budget."""


@dataclass(frozen=True)
class Composition:
    """Level counts ``(k_0, ..., k_{r-1})`` identifying one multislice.

    ``n`` is the tuple length (number of particles), ``r`` the number of
    levels.  A composition is *trivial* when one level holds everything
    (single-vertex graph) and *reduced* when every count is positive.
    """

    counts: tuple[int, ...]

    def __init__(self, counts: Iterable[int]):
        counts = tuple(int(c) for c in counts)
        if not counts:
            raise ValueError("composition needs at least one level")
        if any(c < 0 for c in counts):
            raise ValueError(f"negative count in {counts}")
        if sum(counts) < 1:
            raise ValueError("composition must place at least one particle")
        object.__setattr__(self, "counts", counts)

    @classmethod
    def parse(cls, text: str) -> "Composition":
        """Parse a comma-separated count list such as ``"2,1,1"``."""
        try:
            return cls(int(part) for part in text.split(","))
        except ValueError as exc:
            raise ValueError(f"bad composition {text!r}: {exc}") from None

    @classmethod
    def from_json(cls, text: str) -> "Composition":
        return cls(json.loads(text))

    def to_json(self) -> str:
        return json.dumps(list(self.counts))

    @property
    def n(self) -> int:
        return sum(self.counts)

    @property
    def r(self) -> int:
        return len(self.counts)

    @property
    def active_levels(self) -> tuple[int, ...]:
        return tuple(m for m, c in enumerate(self.counts) if c > 0)

    @property
    def r_active(self) -> int:
        """Number of levels that actually occur."""
        return sum(1 for c in self.counts if c > 0)

    @property
    def is_trivial(self) -> bool:
        """True when the multislice is a single vertex (no edges)."""
        return max(self.counts) == self.n

    @property
    def is_reduced(self) -> bool:
        return all(c > 0 for c in self.counts)

    def cardinality(self) -> int:
        """Number of vertices: the multinomial coefficient N!/(k_0! ... )."""
        out = math.factorial(self.n)
        for c in self.counts:
            out //= math.factorial(c)
        return out

    def degree(self) -> int:
        """Common number of neighbors: sum of k_m * k_n over level pairs m < n."""
        total = self.n
        return (total * total - sum(c * c for c in self.counts)) // 2

    def decremented(self, level: int) -> "Composition":
        """Composition with one particle removed from ``level``."""
        if not 0 <= level < self.r:
            raise ValueError(f"level {level} out of range for {self}")
        if self.counts[level] < 1:
            raise ValueError(f"cannot decrement empty level {level} of {self}")
        if self.n == 1:
            raise ValueError("cannot remove the last particle")
        new = list(self.counts)
        new[level] -= 1
        return Composition(new)

    def reduce(self) -> tuple["Composition", dict[int, int]]:
        """Drop empty levels; return the reduced composition and old->new map.

        The induced relabeling of vertices is a graph isomorphism, so all
        spectral quantities are unchanged.
        """
        mapping: dict[int, int] = {}
        kept: list[int] = []
        for m, c in enumerate(self.counts):
            if c > 0:
                mapping[m] = len(kept)
                kept.append(c)
        return Composition(kept), mapping

    def __str__(self) -> str:
        return ",".join(str(c) for c in self.counts)

    def __iter__(self) -> Iterator[int]:
        return iter(self.counts)


@dataclass(frozen=True)
class EnergyTable:
    """Per-level energy values e_0, ..., e_{r-1}, kept as exact rationals."""

    values: tuple[Fraction, ...]

    def __init__(self, values: Iterable[Fraction | int | str]):
        vals = tuple(Fraction(v) for v in values)
        if not vals:
            raise ValueError("energy table needs at least one level")
        object.__setattr__(self, "values", vals)

    def __len__(self) -> int:
        return len(self.values)

    def non_degenerate(self) -> bool:
        """True iff e_a + e_b = e_c + e_d forces {a, b} = {c, d}.

        Under this condition the only energy-conserving binary collision is a
        swap of the two participating levels.  Checked exhaustively, O(r^4).
        """
        r = len(self.values)
        sums: dict[Fraction, frozenset[int]] = {}
        for a in range(r):
            for b in range(a, r):
                s = self.values[a] + self.values[b]
                pair = frozenset((a, b))
                if s in sums:
                    if sums[s] != pair:
                        return False
                else:
                    sums[s] = pair
        return True


def _coerce(k: Composition | Sequence[int]) -> Composition:
    return k if isinstance(k, Composition) else Composition(k)


def check_budget(k: Composition, budget: int | None = DEFAULT_BUDGET) -> int:
    """Return cardinality(k), raising :class:`BudgetError` above ``budget``."""
    size = k.cardinality()
    if budget is not None and size > budget:
        raise BudgetError(
            f"multislice {k} has {size} vertices, exceeding budget {budget}"
        )
    return size


def composition_of(x: Sequence[int], r: int | None = None) -> Composition:
    """Composition realized by a level sequence (level count inferred or given)."""
    if not x:
        raise ValueError("empty vertex")
    levels = (max(x) + 1) if r is None else r
    counts = [0] * levels
    for v in x:
        counts[v] += 1
    return Composition(counts)


def vertices(
    k: Composition | Sequence[int], budget: int | None = DEFAULT_BUDGET
) -> Iterator[Vertex]:
    """Yield every vertex of the multislice once, in lexicographic order."""
    k = _coerce(k)
    check_budget(k, budget)
    x = [m for m, c in enumerate(k.counts) for _ in range(c)]
    n = len(x)
    while True:
        yield tuple(x)
        # classic next-permutation step on the level sequence
        j = n - 2
        while j >= 0 and x[j] >= x[j + 1]:
            j -= 1
        if j < 0:
            return
        l = n - 1
        while x[j] >= x[l]:
            l -= 1
        x[j], x[l] = x[l], x[j]
        x[j + 1:] = reversed(x[j + 1:])


def vertex_rank(x: Sequence[int], k: Composition | Sequence[int]) -> int:
    """Position of ``x`` in the lexicographic order of its multislice."""
    k = _coerce(k)
    x = tuple(x)
    if composition_of(x, k.r).counts != k.counts:
        raise ValueError(f"vertex {x} does not realize composition {k}")
    counts = list(k.counts)
    remaining = k.n
    card = k.cardinality()
    rank = 0
    for level in x:
        for m in range(level):
            if counts[m]:
                # completions beginning with level m: card * counts[m] / remaining
                rank += card * counts[m] // remaining
        card = card * counts[level] // remaining
        counts[level] -= 1
        remaining -= 1
    return rank


def vertex_unrank(index: int, k: Composition | Sequence[int]) -> Vertex:
    """Inverse of :func:`vertex_rank`."""
    k = _coerce(k)
    size = k.cardinality()
    if not 0 <= index < size:
        raise ValueError(f"rank {index} out of range for {k} (0..{size - 1})")
    counts = list(k.counts)
    remaining = k.n
    card = size
    out = []
    for _ in range(k.n):
        for m in range(k.r):
            if not counts[m]:
                continue
            block = card * counts[m] // remaining
            if index < block:
                out.append(m)
                card = block
                counts[m] -= 1
                remaining -= 1
                break
            index -= block
    return tuple(out)


def transpose(x: Sequence[int], i: int, j: int) -> Vertex:
    """Swap entries at positions ``i < j`` (0-based); an involution."""
    n = len(x)
    if not 0 <= i < j < n:
        raise ValueError(f"positions ({i}, {j}) invalid for length {n}")
    y = list(x)
    y[i], y[j] = y[j], y[i]
    return tuple(y)


def neighbors(x: Sequence[int]) -> list[Vertex]:
    """All distinct vertices one swap away (swaps of equal entries excluded)."""
    x = tuple(x)
    n = len(x)
    out = []
    for i in range(n):
        for j in range(i + 1, n):
            if x[i] != x[j]:
                y = list(x)
                y[i], y[j] = y[j], y[i]
                out.append(tuple(y))
    return out


def energy(x: Sequence[int], table: EnergyTable) -> Fraction:
    """Total energy of a state; constant across each multislice."""
    vals = table.values
    if max(x) >= len(vals):
        raise ValueError(f"vertex {tuple(x)} uses levels beyond table of size {len(vals)}")
    return sum((vals[v] for v in x), Fraction(0))


def all_compositions(n: int, r: int) -> Iterator[Composition]:
    """All weak compositions of ``n`` into ``r`` levels (zero counts allowed)."""
    if r < 1:
        raise ValueError("need at least one level")

    def rec(left: int, slots: int) -> Iterator[tuple[int, ...]]:
        if slots == 1:
            yield (left,)
            return
        for first in range(left + 1):
            for rest in rec(left - first, slots - 1):
                yield (first,) + rest

    for counts in rec(n, r):
        yield Composition(counts)


def reduced_compositions(n: int, min_levels: int = 2) -> list[Composition]:
    """All compositions of ``n`` into at least ``min_levels`` positive parts.

    With ``min_levels=2`` these are exactly the non-trivial reduced
    compositions of ``n``, every one a connected graph with at least one edge.
    """

    def rec(left: int) -> Iterator[tuple[int, ...]]:
        if left == 0:
            yield ()
            return
        for first in range(1, left + 1):
            for rest in rec(left - first):
                yield (first,) + rest

    return [Composition(c) for c in rec(n) if len(c) >= min_levels]


def level_sets(
    n: int,
    table: EnergyTable,
    total: Fraction | int,
    budget: int | None = DEFAULT_BUDGET,
) -> list[Composition]:
    """All compositions of ``n`` over the table's levels with the given energy.

    Exhaustive search over weak compositions; several compositions can share
    one energy when the table is rationally dependent, so a level set may
    split into several multislices.
    """
    total = Fraction(total)
    r = len(table)
    n_comps = math.comb(n + r - 1, r - 1)
    if budget is not None and n_comps > budget:
        raise BudgetError(f"{n_comps} candidate compositions exceed budget {budget}")
    out = []
    for k in all_compositions(n, r):
        e = sum((c * v for c, v in zip(k.counts, table.values)), Fraction(0))
        if e == total:
            out.append(k)
    return out


def is_connected(
    k: Composition | Sequence[int], budget: int | None = DEFAULT_BUDGET
) -> bool:
    """Breadth-first check that swap moves reach the whole multislice."""
    k = _coerce(k)
    size = check_budget(k, budget)
    start = vertex_unrank(0, k)
    seen = {start}
    queue = deque([start])
    while queue:
        x = queue.popleft()
        for y in neighbors(x):
            if y not in seen:
                seen.add(y)
                queue.append(y)
    return len(seen) == size


def edges(
    k: Composition | Sequence[int], budget: int | None = DEFAULT_BUDGET
) -> Iterator[tuple[int, int]]:
    """Yield each edge once as a rank pair (u, v) with u < v."""
    k = _coerce(k)
    check_budget(k, budget)
    index = {x: i for i, x in enumerate(vertices(k, budget))}
    for x, u in index.items():
        for y in neighbors(x):
            v = index[y]
            if u < v:
                yield (u, v)


def write_edge_list(
    k: Composition | Sequence[int],
    stream: IO[str],
    budget: int | None = DEFAULT_BUDGET,
) -> int:
    """Write "u v" lines (u < v); returns the number of edges written."""
    count = 0
    for u, v in edges(k, budget):
        stream.write(f"{u} {v}\n")
        count += 1
    return count


def to_dot(k: Composition | Sequence[int], budget: int | None = DEFAULT_BUDGET) -> str:
    """Graphviz DOT rendering with ranks as node ids and tuples as labels."""
    k = _coerce(k)
    check_budget(k, budget)
    lines = [f'graph "multislice_{k}" {{']
    for i, x in enumerate(vertices(k, budget)):
        label = "".join(str(v) for v in x)
        lines.append(f'  {i} [label="{label}"];')
    for u, v in edges(k, budget):
        lines.append(f"  {u} -- {v};")
    lines.append("}")
    return "\n".join(lines) + "\n"
