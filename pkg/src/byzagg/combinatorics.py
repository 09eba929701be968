"""Subset enumeration/ranking, Steiner triple systems, and permutations.

Files are identified with r-subsets of the worker set in colexicographic
order, so ranking a subset is O(r) binomial sums and never materializes
the full enumeration.  Triple systems come from the Bose (v = 3 mod 6)
and Skolem (v = 1 mod 6) constructions and are verified, not assumed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import ConfigError, UnsupportedOrderError


def binom(n: int, k: int) -> int:
    """C(n, k) with the convention C(n, k) = 0 outside 0 <= k <= n."""
    if k < 0 or k > max(n, 0) or n < 0:
        return 0
    return math.comb(n, k)


# ---------------------------------------------------------------------------
# r-subsets in colexicographic order
# ---------------------------------------------------------------------------

def enumerate_r_subsets(k_workers: int, r: int) -> list[tuple[int, ...]]:
    """All r-subsets of range(k_workers) in colex order; index = file index."""
    _check_subset_params(k_workers, r)
    return sorted(combinations(range(k_workers), r), key=lambda s: s[::-1])


def subset_rank(subset: tuple[int, ...], k_workers: int) -> int:
    """Colex rank of a sorted subset; inverse of subset_unrank."""
    members = tuple(subset)
    _check_subset_params(k_workers, len(members))
    if list(members) != sorted(set(members)):
        raise ConfigError(f"subset {members} must be strictly increasing")
    if members and (members[0] < 0 or members[-1] >= k_workers):
        raise ConfigError(f"subset {members} has members outside [0, {k_workers})")
    return sum(binom(m, j + 1) for j, m in enumerate(members))


def subset_unrank(index: int, k_workers: int, r: int) -> tuple[int, ...]:
    """Subset at a colex rank; inverse of subset_rank."""
    _check_subset_params(k_workers, r)
    total = binom(k_workers, r)
    if not 0 <= index < total:
        raise ConfigError(f"index {index} outside [0, {total}) for K={k_workers}, r={r}")
    members = []
    remaining = index
    for j in range(r, 0, -1):
        m = j - 1
        while binom(m + 1, j) <= remaining:
            m += 1
        members.append(m)
        remaining -= binom(m, j)
    return tuple(reversed(members))


def _check_subset_params(k_workers: int, r: int) -> None:
    if r < 1 or r > k_workers:
        raise ConfigError(f"subset size r={r} must satisfy 1 <= r <= K={k_workers}")


# ---------------------------------------------------------------------------
# Block designs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BlockDesign:
    """A 2-(v, k, lam) design: every point pair lies in exactly lam blocks."""

    v: int
    k: int
    lam: int
    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(tuple(sorted(b)) for b in self.blocks))
        for block in self.blocks:
            if len(set(block)) != self.k:
                raise ConfigError(f"block {block} must have {self.k} distinct points")
            if block[0] < 0 or block[-1] >= self.v:
                raise ConfigError(f"block {block} has points outside [0, {self.v})")
        counts = {pair: 0 for pair in combinations(range(self.v), 2)}
        for block in self.blocks:
            for pair in combinations(block, 2):
                counts[pair] += 1
        bad = {pair: c for pair, c in counts.items() if c != self.lam}
        if bad:
            pair, c = next(iter(bad.items()))
            raise ConfigError(
                f"pair {pair} appears in {c} blocks, expected lambda={self.lam}"
            )


def build_steiner_triple_system(v: int) -> BlockDesign:
    """A verified 2-(v, 3, 1) design with v(v-1)/6 blocks."""
    if v < 7 or v % 6 not in (1, 3):
        raise UnsupportedOrderError(
            f"v={v} admits no triple system: need v >= 7 and v = 1 or 3 (mod 6)"
        )
    blocks = _bose_blocks(v) if v % 6 == 3 else _skolem_blocks(v)
    return BlockDesign(v=v, k=3, lam=1, blocks=tuple(blocks))


def _bose_blocks(v: int) -> list[tuple[int, int, int]]:
    # Points are Z_m x {0,1,2} with m = 2n+1 odd; x*y = (x+y)(n+1) mod m
    # is the idempotent commutative quasigroup behind the construction.
    n = (v - 3) // 6
    m = 2 * n + 1

    def point(i, j):
        return j * m + i

    def star(x, y):
        return ((x + y) * (n + 1)) % m

    blocks = [(point(i, 0), point(i, 1), point(i, 2)) for i in range(m)]
    for x, y in combinations(range(m), 2):
        for j in range(3):
            blocks.append((point(x, j), point(y, j), point(star(x, y), (j + 1) % 3)))
    return blocks


def _skolem_blocks(v: int) -> list[tuple[int, int, int]]:
    # Points are Z_{2n} x {0,1,2} plus one infinity point; the quasigroup
    # is half-idempotent: pi(2x) = x, pi(2x+1) = x + n.
    n = (v - 1) // 6
    m = 2 * n
    infinity = v - 1

    def point(i, j):
        return j * m + i

    def star(x, y):
        s = (x + y) % m
        return s // 2 if s % 2 == 0 else (s - 1) // 2 + n

    blocks = [(point(x, 0), point(x, 1), point(x, 2)) for x in range(n)]
    for x in range(n):
        for j in range(3):
            blocks.append((infinity, point(x + n, j), point(x, (j + 1) % 3)))
    for x, y in combinations(range(m), 2):
        for j in range(3):
            blocks.append((point(x, j), point(y, j), point(star(x, y), (j + 1) % 3)))
    return blocks


# ---------------------------------------------------------------------------
# Worker permutations
# ---------------------------------------------------------------------------

def sample_permutation(k_workers: int, seed) -> tuple[int, ...]:
    """Uniform bijection on [0, K); accepts a seed or a Generator."""
    if k_workers < 1:
        raise ConfigError(f"K={k_workers} must be at least 1")
    rng = np.random.default_rng(seed)
    return tuple(int(x) for x in rng.permutation(k_workers))


def inverse_permutation(perm: tuple[int, ...]) -> tuple[int, ...]:
    inverse = [0] * len(perm)
    for i, p in enumerate(perm):
        inverse[p] = i
    return tuple(inverse)


def permute_block(perm: tuple[int, ...], block: tuple[int, ...]) -> tuple[int, ...]:
    """Image of a block under a permutation, sorted ascending."""
    return tuple(sorted(perm[p] for p in block))
