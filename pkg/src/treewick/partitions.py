"""The refinement lattice of set partitions of <n>.

Interval enumeration, the explicit Mobius function, joint cumulants of a
family of block variables, Wick pair partitions, and the 0/1 matrix
representing a partition.  All scalar arithmetic here is exact.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Callable, Iterable, Iterator, Sequence

# Enumerating the interval [Theta : 1_n] walks all coarsenings of Theta;
# growth is the Bell number of the block count, so cap it.
DEFAULT_BLOCK_LIMIT = 10


def set_partitions(items: Sequence) -> Iterator[list[list]]:
    """All partitions of a finite sequence into nonempty blocks.

    Blocks are listed in order of first appearance of their least-index
    member, which makes the stream deterministic.
    """
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        yield [[first]] + [blk[:] for blk in part]
        for k in range(len(part)):
            yield ([blk[:] for blk in part[:k]]
                   + [[first] + part[k][:]]
                   + [blk[:] for blk in part[k + 1:]])


def pair_partitions(items: Sequence) -> Iterator[list[tuple]]:
    """All partitions of a finite sequence into unordered pairs.

    Yields nothing when the length is odd; yields the empty matching once
    when the sequence is empty.  The count for even length 2m is (2m-1)!!.
    """
    items = list(items)
    if len(items) % 2:
        return

    def rec(rem):
        if not rem:
            yield []
            return
        a = rem[0]
        for k in range(1, len(rem)):
            b = rem[k]
            rest = rem[1:k] + rem[k + 1:]
            for rest_match in rec(rest):
                yield [(a, b)] + rest_match

    yield from rec(items)


@dataclass(frozen=True)
class SetPartition:
    """A partition of <n> into disjoint nonempty blocks.

    Canonical form sorts blocks by least element; text form is
    "{1,2|3,4,5|6}".
    """

    n: int
    blocks: tuple[frozenset[int], ...]

    def __post_init__(self):
        seen: set[int] = set()
        for blk in self.blocks:
            if not blk:
                raise ValueError("empty block")
            if blk & seen:
                raise ValueError("blocks must be disjoint")
            seen |= blk
        if seen != set(range(1, self.n + 1)):
            raise ValueError("blocks must cover {1,..,n}")
        if list(self.blocks) != sorted(self.blocks, key=min):
            raise ValueError("blocks must be sorted by least element")

    # -- constructors --------------------------------------------------

    @staticmethod
    def from_blocks(n: int, blocks: Iterable[Iterable[int]]) -> "SetPartition":
        blks = tuple(sorted((frozenset(b) for b in blocks), key=min))
        return SetPartition(n, blks)

    @staticmethod
    def bottom(n: int) -> "SetPartition":
        return SetPartition(n, tuple(frozenset([i]) for i in range(1, n + 1)))

    @staticmethod
    def top(n: int) -> "SetPartition":
        return SetPartition(n, (frozenset(range(1, n + 1)),))

    @staticmethod
    def from_string(n: int, text: str) -> "SetPartition":
        body = text.strip()
        if not (body.startswith("{") and body.endswith("}")):
            raise ValueError(f"bad partition text: {text!r}")
        body = re.sub(r"\s+", "", body[1:-1])
        blocks = [[int(t) for t in blk.split(",") if t] for blk in body.split("|")]
        return SetPartition.from_blocks(n, blocks)

    def to_string(self) -> str:
        return "{" + "|".join(",".join(str(i) for i in sorted(b))
                              for b in self.blocks) + "}"

    # -- order and structure ---------------------------------------------

    @property
    def num_blocks(self) -> int:
        return len(self.blocks)

    def block_index(self) -> dict[int, int]:
        cached = getattr(self, "_blkidx", None)
        if cached is None:
            cached = {i: k for k, blk in enumerate(self.blocks) for i in blk}
            object.__setattr__(self, "_blkidx", cached)
        return cached

    def block_containing(self, i: int) -> frozenset[int]:
        return self.blocks[self.block_index()[i]]

    def related(self, i: int, j: int) -> bool:
        idx = self.block_index()
        return idx[i] == idx[j]

    def refines(self, other: "SetPartition") -> bool:
        if self.n != other.n:
            raise ValueError("ground sets differ")
        idx = other.block_index()
        return all(len({idx[i] for i in blk}) == 1 for blk in self.blocks)

    def matrix(self) -> tuple[tuple[int, ...], ...]:
        """The symmetric 0/1 matrix with unit diagonal representing the
        partition: entry (i,j) is 1 iff i and j share a block."""
        idx = self.block_index()
        return tuple(tuple(1 if idx[i] == idx[j] else 0
                           for j in range(1, self.n + 1))
                     for i in range(1, self.n + 1))


def join_bonds(theta: SetPartition, bonds: Iterable[Iterable[int]]) -> SetPartition:
    """The finest partition above theta in which every bond sits inside a
    block; equivalently the components of the graph whose vertices are the
    blocks of theta and whose edges are the bonds."""
    parent = list(range(theta.num_blocks))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    idx = theta.block_index()
    for bond in bonds:
        pair = tuple(bond)
        if len(set(pair)) != 2:
            raise ValueError(f"bond must be a 2-set: {bond!r}")
        a, b = pair
        parent[find(idx[a])] = find(idx[b])
    merged: dict[int, set[int]] = {}
    for k, blk in enumerate(theta.blocks):
        merged.setdefault(find(k), set()).update(blk)
    return SetPartition.from_blocks(theta.n, merged.values())


def interval_to_top(theta: SetPartition,
                    limit: int = DEFAULT_BLOCK_LIMIT) -> list[SetPartition]:
    """All partitions Pi with theta <= Pi <= 1_n."""
    k = theta.num_blocks
    if k > limit:
        raise ValueError(f"interval enumeration capped at {limit} blocks (got {k})")
    out = []
    for grouping in set_partitions(list(range(k))):
        blocks = [frozenset().union(*(theta.blocks[i] for i in grp))
                  for grp in grouping]
        out.append(SetPartition.from_blocks(theta.n, blocks))
    return out


def all_partitions(n: int, limit: int = DEFAULT_BLOCK_LIMIT) -> list[SetPartition]:
    return interval_to_top(SetPartition.bottom(n), limit=limit)


def moebius(p1: SetPartition, p2: SetPartition) -> int:
    """Mobius function of the refinement lattice, in closed form:
    the product over blocks B of p2 of (-1)^(k_B - 1) (k_B - 1)! where k_B
    counts the blocks of p1 inside B."""
    if not p1.refines(p2):
        raise ValueError("arguments are not comparable (first must refine second)")
    idx = p2.block_index()
    counts = [0] * p2.num_blocks
    for blk in p1.blocks:
        counts[idx[min(blk)]] += 1
    out = 1
    for k in counts:
        out *= (-1) ** (k - 1) * factorial(k - 1)
    return out


def joint_cumulant(theta: SetPartition,
                   moment: Callable[[SetPartition], object],
                   limit: int = DEFAULT_BLOCK_LIMIT):
    """Mobius-inverted moment sum over the interval [theta : 1_n].

    ``moment(pi)`` must return the product over blocks B of pi of the
    expectation of the product of the theta-block variables inside B; any
    value type supporting + and integer * works (exact rationals,
    polynomials).
    """
    top = SetPartition.top(theta.n)
    total = None
    for pi in interval_to_top(theta, limit=limit):
        term = moebius(pi, top) * moment(pi)
        total = term if total is None else total + term
    return total


def subset_cumulant(labels: Iterable[int],
                    moment: Callable[[frozenset], Fraction]) -> Fraction:
    """Joint cumulant of the singleton variables indexed by ``labels`` from a
    moment table defined on subsets."""
    labels = sorted(labels)
    total = Fraction(0)
    for grouping in set_partitions(labels):
        k = len(grouping)
        weight = (-1) ** (k - 1) * factorial(k - 1)
        term = Fraction(1)
        for blk in grouping:
            term *= moment(frozenset(blk))
        total += weight * term
    return total


def subset_moment_from_cumulants(labels: Iterable[int],
                                 cumulant: Callable[[frozenset], Fraction]) -> Fraction:
    """Inverse of subset_cumulant: rebuild a moment as the partition sum of
    products of cumulants."""
    labels = sorted(labels)
    total = Fraction(0)
    for grouping in set_partitions(labels):
        term = Fraction(1)
        for blk in grouping:
            term *= cumulant(frozenset(blk))
        total += term
    return total


def orbit_partition(perm) -> SetPartition:
    """The partition of <n> into orbits of a permutation of <n>."""
    if perm.domain != tuple(range(1, perm.n + 1)):
        raise ValueError("orbit partition requires ground set {1,..,n}")
    return SetPartition.from_blocks(perm.n, perm.orbits())
