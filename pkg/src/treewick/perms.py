"""Permutations of finite ground sets, numerical partitions, cycle-cuttings.

Ground sets are finite sets of positive integer labels, usually <n> = {1,..,n}.
Striking a subset out of a permutation produces a permutation of the leftover
labels, so the ground set is carried explicitly.  Composition is right-to-left
everywhere: (p * q)(i) = p(q(i)).
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from math import factorial, prod
from typing import Iterable, Iterator, Sequence

_CYCLE_RE = re.compile(r"\(([^()]*)\)")


@dataclass(frozen=True)
class Permutation:
    """A bijection of a finite set of positive integer labels onto itself.

    ``domain`` is sorted and ``images[k]`` is the image of ``domain[k]``.

    >>> p = Permutation.from_cycles(4, "(1,2,3,4)")
    >>> p(1), p(4)
    (2, 1)
    >>> p.cycle_string()
    '(1,2,3,4)'
    """

    domain: tuple[int, ...]
    images: tuple[int, ...]

    def __post_init__(self):
        if list(self.domain) != sorted(set(self.domain)):
            raise ValueError("domain must be sorted distinct labels")
        if any(x < 1 for x in self.domain):
            raise ValueError("labels must be positive integers")
        if sorted(self.images) != list(self.domain):
            raise ValueError("images must be a bijection of the domain")

    # -- constructors --------------------------------------------------

    @staticmethod
    def identity(n: int) -> "Permutation":
        dom = tuple(range(1, n + 1))
        return Permutation(dom, dom)

    @staticmethod
    def identity_on(labels: Iterable[int]) -> "Permutation":
        dom = tuple(sorted(labels))
        return Permutation(dom, dom)

    @staticmethod
    def from_images(images: Sequence[int]) -> "Permutation":
        """Permutation of <n> with sigma(i) = images[i-1]."""
        return Permutation(tuple(range(1, len(images) + 1)), tuple(images))

    @staticmethod
    def from_cycles(ground: "int | Iterable[int]",
                    cycles: "str | Iterable[Sequence[int]]") -> "Permutation":
        """Build from disjoint cycles; labels not mentioned are fixed points.

        ``ground`` is either n (ground set <n>) or an explicit label set.
        String form follows the grammar '(' int (',' int)* ')' repeated,
        whitespace ignored: "(1,8,6)(2,3,9,5)".  Repeated labels are rejected.
        """
        if isinstance(ground, int):
            dom = tuple(range(1, ground + 1))
        else:
            dom = tuple(sorted(set(ground)))
        if isinstance(cycles, str):
            text = re.sub(r"\s+", "", cycles)
            if not re.fullmatch(r"(\(\d+(,\d+)*\))*", text):
                raise ValueError(f"bad cycle notation: {cycles!r}")
            cycles = [tuple(int(t) for t in grp.split(","))
                      for grp in _CYCLE_RE.findall(text) if grp]
        mapping = {i: i for i in dom}
        seen: set[int] = set()
        for cyc in cycles:
            cyc = tuple(cyc)
            for x in cyc:
                if x not in mapping:
                    raise ValueError(f"label {x} outside ground set")
                if x in seen:
                    raise ValueError(f"label {x} repeated in cycles")
                seen.add(x)
            for a, b in zip(cyc, cyc[1:] + cyc[:1]):
                mapping[a] = b
        return Permutation(dom, tuple(mapping[i] for i in dom))

    # -- basic queries ---------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.domain)

    def __call__(self, i: int) -> int:
        return self.images[self._pos()[i]]

    def _pos(self) -> dict[int, int]:
        # lazily cached; not a dataclass field, so eq/hash are unaffected
        cached = getattr(self, "_posmap", None)
        if cached is None:
            cached = {x: k for k, x in enumerate(self.domain)}
            object.__setattr__(self, "_posmap", cached)
        return cached

    def is_identity(self) -> bool:
        return self.domain == self.images

    def cycles(self) -> tuple[tuple[int, ...], ...]:
        """Canonical factorization: disjoint cycles of length >= 2, each
        rotated to start at its least label, sorted by least label."""
        out = []
        seen: set[int] = set()
        pos = self._pos()
        for start in self.domain:
            if start in seen:
                continue
            cyc = [start]
            cur = self.images[pos[start]]
            while cur != start:
                cyc.append(cur)
                cur = self.images[pos[cur]]
            seen.update(cyc)
            if len(cyc) > 1:
                out.append(tuple(cyc))
        return tuple(out)

    def orbits(self) -> tuple[frozenset[int], ...]:
        """All orbits, singletons included, sorted by least element."""
        seen: set[int] = set()
        pos = self._pos()
        out = []
        for start in self.domain:
            if start in seen:
                continue
            orb = {start}
            cur = self.images[pos[start]]
            while cur != start:
                orb.add(cur)
                cur = self.images[pos[cur]]
            seen.update(orb)
            out.append(frozenset(orb))
        return tuple(out)

    @property
    def num_orbits(self) -> int:
        return len(self.orbits())

    def support(self) -> frozenset[int]:
        return frozenset(i for i, im in zip(self.domain, self.images) if i != im)

    def fixed_points(self) -> frozenset[int]:
        return frozenset(i for i, im in zip(self.domain, self.images) if i == im)

    def cycle_type(self) -> "NumericalPartition":
        return NumericalPartition(tuple(sorted((len(o) for o in self.orbits()),
                                               reverse=True)))

    def cycle_string(self) -> str:
        cycs = self.cycles()
        if not cycs:
            return "()"
        return "".join("(" + ",".join(str(x) for x in c) + ")" for c in cycs)

    # -- algebra ---------------------------------------------------------

    def __mul__(self, other: "Permutation") -> "Permutation":
        """(p * q)(i) = p(q(i)); right-to-left, like function composition."""
        if self.domain != other.domain:
            raise ValueError("cannot compose permutations of different ground sets")
        pos = self._pos()
        return Permutation(self.domain,
                           tuple(self.images[pos[qi]] for qi in other.images))

    def inverse(self) -> "Permutation":
        pairs = sorted(zip(self.images, self.domain))
        return Permutation(self.domain, tuple(b for _, b in pairs))

    def conjugated_by(self, rho: "Permutation") -> "Permutation":
        """rho * self * rho^{-1}."""
        return rho * self * rho.inverse()

    def restricted_to(self, labels: Iterable[int]) -> "Permutation":
        """Restriction to a stable subset of the ground set."""
        sub = sorted(set(labels))
        pos = self._pos()
        images = []
        for i in sub:
            im = self.images[pos[i]]
            if im not in set(sub):
                raise ValueError("subset is not stable under the permutation")
            images.append(im)
        return Permutation(tuple(sub), tuple(images))

    def strike(self, struck: Iterable[int]) -> "Permutation":
        """Cancel a subset out of the cycles.

        The image of a surviving label i is tau^m(i) for the least m >= 1
        landing outside the struck set; cycles that shrink to length <= 1
        become fixed points of the result.
        """
        struck = set(struck)
        if not struck <= set(self.domain):
            raise ValueError("struck labels must lie in the ground set")
        keep = tuple(i for i in self.domain if i not in struck)
        pos = self._pos()
        images = []
        for i in keep:
            cur = self.images[pos[i]]
            while cur in struck:
                cur = self.images[pos[cur]]
            images.append(cur)
        return Permutation(keep, tuple(images))

    def generates_transitively_with(self, other: "Permutation") -> bool:
        """Whether the two permutations together act transitively."""
        if self.domain != other.domain:
            raise ValueError("ground sets differ")
        if not self.domain:
            return True
        parent = {i: i for i in self.domain}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for perm in (self, other):
            for i, im in zip(perm.domain, perm.images):
                parent[find(i)] = find(im)
        root = find(self.domain[0])
        return all(find(i) == root for i in self.domain)


def random_permutation(n: int, rng) -> Permutation:
    """Uniform random element of S_n from a seeded random.Random."""
    images = list(range(1, n + 1))
    rng.shuffle(images)
    return Permutation.from_images(images)


@dataclass(frozen=True)
class NumericalPartition:
    """A weakly decreasing tuple of positive integers.

    >>> lam = NumericalPartition((4, 2, 2))
    >>> lam.size, lam.length, lam.z(), lam.parts_product()
    (8, 3, 64, 16)
    """

    parts: tuple[int, ...]

    def __post_init__(self):
        if any(p < 1 for p in self.parts):
            raise ValueError("parts must be positive")
        if list(self.parts) != sorted(self.parts, reverse=True):
            raise ValueError("parts must be weakly decreasing")

    @staticmethod
    def from_string(text: str) -> "NumericalPartition":
        parts = tuple(int(t) for t in text.replace(" ", "").split(",") if t)
        return NumericalPartition(tuple(sorted(parts, reverse=True)))

    @property
    def size(self) -> int:
        return sum(self.parts)

    @property
    def length(self) -> int:
        return len(self.parts)

    def multiplicity(self, i: int) -> int:
        return sum(1 for p in self.parts if p == i)

    def z(self) -> int:
        """Centralizer order: product over part sizes i of i^m_i * m_i!."""
        out = 1
        for i in sorted(set(self.parts)):
            m = self.multiplicity(i)
            out *= i ** m * factorial(m)
        return out

    def parts_product(self) -> int:
        """Product of the parts; also the number of cycle-cuttings of any
        permutation with this cycle type."""
        return prod(self.parts)

    def is_eulerian(self) -> bool:
        return all(p % 2 == 0 for p in self.parts)

    def representative(self) -> Permutation:
        """The permutation of <|lambda|> whose cycles are consecutive runs."""
        cycles = []
        start = 1
        for p in self.parts:
            cycles.append(tuple(range(start, start + p)))
            start += p
        return Permutation.from_cycles(self.size, cycles)

    def __str__(self) -> str:
        return ",".join(str(p) for p in self.parts)


def partitions_of(n: int, max_part: "int | None" = None) -> Iterator[NumericalPartition]:
    """All numerical partitions of n, largest part first."""
    if max_part is None:
        max_part = n
    if n == 0:
        yield NumericalPartition(())
        return
    for first in range(min(n, max_part), 0, -1):
        for rest in partitions_of(n - first, first):
            yield NumericalPartition((first,) + rest.parts)


def as_partition(value) -> NumericalPartition:
    if isinstance(value, NumericalPartition):
        return value
    if isinstance(value, str):
        return NumericalPartition.from_string(value)
    return NumericalPartition(tuple(sorted(value, reverse=True)))


@dataclass(frozen=True)
class CycleCutting:
    """A choice of one point from each nontrivial orbit of a permutation."""

    base: Permutation
    points: frozenset[int]

    def __post_init__(self):
        nontrivial = [o for o in self.base.orbits() if len(o) > 1]
        if len(self.points) != len(nontrivial):
            raise ValueError("need exactly one point per nontrivial orbit")
        for orb in nontrivial:
            if len(orb & self.points) != 1:
                raise ValueError("need exactly one point per nontrivial orbit")
        if not self.points <= self.base.support():
            raise ValueError("cutting points must lie in the support")


def cycle_cuttings(sigma: Permutation) -> list[CycleCutting]:
    """All cycle-cuttings; there are exactly prod(orbit sizes > 1) of them."""
    nontrivial = [sorted(o) for o in sigma.orbits() if len(o) > 1]
    out = []
    for choice in itertools.product(*nontrivial):
        out.append(CycleCutting(sigma, frozenset(choice)))
    return out


def orbit_size(sigma: Permutation, i: int) -> int:
    """Size of the sigma-orbit through i."""
    for orb in sigma.orbits():
        if i in orb:
            return len(orb)
    raise ValueError(f"label {i} not in ground set")


def cuttings_count(sigma: Permutation) -> int:
    """Product of the nontrivial orbit sizes of sigma."""
    return prod(len(o) for o in sigma.orbits() if len(o) > 1)
