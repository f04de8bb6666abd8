"""Permutation arithmetic, lexicographic relations and fixing-set bookkeeping.

All indices in this module are 0-based except for cycle notation:
:meth:`Permutation.from_cycles` and :meth:`Permutation.cycles` speak the usual
1-based mathematical notation ``(1,2,3)`` so that instances written in cycle
form read naturally.  Everything else — fixing sets, vectors, supports,
blocks — uses 0-based positions.
"""

from __future__ import annotations

from typing import Iterable, List, NamedTuple, Optional, Sequence, Set, Tuple


class DimensionError(ValueError):
    """Raised when two objects live on different ground sets."""


class InvalidPermutationError(ValueError):
    """Raised when an image array or cycle list is not a bijection."""


class InvalidRestrictionError(ValueError):
    """Raised when restricting a permutation to a non-invariant index set."""


class Fixing(NamedTuple):
    """A single variable fixing: entry (0-based) set to a bit value."""

    entry: int
    value: int

    def converse(self) -> "Fixing":
        return Fixing(self.entry, 1 - self.value)


class LexOutcome(NamedTuple):
    """Result of a partial lexicographic comparison.

    ``relation`` is one of ``"greater"``, ``"equal"``, ``"less"``; ``witness``
    is the 1-based position of the first difference (absent iff equal).
    """

    relation: str
    witness: Optional[int]


class Permutation:
    """A bijection of {0, ..., n-1} stored as image and inverse-image arrays.

    Both arrays are kept so that ``inverse_of(i)`` is O(1); the propagation
    engine looks up preimages on every index-increase event.
    """

    __slots__ = ("n", "image", "inv")

    def __init__(self, image: Sequence[int]):
        img = tuple(image)
        n = len(img)
        seen = [False] * n
        for v in img:
            if not isinstance(v, int) or v < 0 or v >= n or seen[v]:
                raise InvalidPermutationError(
                    "image array of length %d is not a bijection: %r" % (n, img)
                )
            seen[v] = True
        inv = [0] * n
        for i, v in enumerate(img):
            inv[v] = i
        self.n = n
        self.image = img
        self.inv = tuple(inv)

    # -- constructors ------------------------------------------------------

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(range(n))

    @classmethod
    def from_cycles(cls, n: int, cycles: Iterable[Sequence[int]]) -> "Permutation":
        """Build a permutation of {0..n-1} from 1-based cycle notation.

        ``from_cycles(3, [(1, 2, 3)])`` maps 1->2, 2->3, 3->1 in 1-based terms.
        """
        image = list(range(n))
        touched: Set[int] = set()
        for cyc in cycles:
            for a in cyc:
                if not 1 <= a <= n:
                    raise InvalidPermutationError(
                        "cycle entry %r outside 1..%d" % (a, n)
                    )
                if a in touched:
                    raise InvalidPermutationError(
                        "cycle entry %r appears twice" % (a,)
                    )
                touched.add(a)
            for i, a in enumerate(cyc):
                b = cyc[(i + 1) % len(cyc)]
                image[a - 1] = b - 1
        return cls(image)

    # -- views -------------------------------------------------------------

    def cycles(self) -> List[Tuple[int, ...]]:
        """Cycle form in 1-based notation; fixed points omitted.

        Canonical: each cycle starts at its smallest entry, cycles sorted by
        that entry, so the round trip through ``from_cycles`` is stable.
        """
        out: List[Tuple[int, ...]] = []
        seen = [False] * self.n
        for start in range(self.n):
            if seen[start] or self.image[start] == start:
                continue
            cyc = [start]
            seen[start] = True
            cur = self.image[start]
            while cur != start:
                cyc.append(cur)
                seen[cur] = True
                cur = self.image[cur]
            out.append(tuple(c + 1 for c in cyc))
        return out

    def support(self) -> List[int]:
        """Sorted 0-based indices moved by the permutation."""
        return [i for i in range(self.n) if self.image[i] != i]

    def is_identity(self) -> bool:
        return all(self.image[i] == i for i in range(self.n))

    # -- group operations --------------------------------------------------

    def __call__(self, i: int) -> int:
        return self.image[i]

    def inverse_of(self, i: int) -> int:
        return self.inv[i]

    def inverse(self) -> "Permutation":
        return Permutation(self.inv)

    def compose(self, other: "Permutation") -> "Permutation":
        """self ∘ other: first apply ``other``, then ``self``."""
        if self.n != other.n:
            raise DimensionError(
                "compose: sizes differ (%d vs %d)" % (self.n, other.n)
            )
        return Permutation([self.image[other.image[i]] for i in range(self.n)])

    def __pow__(self, e: int) -> "Permutation":
        if e < 0:
            return self.inverse() ** (-e)
        result = Permutation.identity(self.n)
        base = self
        while e:
            if e & 1:
                result = result.compose(base)
            base = base.compose(base)
            e >>= 1
        return result

    def order(self) -> int:
        """Smallest t >= 1 with perm^t = identity (lcm of cycle lengths)."""
        from math import lcm

        result = 1
        for cyc in self.cycles():
            result = lcm(result, len(cyc))
        return result

    def apply(self, x: Sequence[int]) -> Tuple[int, ...]:
        """Permute coordinates: result[i] = x[inv(i)]."""
        if len(x) != self.n:
            raise DimensionError(
                "apply: vector length %d != n=%d" % (len(x), self.n)
            )
        return tuple(x[self.inv[i]] for i in range(self.n))

    def restrict(self, indices: Iterable[int]) -> "Permutation":
        """Restriction to an invariant index set; identity elsewhere."""
        block = set(indices)
        image = list(range(self.n))
        for i in block:
            j = self.image[i]
            if j not in block:
                raise InvalidRestrictionError(
                    "index set is not invariant: %d maps outside" % (i,)
                )
            image[i] = j
        return Permutation(image)

    # -- misc --------------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Permutation) and self.image == other.image

    def __hash__(self) -> int:
        return hash(self.image)

    def __repr__(self) -> str:
        cyc = self.cycles()
        if not cyc:
            return "Permutation.identity(%d)" % self.n
        body = "".join("(%s)" % ",".join(map(str, c)) for c in cyc)
        return "Permutation[n=%d]%s" % (self.n, body)


# -- module-level helpers mirroring the verb-style API ----------------------


def apply(perm: Permutation, x: Sequence[int]) -> Tuple[int, ...]:
    return perm.apply(x)


def compose(a: Permutation, b: Permutation) -> Permutation:
    return a.compose(b)


def inverse(a: Permutation) -> Permutation:
    return a.inverse()


def identity(n: int) -> Permutation:
    return Permutation.identity(n)


def order(perm: Permutation) -> int:
    return perm.order()


def restrict(perm: Permutation, indices: Iterable[int]) -> Permutation:
    return perm.restrict(indices)


def group_elements(
    gen: Permutation,
    max_count: int = 10**4,
    max_weight: int = 5 * 10**6,
) -> List[Permutation]:
    """Materialize the powers gen^1 .. gen^k, identity excluded.

    k is maximal with k <= order-1, k <= max_count and |supp(gen)| * k
    <= max_weight.  These caps act as a safeguard against gigantic groups.
    """
    s = len(gen.support())
    if s == 0:
        return []
    k = gen.order() - 1
    k = min(k, max_count)
    if s > 0:
        k = min(k, max_weight // s)
    out: List[Permutation] = []
    cur = gen
    for _ in range(k):
        out.append(cur)
        cur = cur.compose(gen)
    return out


def lex_compare_upto(x: Sequence[int], y: Sequence[int], k: int) -> LexOutcome:
    """Compare the first k-1 positions lexicographically.

    ``k`` ranges over 1..n+1; ``k = n+1`` is the full order, ``k = 1``
    compares nothing and always reports equal.  The witness is the 1-based
    position of the first difference.
    """
    if len(x) != len(y):
        raise DimensionError("lex_compare_upto: lengths differ")
    if not 1 <= k <= len(x) + 1:
        raise ValueError("k=%d out of range 1..%d" % (k, len(x) + 1))
    for i in range(k - 1):
        if x[i] != y[i]:
            rel = "greater" if x[i] > y[i] else "less"
            return LexOutcome(rel, i + 1)
    return LexOutcome("equal", None)


def is_monotone(cycle: Sequence[int]) -> bool:
    """True iff the cycle has exactly one descent (one entry mapped lower).

    The cycle may be written starting anywhere and in either 0- or 1-based
    labels; only relative order matters.
    """
    k = len(cycle)
    if k < 2:
        return True
    descents = sum(1 for i in range(k) if cycle[(i + 1) % k] < cycle[i])
    return descents == 1


class SubcycleDecomposition(NamedTuple):
    """Ordered monotone subcycles: blocks of 0-based supports, increasing."""

    blocks: Tuple[Tuple[int, ...], ...]  # sorted support of each subcycle
    cycles: Tuple[Tuple[int, ...], ...]  # the subcycles themselves (0-based)


def is_monotone_ordered(perm: Permutation) -> Optional[SubcycleDecomposition]:
    """Decompose into ordered monotone subcycles, or None if impossible.

    Ordered means the supports are order-separated: every entry of block i is
    smaller than every entry of block i+1.  Fixed points may fall anywhere;
    they never influence a lexicographic comparison of x and perm(x).
    """
    raw = perm.cycles()  # 1-based
    cycles0 = [tuple(a - 1 for a in cyc) for cyc in raw]
    for cyc in cycles0:
        if not is_monotone(cyc):
            return None
    cycles0.sort(key=min)
    for a, b in zip(cycles0, cycles0[1:]):
        if max(a) >= min(b):
            return None
    blocks = tuple(tuple(sorted(c)) for c in cycles0)
    return SubcycleDecomposition(blocks, tuple(cycles0))


class FixState:
    """Disjoint sets of entries fixed to 0 and to 1 (0-based).

    Mutable and single-owner; copy before handing to a propagation run that
    should not see later changes.
    """

    __slots__ = ("n", "fixed0", "fixed1")

    def __init__(
        self,
        n: int,
        fixed0: Iterable[int] = (),
        fixed1: Iterable[int] = (),
    ):
        f0 = set(fixed0)
        f1 = set(fixed1)
        for i in f0 | f1:
            if not 0 <= i < n:
                raise ValueError("fixed entry %d outside 0..%d" % (i, n - 1))
        self.n = n
        self.fixed0 = f0
        self.fixed1 = f1

    def is_consistent(self) -> bool:
        return not (self.fixed0 & self.fixed1)

    def value(self, i: int) -> Optional[int]:
        if i in self.fixed0:
            return 0
        if i in self.fixed1:
            return 1
        return None

    def is_fixed(self, i: int) -> bool:
        return i in self.fixed0 or i in self.fixed1

    def unfixed(self) -> List[int]:
        return [i for i in range(self.n) if not self.is_fixed(i)]

    def copy(self) -> "FixState":
        return FixState(self.n, self.fixed0, self.fixed1)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, FixState)
            and self.n == other.n
            and self.fixed0 == other.fixed0
            and self.fixed1 == other.fixed1
        )

    def __repr__(self) -> str:
        return "FixState(n=%d, fixed0=%r, fixed1=%r)" % (
            self.n,
            sorted(self.fixed0),
            sorted(self.fixed1),
        )
