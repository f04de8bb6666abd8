"""Complete propagation for cyclic groups with monotone generators.

Two levels of structure are handled:

- a group generated by a single monotone cycle (or a subgroup of one):
  :func:`complete_fix_monotone_group` finds the full maximal fixing sets by
  per-permutation propagation plus feasibility peeking;
- a generator composed of ordered monotone subcycles:
  :func:`propagate_ordered_monotone` processes the blocks left to right,
  shrinking the acting subgroup through stabilizer filtering.

A monotone cycle visits its support in sorted order, so its entries behave
like a rotation of the induced positions; positions outside the support
never influence a lexicographic comparison of x and g(x) and are simply
carried along.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

from .core import (
    FixState,
    Permutation,
    is_monotone,
    is_monotone_ordered,
)
from .imptree import PropagationResult, propagate_set


class UnsupportedGroupError(ValueError):
    """The generator does not have the structure the algorithm needs."""


class CyclicSubgroup:
    """A subset of the powers of one generator, given by its exponents.

    ``exponents`` lists the non-identity elements as powers of the
    generator; together with the identity they must form a subgroup, which
    is verified on construction (stabilizer filtering always produces
    subgroups, but the check is cheap and catches bugs).
    """

    __slots__ = ("generator", "n", "ord", "exponents")

    def __init__(
        self,
        generator: Permutation,
        exponents: Optional[Iterable[int]] = None,
        check: bool = True,
    ):
        self.generator = generator
        self.n = generator.n
        self.ord = generator.order()
        if exponents is None:
            exps = set(range(1, self.ord))
        else:
            exps = {e % self.ord for e in exponents} - {0}
        self.exponents = tuple(sorted(exps))
        if check and not self._closed():
            raise ValueError(
                "exponents %r (mod %d) are not a subgroup"
                % (self.exponents, self.ord)
            )

    def _closed(self) -> bool:
        s = set(self.exponents) | {0}
        return all((a + b) % self.ord in s for a in s for b in s)

    @classmethod
    def generated_by(cls, gen: Permutation) -> "CyclicSubgroup":
        return cls(gen, None, check=False)

    def is_trivial(self) -> bool:
        return not self.exponents

    def elements(self) -> List[Permutation]:
        """Distinct non-identity elements, in exponent order."""
        out = []
        seen = set()
        for e in self.exponents:
            g = self.generator ** e
            if not g.is_identity() and g.image not in seen:
                seen.add(g.image)
                out.append(g)
        return out

    # -- stabilizers (exponent filtering) ----------------------------------

    def stab_pointwise(self, indices: Iterable[int]) -> "CyclicSubgroup":
        idx = list(indices)
        keep = []
        for e in self.exponents:
            g = self.generator ** e
            if all(g.image[i] == i for i in idx):
                keep.append(e)
        return CyclicSubgroup(self.generator, keep)

    def stab_setwise_pair(
        self, a: Iterable[int], b: Iterable[int]
    ) -> "CyclicSubgroup":
        sa, sb = set(a), set(b)
        keep = []
        for e in self.exponents:
            g = self.generator ** e
            if all(g.image[i] in sa for i in sa) and \
                    all(g.image[i] in sb for i in sb):
                keep.append(e)
        return CyclicSubgroup(self.generator, keep)

    def restrict_to_block(self, block: Iterable[int]) -> "CyclicSubgroup":
        """Elements restricted to an invariant block (identity elsewhere)."""
        blk = set(block)
        zeta = self.generator.restrict(blk)
        o = zeta.order()
        return CyclicSubgroup(zeta, [e % o for e in self.exponents])

    def __repr__(self) -> str:
        return "CyclicSubgroup(%r, exponents=%r)" % (
            self.generator, list(self.exponents))


def stab_pointwise(group: CyclicSubgroup, indices) -> CyclicSubgroup:
    return group.stab_pointwise(indices)


def stab_setwise_pair(group: CyclicSubgroup, a, b) -> CyclicSubgroup:
    return group.stab_setwise_pair(a, b)


# -- monotone single-cycle groups -------------------------------------------


def _monotone_support(group: CyclicSubgroup) -> List[int]:
    """Validate the generator as one monotone cycle; return sorted support.

    A monotone cycle maps each support entry to the next larger one and the
    largest back to the smallest.
    """
    gen = group.generator
    cyc = gen.cycles()
    if len(cyc) != 1:
        raise UnsupportedGroupError(
            "generator must be a single cycle, got %d cycles" % len(cyc))
    cycle0 = tuple(a - 1 for a in cyc[0])
    if not is_monotone(cycle0):
        raise UnsupportedGroupError("generator cycle is not monotone")
    return sorted(cycle0)


def prop4_witness(
    group: CyclicSubgroup, fixed0: Set[int], fixed1: Set[int]
) -> Tuple[int, ...]:
    """Certified member of the constrained set on a per-permutation-complete
    feasible state: ones exactly on the 1-fixed entries plus the first
    unfixed support entry; unfixed entries elsewhere get zero.
    """
    n = group.n
    support = _monotone_support(group)
    x = [0] * n
    for i in fixed1:
        x[i] = 1
    for i in support:
        if i not in fixed0 and i not in fixed1:
            x[i] = 1  # first unfixed support entry
            break
    return tuple(x)


def strict_witness(
    group: CyclicSubgroup, fixed0: Set[int], fixed1: Set[int]
) -> Tuple[int, ...]:
    """A vector strictly lex-greater than each of its non-identity images.

    Valid on feasible per-permutation-complete states with at least one
    unfixed support entry.  Two constructions, split on whether the first
    unfixed support position falls in the lower or upper half of the
    support: lower half additionally sets that position to one.
    """
    n = group.n
    support = _monotone_support(group)
    k = len(support)
    free_ranks = [r for r, i in enumerate(support)
                  if i not in fixed0 and i not in fixed1]
    if not free_ranks:
        raise ValueError("strict witness needs an unfixed support entry")
    ihat_rank = free_ranks[0]
    x = [0] * n
    for i in fixed1:
        x[i] = 1
    if (ihat_rank + 1) * 2 <= k:  # 1-based rank <= k/2
        x[support[ihat_rank]] = 1
    return tuple(x)


def _feasible_with(
    elems: Sequence[Permutation],
    n: int,
    fixed0: Set[int],
    fixed1: Set[int],
) -> Optional[PropagationResult]:
    """Per-permutation completion; None when infeasible."""
    if fixed0 & fixed1:
        return None
    if not elems:
        return PropagationResult.of(fixed0, fixed1)
    res = propagate_set(elems, FixState(n, fixed0, fixed1))
    return res if res.feasible else None


def complete_fix_monotone_group(
    group: CyclicSubgroup, fixings: FixState
) -> PropagationResult:
    """Maximal fixing sets for lex-leaders under a monotone cyclic group.

    First drives every group element's constraint to completeness, then
    peeks both values of each remaining unfixed support entry; an
    infeasible peek makes the opposite value permanent.  A cached witness
    vector skips peeks whose outcome it already certifies.
    """
    support = _monotone_support(group)
    n = group.n
    if not fixings.is_consistent():
        return PropagationResult.infeasible()
    elems = group.elements()
    if not elems:
        return PropagationResult.of(fixings.fixed0, fixings.fixed1)
    base = _feasible_with(elems, n, set(fixings.fixed0), set(fixings.fixed1))
    if base is None:
        return PropagationResult.infeasible()
    j0, j1 = set(base.fixed0), set(base.fixed1)
    witness = prop4_witness(group, j0, j1)
    for i in support:
        if i in j0 or i in j1:
            continue
        if witness[i] != 0:
            t = _feasible_with(elems, n, j0 | {i}, set(j1))
            if t is None:
                j1.add(i)
                continue
            witness = prop4_witness(group, set(t.fixed0), set(t.fixed1))
        if witness[i] != 1:
            t = _feasible_with(elems, n, set(j0), j1 | {i})
            if t is None:
                j0.add(i)
                # the cached witness has x_i = 0 already
            else:
                witness = prop4_witness(group, set(t.fixed0), set(t.fixed1))
    return PropagationResult.of(j0, j1)


def group_feasible_monotone(group: CyclicSubgroup, fixings: FixState) -> bool:
    """Group-level feasibility on a per-permutation-complete state.

    The group-constrained set is nonempty exactly when every single
    element's constraint is individually satisfiable, which per-permutation
    propagation decides.
    """
    _monotone_support(group)
    if not fixings.is_consistent():
        return False
    elems = group.elements()
    if not elems:
        return True
    return _feasible_with(
        elems, group.n, set(fixings.fixed0), set(fixings.fixed1)
    ) is not None


# -- ordered monotone subcycles ---------------------------------------------


def _ordered_blocks(group: CyclicSubgroup) -> List[Tuple[int, ...]]:
    decomp = is_monotone_ordered(group.generator)
    if decomp is None:
        raise UnsupportedGroupError(
            "generator is not an ordered composition of monotone cycles")
    return list(decomp.blocks)


def propagate_ordered_monotone(
    group: CyclicSubgroup,
    fixings: FixState,
    start_block: int = 1,
    compute_fixings: bool = True,
) -> PropagationResult:
    """Block-wise complete propagation for ordered monotone generators.

    Blocks are processed left to right.  In each block the restricted
    subgroup's constraints are driven to per-permutation completeness;
    with ``compute_fixings`` the remaining block entries are peeked through
    recursive feasibility-only calls that inherit the current subgroup and
    block position.  Afterwards the acting subgroup shrinks to the setwise
    stabilizer of the block's fixing classes (block fully fixed) or the
    pointwise stabilizer of the block.

    Even with ``compute_fixings`` false the per-permutation-complete sets
    are returned: they are valid fixings regardless, and callers that only
    want the feasibility verdict can ignore them.
    """
    res = _propagate_ordered(group, fixings, start_block, compute_fixings)
    return res[0]


def _propagate_ordered(
    group: CyclicSubgroup,
    fixings: FixState,
    start_block: int,
    compute_fixings: bool,
    want_witness: bool = False,
) -> Tuple[PropagationResult, Optional[Tuple[int, ...]]]:
    blocks = _ordered_blocks(group)
    m = len(blocks)
    if not 1 <= start_block <= m:
        raise ValueError("start_block %d outside 1..%d" % (start_block, m))
    n = group.n
    if not fixings.is_consistent():
        return PropagationResult.infeasible(), None
    j0, j1 = set(fixings.fixed0), set(fixings.fixed1)
    delta = group
    witness_parts: Dict[int, Tuple[int, ...]] = {}
    for c in range(start_block - 1, m):
        block = blocks[c]
        restr = delta.restrict_to_block(block)
        elems = restr.elements()
        if elems:
            t = _feasible_with(elems, n, j0, j1)
            if t is None:
                return PropagationResult.infeasible(), None
            j0, j1 = set(t.fixed0), set(t.fixed1)
        if want_witness:
            free = [i for i in block if i not in j0 and i not in j1]
            if elems and free:
                witness_parts[c] = strict_witness(restr, j0, j1)
            else:
                witness_parts[c] = prop4_witness(restr, j0, j1) if elems \
                    else tuple(1 if i in j1 else 0 for i in range(n))
        if compute_fixings:
            free = [i for i in block if i not in j0 and i not in j1]
            wit: Optional[Tuple[int, ...]] = None
            if free:
                # One feasibility call yields a certified member vector;
                # it lets us skip every peek it already decides.
                _, wit = _propagate_ordered(
                    delta, FixState(n, j0, j1), c + 1, False, True)
            for i in free:
                if i in j0 or i in j1:
                    continue
                if wit is None or wit[i] != 0:
                    r0, w0 = _propagate_ordered(
                        delta, FixState(n, j0 | {i}, j1), c + 1, False, True)
                    if not r0.feasible:
                        j1.add(i)
                        continue
                    wit = w0
                if wit is None or wit[i] != 1:
                    r1, w1 = _propagate_ordered(
                        delta, FixState(n, j0, j1 | {i}), c + 1, False, True)
                    if not r1.feasible:
                        j0.add(i)
                    else:
                        wit = w1
        if all(i in j0 or i in j1 for i in block):
            delta = delta.stab_setwise_pair(
                j0 & set(block), j1 & set(block))
        else:
            delta = delta.stab_pointwise(block)
    witness: Optional[Tuple[int, ...]] = None
    if want_witness:
        w = [1 if i in j1 else 0 for i in range(n)]
        for c, part in witness_parts.items():
            for i in blocks[c]:
                w[i] = part[i]
        witness = tuple(w)
    return PropagationResult.of(j0, j1), witness


# -- relabeling heuristics ---------------------------------------------------


@dataclass(frozen=True)
class RelabelPlan:
    """A bijection of positions making selected generators monotone/ordered.

    ``labeling`` maps an original position to its new position; applying the
    plan to a permutation g yields labeling ∘ g ∘ labeling⁻¹.
    """

    labeling: Permutation
    strategy: str

    def apply_to(self, perm: Permutation) -> Permutation:
        return self.labeling.compose(perm).compose(self.labeling.inverse())

    def map_vector(self, x: Sequence[int]) -> Tuple[int, ...]:
        """Reindex a vector from original to new positions."""
        return self.labeling.apply(x)

    def unmap_vector(self, x: Sequence[int]) -> Tuple[int, ...]:
        return self.labeling.inverse().apply(x)


def relabel(
    generators: Sequence[Permutation],
    strategy: str = "respect",
) -> RelabelPlan:
    """Choose new position labels so generators become monotone and ordered.

    Generators are visited in input order; one whose support overlaps
    already-relabeled positions is skipped.  For a processed generator the
    subcycles are ordered by the chosen strategy — ``max``: decreasing
    length, ``min``: increasing length, ``respect``: increasing smallest
    original position — and each subcycle receives consecutive new labels
    following the cycle from its smallest member.  Leftover positions keep
    their relative order at the end.
    """
    if not generators:
        raise ValueError("relabel needs at least one generator")
    if strategy not in ("max", "min", "respect"):
        raise ValueError("unknown strategy %r" % (strategy,))
    n = generators[0].n
    new_of: Dict[int, int] = {}
    next_label = 0
    for gen in generators:
        support = set(gen.support())
        if not support or support & set(new_of):
            continue
        cycles0 = [tuple(a - 1 for a in c) for c in gen.cycles()]
        if strategy == "max":
            cycles0.sort(key=len, reverse=True)
        elif strategy == "min":
            cycles0.sort(key=len)
        else:
            cycles0.sort(key=min)
        for cyc in cycles0:
            start = cyc.index(min(cyc))
            for k in range(len(cyc)):
                new_of[cyc[(start + k) % len(cyc)]] = next_label
                next_label += 1
    for i in range(n):
        if i not in new_of:
            new_of[i] = next_label
            next_label += 1
    return RelabelPlan(Permutation([new_of[i] for i in range(n)]), strategy)
