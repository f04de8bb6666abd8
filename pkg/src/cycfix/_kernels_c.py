"""Implication-tree kernel: per-permutation lexicographic fixing propagation.

This module is the hot core of the package.  It is deliberately written in
plain Python (no dataclasses, no fancy typing) so the identical source can be
compiled with Cython in pure-Python mode; ``cycfix.imptree`` picks the
compiled copy when available and falls back to this one.

The tree encodes, for one permutation ``g`` and a growing lexicographic
horizon, all minimal conjunctions of fixings that either force x < g(x) on
the horizon (necessary vertices, whose converse fixing is therefore implied)
or still allow equality on the horizon (loose ends).  Entries are 0-based.
"""

from collections import deque

ROOT = 0
CONDITIONAL = 1
NECESSARY = 2
LOOSE_END = 3

_KIND_NAMES = {ROOT: "root", CONDITIONAL: "cond", NECESSARY: "necc",
               LOOSE_END: "loose"}


class InternalLogicError(AssertionError):
    """A structural invariant of the propagation engine was violated."""


class Vertex(object):
    __slots__ = ("kind", "entry", "value", "parent", "children", "alive")

    def __init__(self, kind, entry, value, parent):
        self.kind = kind
        self.entry = entry
        self.value = value
        self.parent = parent
        self.children = []
        self.alive = True

    def __repr__(self):
        if self.kind in (CONDITIONAL, NECESSARY):
            return "<%s (%d,%d)>" % (_KIND_NAMES[self.kind], self.entry,
                                     self.value)
        return "<%s>" % _KIND_NAMES[self.kind]


class ImplicationTree(object):
    """Rooted tree of conditional / necessary / loose-end vertices.

    ``entry_map`` maps an entry to the live fixing vertices carrying it (at
    most one per branch); ``created`` counts every vertex ever allocated,
    which the caller checks against the linear work bound.
    """

    __slots__ = ("root", "loose_ends", "entry_map", "infeasible", "created")

    def __init__(self):
        self.root = Vertex(ROOT, -1, -1, None)
        self.loose_ends = set()
        self.entry_map = {}
        self.infeasible = False
        self.created = 1
        first = Vertex(LOOSE_END, -1, -1, self.root)
        self.root.children.append(first)
        self.loose_ends.add(first)
        self.created += 1

    # -- allocation and removal -------------------------------------------

    def new_vertex(self, kind, entry, value, parent):
        v = Vertex(kind, entry, value, parent)
        parent.children.append(v)
        self.created += 1
        if kind == LOOSE_END:
            self.loose_ends.add(v)
        else:
            self.entry_map.setdefault(entry, []).append(v)
        return v

    def _unregister(self, v):
        v.alive = False
        if v.kind == LOOSE_END:
            self.loose_ends.discard(v)
        elif v.kind in (CONDITIONAL, NECESSARY):
            lst = self.entry_map.get(v.entry)
            if lst is not None and v in lst:
                lst.remove(v)

    def remove_subtree(self, v, detach=True):
        """Remove v and all its descendants from the tree."""
        if detach and v.parent is not None and v in v.parent.children:
            v.parent.children.remove(v)
        stack = [v]
        while stack:
            w = stack.pop()
            self._unregister(w)
            stack.extend(w.children)
            w.children = []

    def remove_descendants(self, v):
        stack = list(v.children)
        v.children = []
        while stack:
            w = stack.pop()
            self._unregister(w)
            stack.extend(w.children)
            w.children = []

    def splice_out(self, v):
        """Remove v, reattaching its children to v's parent in place."""
        parent = v.parent
        idx = parent.children.index(v)
        parent.children[idx:idx + 1] = v.children
        for c in v.children:
            c.parent = parent
        v.children = []
        self._unregister(v)

    def reregister(self, v):
        """Re-file a fixing vertex after its value changed kind/value."""
        # entry is unchanged; nothing to move in entry_map.

    def sibling_of(self, v):
        parent = v.parent
        if parent is None or len(parent.children) != 2:
            return None
        a, b = parent.children
        return b if a is v else a


class PermPropState(object):
    """Propagation state for a single permutation.

    ``lex_index`` is the 1-based horizon: positions strictly below it have
    been consumed by index-increase events.
    """

    __slots__ = ("n", "image", "inv", "tree", "lex_index")

    def __init__(self, n, image, inv):
        self.n = n
        self.image = image
        self.inv = inv
        self.tree = ImplicationTree()
        self.lex_index = 1


class FixScheduler(object):
    """Pending-fixing stack with O(1) membership, plus a contradiction flag.

    Pushing both values for one entry means the two implied fixings are
    incompatible, which the caller reports as infeasibility.
    """

    __slots__ = ("stack", "pending", "contradiction")

    def __init__(self):
        self.stack = []
        self.pending = {}
        self.contradiction = False

    def push(self, entry, value):
        have = self.pending.get(entry)
        if have is None:
            self.pending[entry] = value
            self.stack.append((entry, value))
        elif have != value:
            self.contradiction = True

    def pop(self):
        entry, value = self.stack.pop()
        if self.pending.get(entry) == value:
            del self.pending[entry]
        return entry, value


def init_state(perm, fix0, fix1):
    """Fresh state: horizon 1, tree = root plus one loose end."""
    return PermPropState(perm.n, perm.image, perm.inv)


def first_conditional_ancestor(v):
    u = v.parent
    while u is not None:
        if u.kind == CONDITIONAL:
            return u
        u = u.parent
    return None


def h_value(state, fix0, fix1, entry, loose):
    """Value of an entry as seen from a loose end: 0, 1 or None (blank).

    An entry counts as set if it is globally fixed or if a fixing vertex on
    the loose end's rooted path carries it; the two cannot disagree.
    """
    if entry in fix0:
        return 0
    if entry in fix1:
        return 1
    u = loose.parent
    while u is not None:
        if u.kind in (CONDITIONAL, NECESSARY) and u.entry == entry:
            return u.value
        u = u.parent
    return None


def _h_pair(fix0, fix1, ei, ej, loose):
    """h for two entries with a single walk up from the loose end."""
    va = 0 if ei in fix0 else (1 if ei in fix1 else None)
    vb = 0 if ej in fix0 else (1 if ej in fix1 else None)
    u = loose.parent
    while u is not None and (va is None or vb is None):
        if u.kind in (CONDITIONAL, NECESSARY):
            if u.entry == ei and va is None:
                va = u.value
            elif u.entry == ej and vb is None:
                vb = u.value
        u = u.parent
    return va, vb


def _collapse_to_necessary(tree, u):
    """Turn conditional u into a necessary vertex with the converse fixing.

    All of u's descendants go away; if u had a sibling branch (u's parent was
    the diamond junction), the sibling is merged underneath the new necessary
    vertex: the sibling's necessary child — which carries the same fixing the
    new vertex now does — is spliced away and the sibling re-hangs below u.
    """
    sib = tree.sibling_of(u)
    tree.remove_descendants(u)
    u.kind = NECESSARY
    u.value = 1 - u.value
    if sib is not None and sib.alive:
        if sib.kind != CONDITIONAL or len(sib.children) != 1:
            raise InternalLogicError("diamond sibling has unexpected shape")
        x = sib.children[0]
        if x.kind != NECESSARY or x.entry != u.entry or x.value != u.value:
            raise InternalLogicError("diamond pairing broken at merge")
        tree.splice_out(x)
        sib.parent.children.remove(sib)
        sib.parent = u
        u.children.append(sib)


def _push_root_fixings(tree, sched):
    for c in tree.root.children:
        if c.kind == NECESSARY:
            sched.push(c.entry, c.value)


def index_increase_event(state, fix0, fix1, sched, touched=None):
    """Advance the lexicographic horizon by one position.

    Each loose end is replaced according to the pair (h(i), h(j)) where i is
    the new position and j its preimage; the (0,1) pair collapses the loose
    end's first conditional ancestor instead, marking the tree infeasible
    when there is none.
    """
    tree = state.tree
    p = state.lex_index - 1
    state.lex_index += 1
    ei = p
    ej = state.inv[p]
    if ei == ej:
        return
    if touched is not None:
        touched.add(ei)
        touched.add(ej)
    for v in list(tree.loose_ends):
        if not v.alive:
            continue
        a, b = _h_pair(fix0, fix1, ei, ej, v)
        if a == 0 and b == 1:
            u = first_conditional_ancestor(v)
            if u is None:
                tree.infeasible = True
                return
            _collapse_to_necessary(tree, u)
            continue
        if (a, b) in ((0, 0), (1, 1)):
            continue                      # loose end survives unchanged
        if a == 1 and b == 0:
            tree.remove_subtree(v)        # equality impossible, branch dies
            continue
        parent = v.parent
        tree.remove_subtree(v)
        if a is None and b is None:
            c1 = tree.new_vertex(CONDITIONAL, ei, 0, parent)
            n1 = tree.new_vertex(NECESSARY, ej, 0, c1)
            tree.new_vertex(LOOSE_END, -1, -1, n1)
            c2 = tree.new_vertex(CONDITIONAL, ej, 1, parent)
            n2 = tree.new_vertex(NECESSARY, ei, 1, c2)
            tree.new_vertex(LOOSE_END, -1, -1, n2)
        elif a == 0:                      # b is None
            w = tree.new_vertex(NECESSARY, ej, 0, parent)
            tree.new_vertex(LOOSE_END, -1, -1, w)
        elif a == 1:                      # b is None
            w = tree.new_vertex(CONDITIONAL, ej, 1, parent)
            tree.new_vertex(LOOSE_END, -1, -1, w)
        elif b == 0:                      # a is None
            w = tree.new_vertex(CONDITIONAL, ei, 0, parent)
            tree.new_vertex(LOOSE_END, -1, -1, w)
        else:                             # a is None, b == 1
            w = tree.new_vertex(NECESSARY, ei, 1, parent)
            tree.new_vertex(LOOSE_END, -1, -1, w)
    _push_root_fixings(tree, sched)


def variable_fixing_event(state, fix0, fix1, entry, value, sched):
    """Fold a just-applied global fixing (entry=value) into the tree."""
    tree = state.tree
    if tree.infeasible:
        return
    for v in list(tree.entry_map.get(entry, ())):
        if not v.alive:
            continue
        if v.value == value:
            # The fixing matches the vertex: its condition is met / its
            # implication discharged.  Splice it out; a sibling branch
            # hinged on the opposite condition and dies.
            sib = tree.sibling_of(v)
            tree.splice_out(v)
            if sib is not None and sib.alive:
                tree.remove_subtree(sib)
        elif v.kind == CONDITIONAL:
            tree.remove_subtree(v)
        else:
            u = first_conditional_ancestor(v)
            if u is None:
                tree.infeasible = True
                return
            _collapse_to_necessary(tree, u)
    _push_root_fixings(tree, sched)


def completeness_check(state, fix0, fix1, touched=None):
    """True when no further fixing can come from this permutation alone.

    Callers must drain pending fixings first so the root has no necessary
    child.  The three sufficient conditions: no loose end; horizon past n;
    or every loose-end path is guarded by a conditional vertex while the new
    position and its preimage cannot produce one.
    """
    tree = state.tree
    for c in tree.root.children:
        if c.kind == NECESSARY:
            raise InternalLogicError(
                "completeness_check with undrained root fixing")
    if not tree.loose_ends:
        return True
    if state.lex_index > state.n:
        return True
    p = state.lex_index - 1
    q = state.inv[p]
    if touched is not None:
        touched.add(p)
        touched.add(q)
    for v in tree.loose_ends:
        if first_conditional_ancestor(v) is None:
            return False
    if p in fix0 or q in fix1:
        return False
    if state.image[p] <= p or q <= p:
        return False
    return True


def check_tree_invariants(state, fix0, fix1):
    """Debug walk asserting the structural tree properties.

    Verifies: loose ends are leaves; at most one junction, shaped as the
    conditional diamond with converse-paired necessary children; entries on
    any rooted path are distinct and unfixed; every loose end sees exactly
    the unfixed entries among the consumed positions and their preimages.
    """
    tree = state.tree
    if tree.infeasible:
        return
    junctions = []
    seen_loose = set()
    stack = [(tree.root, set())]
    while stack:
        v, entries = stack.pop()
        if not v.alive and v is not tree.root:
            raise InternalLogicError("dead vertex still linked")
        for c in v.children:
            if c.parent is not v:
                raise InternalLogicError("broken parent link")
        if v.kind == LOOSE_END:
            if v.children:
                raise InternalLogicError("loose end is not a leaf")
            seen_loose.add(v)
            expected = set()
            for i in range(state.lex_index - 1):
                if state.image[i] == i:
                    continue      # fixed points never enter a path
                expected.add(i)
                expected.add(state.inv[i])
            expected -= fix0
            expected -= fix1
            if entries != expected:
                raise InternalLogicError(
                    "loose-end entry set %r != expected %r"
                    % (sorted(entries), sorted(expected)))
        if len(v.children) >= 2:
            junctions.append(v)
        if v.kind in (CONDITIONAL, NECESSARY):
            if v.entry in entries:
                raise InternalLogicError("duplicate entry on rooted path")
            if v.entry in fix0 or v.entry in fix1:
                raise InternalLogicError("fixed entry on rooted path")
            entries = entries | {v.entry}
        for c in v.children:
            stack.append((c, entries))
    if len(junctions) > 1:
        raise InternalLogicError("more than one junction vertex")
    for j in junctions:
        if len(j.children) != 2:
            raise InternalLogicError("junction outdegree > 2")
        u1, u2 = j.children
        if u1.kind != CONDITIONAL or u2.kind != CONDITIONAL:
            raise InternalLogicError("junction child not conditional")
        if u1.entry == u2.entry:
            raise InternalLogicError("diamond entries not distinct")
        for ua, ub in ((u1, u2), (u2, u1)):
            if len(ua.children) != 1:
                raise InternalLogicError("diamond child outdegree != 1")
            w = ua.children[0]
            if w.kind != NECESSARY:
                raise InternalLogicError("diamond grandchild not necessary")
            if w.entry != ub.entry or w.value != 1 - ub.value:
                raise InternalLogicError("diamond converse pairing broken")
    if seen_loose != tree.loose_ends:
        raise InternalLogicError("loose-end registry out of sync")


def propagate_set_raw(perms, fix0, fix1, n,
                      check_invariants=False, touched=None):
    """Drive every permutation to completeness, applying implied fixings.

    ``perms`` must be non-identity permutations on the same ground set.
    Returns ``(feasible, fix0, fix1, states)``; the fixing sets are mutated
    in place and states are returned for inspection by tests.
    """
    states = [init_state(g, fix0, fix1) for g in perms]
    if fix0 & fix1:
        return False, fix0, fix1, states
    sched = FixScheduler()

    def drain():
        while sched.stack:
            entry, value = sched.pop()
            if value == 0:
                if entry in fix1:
                    return False
                if entry in fix0:
                    continue
                fix0.add(entry)
            else:
                if entry in fix0:
                    return False
                if entry in fix1:
                    continue
                fix1.add(entry)
            for st in states:
                variable_fixing_event(st, fix0, fix1, entry, value, sched)
                if st.tree.infeasible:
                    return False
                if check_invariants:
                    check_tree_invariants(st, fix0, fix1)
            if sched.contradiction:
                return False
        return True

    queue = deque(range(len(states)))
    in_queue = [True] * len(states)
    while queue:
        gi = queue.popleft()
        in_queue[gi] = False
        st = states[gi]
        while not completeness_check(st, fix0, fix1, touched):
            index_increase_event(st, fix0, fix1, sched, touched)
            if st.tree.infeasible:
                return False, fix0, fix1, states
            if check_invariants:
                check_tree_invariants(st, fix0, fix1)
            if sched.contradiction:
                return False, fix0, fix1, states
            if not drain():
                return False, fix0, fix1, states
        # New fixings can demote other permutations from complete back to
        # pending (their next position may have become fixed); re-queue.
        for k, other in enumerate(states):
            if k != gi and not in_queue[k] and \
                    not completeness_check(other, fix0, fix1):
                queue.append(k)
                in_queue[k] = True
    bound = 6 * n + 2
    for st in states:
        if st.tree.created > bound:
            raise InternalLogicError(
                "work bound exceeded: %d vertices > %d"
                % (st.tree.created, bound))
    return True, fix0, fix1, states
