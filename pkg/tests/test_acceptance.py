"""Acceptance gate: one test per release criterion.

Each test is self-contained and prints one PASS line through pytest's
verbose output; together they cover the worked examples, the randomized
oracle equivalences, the structural and work-bound guarantees, the
flower-snark experiment, solver correctness, and the relabeling example.
"""

import random
import time

import pytest

from cycfix.core import FixState, Permutation
from cycfix.cyclic import (CyclicSubgroup, complete_fix_monotone_group,
                           group_feasible_monotone, propagate_ordered_monotone,
                           relabel, strict_witness)
from cycfix.imptree import (FixScheduler, completeness_check,
                            index_increase_event, init_state, propagate_set,
                            propagate_set_with_states, tree_shape,
                            variable_fixing_event)
from cycfix.oracle import (complete_fixings_oracle, enumerate_feasible,
                           per_perm_fixpoint_oracle)
from cycfix.bench import gen_snark
from cycfix.solver import MODES, RELABELS, Settings, solve

from conftest import (brute_force_optimum, planted_symmetric_bp,
                      rand_fixstate, rand_monotone_group,
                      rand_ordered_monotone_group, rand_perm)

GAMMA1 = Permutation.from_cycles(8, [(1, 6, 8, 4, 7, 2, 5)])
GAMMA2 = Permutation.from_cycles(8, [(1, 3, 6, 2, 4, 5)])


def _drain(state, fs, sched):
    while sched.stack:
        entry, value = sched.pop()
        target = fs.fixed0 if value == 0 else fs.fixed1
        if entry not in target:
            target.add(entry)
            variable_fixing_event(state, fs, (entry, value), sched)


def _alg1_cases(count=1000, seed=1001):
    rng = random.Random(seed)
    for _ in range(count):
        n = rng.randint(2, 12)
        perms = [rand_perm(rng, n) for _ in range(rng.randint(1, 8))]
        yield n, perms, rand_fixstate(rng, n)


def test_example_1_reproduction():
    fixings = FixState(8, {3, 5}, {4})  # 1-based {4,6} / {5}

    # final sets of the propagation loop match the oracle fixpoint
    res = propagate_set([GAMMA1, GAMMA2], fixings.copy())
    assert res.feasible
    assert res.fixed1 >= {0, 4}   # fixing (1,1) applied
    assert res.fixed0 >= {3, 5, 6}  # fixing (7,0) applied
    assert res == per_perm_fixpoint_oracle([GAMMA1, GAMMA2], fixings.copy())

    # intermediate trees, driven event by event on the first permutation
    fs = fixings.copy()
    state = init_state(GAMMA1, fs)
    sched = FixScheduler()
    while state.lex_index < 6:
        index_increase_event(state, fs, sched)
        _drain(state, fs, sched)
    assert tree_shape(state.tree) == [
        "root",
        ["cond(2,0)", ["necc(7,0)", ["necc(8,0)"]]],
        ["cond(7,1)", ["necc(2,1)", ["necc(8,0)", ["loose"]]]],
    ]
    index_increase_event(state, fs, sched)
    assert tree_shape(state.tree) == [
        "root", ["necc(7,0)", ["cond(2,0)", ["necc(8,0)"]]]]
    _drain(state, fs, sched)
    assert completeness_check(state, fs)


def test_example_2_reproduction():
    gamma = Permutation.from_cycles(5, [(1, 2, 3, 4, 5)])
    group = CyclicSubgroup.generated_by(gamma)
    fixings = FixState(5, {1, 4}, set())  # 1-based {2,5}

    res = propagate_set(group.elements(), fixings.copy())
    assert res.feasible
    assert res.fixed0 == frozenset({1, 4})
    assert res.fixed1 == frozenset()

    full = complete_fix_monotone_group(group, fixings.copy())
    assert full.feasible
    assert full.fixed0 == frozenset({1, 3, 4})  # 1-based {2,4,5}
    assert full.fixed1 == frozenset()


def test_oracle_equivalence_per_permutation_propagation():
    checked = 0
    for n, perms, fs in _alg1_cases():
        res = propagate_set(perms, fs.copy())
        ora = per_perm_fixpoint_oracle(perms, fs.copy())
        assert res == ora
        checked += 1
    assert checked >= 1000


def test_oracle_equivalence_monotone_group_completion():
    rng = random.Random(2002)
    checked = 0
    while checked < 1000:
        n = rng.randint(2, 12)
        group = rand_monotone_group(rng, n)
        if group.is_trivial():
            continue
        fs = rand_fixstate(rng, n)
        res = complete_fix_monotone_group(group, fs.copy())
        assert res == complete_fixings_oracle(group.elements(), fs.copy())
        checked += 1


def test_oracle_equivalence_ordered_blockwise_propagation():
    rng = random.Random(3003)
    checked = 0
    while checked < 1000:
        n = rng.randint(4, 12)
        group = rand_ordered_monotone_group(rng, n)
        if group.is_trivial():
            continue
        fs = rand_fixstate(rng, n)
        res = propagate_ordered_monotone(group, fs.copy(),
                                         compute_fixings=True)
        assert res == complete_fixings_oracle(group.elements(), fs.copy())
        checked += 1


def test_feasibility_biconditional_and_strict_witness():
    rng = random.Random(4004)
    feasible_seen = 0
    witness_seen = 0
    for _ in range(1000):
        n = rng.randint(2, 12)
        group = rand_monotone_group(rng, n)
        if group.is_trivial():
            continue
        fs = rand_fixstate(rng, n)
        per_perm = propagate_set(group.elements(), fs.copy())
        nonempty = bool(
            enumerate_feasible(group.elements(), fs.copy()).vectors)
        if not per_perm.feasible:
            assert not nonempty
            continue
        complete = per_perm.as_fixstate(n)
        assert group_feasible_monotone(group, complete) == nonempty
        if not nonempty:
            continue
        feasible_seen += 1
        unfixed_support = (set(group.generator.support())
                           - complete.fixed0 - complete.fixed1)
        if not unfixed_support:
            continue
        x = strict_witness(group, complete.fixed0, complete.fixed1)
        assert all(x[i] == 0 for i in complete.fixed0)
        assert all(x[i] == 1 for i in complete.fixed1)
        for g in group.elements():
            assert tuple(x) > g.apply(x)
        witness_seen += 1
    assert feasible_seen >= 200
    assert witness_seen >= 100


def test_structural_invariants_after_every_event():
    # the kernel re-validates every tree after each event when asked to;
    # any violated structural property raises InternalLogicError
    for n, perms, fs in _alg1_cases(count=1000, seed=5005):
        propagate_set(perms, fs.copy(), check_invariants=True)


def test_work_bound_and_scaling():
    rng = random.Random(6006)
    for _ in range(200):
        n = rng.randint(2, 12)
        perms = [rand_perm(rng, n) for _ in range(rng.randint(1, 8))]
        fs = rand_fixstate(rng, n)
        _res, states = propagate_set_with_states(perms, fs)
        for st in states:
            assert st.tree.created <= 6 * n + 2

    def timed(n):
        cycle = Permutation([(i + 1) % n for i in range(n)])
        perms = [cycle ** k for k in range(1, n)]
        best = float("inf")
        for _ in range(3):
            fs = FixState(n, {1}, set())
            t0 = time.perf_counter()
            res = propagate_set(perms, fs)
            best = min(best, time.perf_counter() - t0)
            assert res.feasible
        return best

    times = {n: timed(n) for n in (64, 128, 256, 512)}
    # doubling n multiplies O(n^2) work by 4; allow 3x slack on top
    for small, large in ((64, 128), (128, 256), (256, 512)):
        assert times[large] <= 12 * max(times[small], 1e-4), times


@pytest.mark.parametrize("n_param", [3, 5])
def test_flower_snarks_infeasible_under_all_configs(n_param):
    _, bp = gen_snark(n_param)
    sym_fixings = {}
    for mode in MODES:
        for rl in RELABELS:
            t0 = time.perf_counter()
            res = solve(bp, Settings(mode=mode, relabel=rl, time_limit=300))
            assert time.perf_counter() - t0 < 300
            assert res.status == "infeasible", (mode, rl)
            sym_fixings[(mode, rl)] = res.sym_fixings
    if n_param == 5:
        for mode in ("group", "nopeek", "peek"):
            assert any(sym_fixings[(mode, rl)] >= 1 for rl in RELABELS), mode


def test_solver_matches_enumeration_on_planted_symmetry():
    rng = random.Random(7007)
    for _ in range(200):
        bp = planted_symmetric_bp(rng, rng.randint(4, 12))
        best = brute_force_optimum(bp)
        for mode in MODES:
            for rl in RELABELS:
                res = solve(bp, Settings(mode=mode, relabel=rl))
                if best is None:
                    assert res.status == "infeasible", (mode, rl)
                else:
                    assert res.status == "optimal", (mode, rl)
                    assert res.objective == pytest.approx(best[0]), (mode, rl)
                    assert bp.is_feasible(res.incumbent)


def test_relabel_worked_example():
    g1 = Permutation.from_cycles(9, [(1, 8, 7, 3)])
    g2 = Permutation.from_cycles(9, [(3, 4, 5, 8)])
    g3 = Permutation.from_cycles(9, [(2, 5, 6, 9, 4)])
    plan = relabel([g1, g2, g3], strategy="respect")
    assert [plan.labeling(i) + 1 for i in range(9)] == \
        [1, 5, 4, 9, 6, 7, 3, 2, 8]
