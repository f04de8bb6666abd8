"""Minimal depth-first branch-and-bound with symmetry propagation hooks.

The solver is LP-free: bounding uses the sum of positive unfixed objective
coefficients, domain reduction uses min/max row activities, and symmetry
handling is pure node-local propagation in one of five modes:

- ``nosym``  — no symmetry handling;
- ``gen``    — propagate each declared generator's constraint individually;
- ``group``  — propagate all (safeguard-capped) powers of each generator
  individually, to a joint fixpoint;
- ``nopeek`` — complete block propagation for ordered monotone generators
  without value peeking (power propagation as fallback);
- ``peek``   — like ``nopeek`` plus value peeking; the fallback peeks the
  entries whose values the propagation run looked up.

A relabeling strategy other than ``original`` transforms the whole instance
up front so generators become monotone/ordered and maps incumbents back.
"""

from __future__ import annotations

import os
import time
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Set, Tuple

from .core import FixState, Permutation, group_elements, is_monotone_ordered
from .cyclic import CyclicSubgroup, RelabelPlan, propagate_ordered_monotone, relabel
from .imptree import PropagationResult, propagate_set

MODES = ("nosym", "gen", "group", "nopeek", "peek")
RELABELS = ("original", "max", "min", "respect")

EPS = 1e-9

ENV_MAX_PERMS = "CYCFIX_MAX_PERMS"
ENV_MAX_WEIGHT = "CYCFIX_MAX_WEIGHT"
DEFAULT_MAX_PERMS = 10**4
DEFAULT_MAX_WEIGHT = 5 * 10**6


@dataclass(frozen=True)
class Row:
    """One linear row: sum(coeffs[i] * x_i) sense rhs, sense in {'<=', '=='}."""

    coeffs: Tuple[Tuple[int, float], ...]
    sense: str
    rhs: float

    @classmethod
    def make(cls, coeffs: Dict[int, float], sense: str, rhs: float) -> "Row":
        if sense not in ("<=", "=="):
            raise ValueError("row sense must be '<=' or '==', got %r" % sense)
        return cls(tuple(sorted(coeffs.items())), sense, rhs)

    def coeff_dict(self) -> Dict[int, float]:
        return dict(self.coeffs)


@dataclass
class BinaryProgram:
    """max c^T x over binary x subject to rows; generators declare symmetry."""

    n: int
    objective: List[float]
    rows: List[Row]
    names: Optional[List[str]] = None
    generators: List[Permutation] = field(default_factory=list)

    def __post_init__(self) -> None:
        if len(self.objective) != self.n:
            raise ValueError("objective length != n")
        if self.names is None:
            self.names = ["x%d" % (i + 1) for i in range(self.n)]
        if len(self.names) != self.n:
            raise ValueError("names length != n")
        for g in self.generators:
            if g.n != self.n:
                raise ValueError("generator ground set mismatch")

    def check_symmetry(self, perm: Permutation, tol: float = 1e-9) -> bool:
        """Algebraic invariance: objective constant on orbits, rows map to
        rows.  This implies the permutation maps feasible points to feasible
        points of equal objective."""
        for i in range(self.n):
            if abs(self.objective[perm.image[i]] - self.objective[i]) > tol:
                return False
        def key(row: Row) -> Tuple:
            return (row.sense, round(row.rhs, 9),
                    tuple(sorted((i, round(a, 9)) for i, a in row.coeffs)))
        have = {}
        for row in self.rows:
            k = key(row)
            have[k] = have.get(k, 0) + 1
        for row in self.rows:
            mapped = Row.make(
                {perm.image[i]: a for i, a in row.coeffs}, row.sense, row.rhs)
            k = key(mapped)
            if have.get(k, 0) <= 0:
                return False
            have[k] -= 1
        return True

    def objective_value(self, x: Sequence[int]) -> float:
        return sum(c * v for c, v in zip(self.objective, x))

    def is_feasible(self, x: Sequence[int], tol: float = 1e-6) -> bool:
        for row in self.rows:
            act = sum(a * x[i] for i, a in row.coeffs)
            if row.sense == "<=" and act > row.rhs + tol:
                return False
            if row.sense == "==" and abs(act - row.rhs) > tol:
                return False
        return True


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError:
        raise ValueError("%s must be an integer, got %r" % (name, raw))


@dataclass(frozen=True)
class Settings:
    mode: str = "nosym"
    relabel: str = "original"
    seed: int = 0
    time_limit: Optional[float] = None
    max_perms: Optional[int] = None
    max_weight: Optional[int] = None

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ValueError("unknown mode %r" % (self.mode,))
        if self.relabel not in RELABELS:
            raise ValueError("unknown relabel strategy %r" % (self.relabel,))

    def perm_caps(self) -> Tuple[int, int]:
        mc = self.max_perms if self.max_perms is not None else \
            _env_int(ENV_MAX_PERMS, DEFAULT_MAX_PERMS)
        mw = self.max_weight if self.max_weight is not None else \
            _env_int(ENV_MAX_WEIGHT, DEFAULT_MAX_WEIGHT)
        return mc, mw


@dataclass
class SolveResult:
    status: str                      # optimal | infeasible | timelimit
    objective: Optional[float]
    incumbent: Optional[Tuple[int, ...]]
    nodes: int
    sym_fixings: int
    wall_time: float
    sym_time: float
    seed: int = 0


class _SymmetryEngine:
    """Per-solve precomputation of the symmetry propagation strategy."""

    def __init__(self, bp: BinaryProgram, settings: Settings):
        self.mode = settings.mode
        self.units: List[Tuple[str, object]] = []
        gens = [g for g in bp.generators if not g.is_identity()]
        if self.mode == "nosym" or not gens:
            return
        mc, mw = settings.perm_caps()
        if self.mode == "gen":
            self.units.append(("perms", gens))
        elif self.mode == "group":
            for g in gens:
                elems = group_elements(g, mc, mw)
                if elems:
                    self.units.append(("perms", elems))
        else:  # nopeek / peek
            for g in gens:
                if is_monotone_ordered(g) is not None:
                    self.units.append(
                        ("ordered", CyclicSubgroup.generated_by(g)))
                else:
                    elems = group_elements(g, mc, mw)
                    if elems:
                        self.units.append(("powers", elems))

    def propagate(self, fs: FixState, stats: Dict[str, float]) -> bool:
        """Run all symmetry units to a joint fixpoint; False = infeasible."""
        if not self.units:
            return True
        t0 = time.perf_counter()
        try:
            return self._propagate(fs, stats)
        finally:
            stats["sym_time"] = stats.get("sym_time", 0.0) \
                + (time.perf_counter() - t0)

    def _propagate(self, fs: FixState, stats: Dict[str, float]) -> bool:
        changed = True
        while changed:
            changed = False
            for kind, unit in self.units:
                before = len(fs.fixed0) + len(fs.fixed1)
                if kind == "perms":
                    res = propagate_set(unit, fs)
                elif kind == "ordered":
                    res = propagate_ordered_monotone(
                        unit, fs, compute_fixings=(self.mode == "peek"))
                else:  # powers fallback for nopeek/peek
                    res = self._powers(unit, fs)
                if not res.feasible:
                    return False
                assert res.fixed0 is not None and res.fixed1 is not None
                fs.fixed0 |= res.fixed0
                fs.fixed1 |= res.fixed1
                after = len(fs.fixed0) + len(fs.fixed1)
                if after != before:
                    stats["sym_fixings"] = stats.get("sym_fixings", 0) \
                        + (after - before)
                    changed = True
        return True

    def _powers(self, elems: List[Permutation],
                fs: FixState) -> PropagationResult:
        touched: Set[int] = set()
        res = propagate_set(elems, fs, touched=touched)
        if not res.feasible or self.mode == "nopeek":
            return res
        # Peeking fallback: single-value feasibility tests on the entries
        # whose values the propagation run looked up.
        j0, j1 = set(res.fixed0), set(res.fixed1)
        for i in sorted(touched):
            if i in j0 or i in j1:
                continue
            t0 = propagate_set(elems, FixState(fs.n, j0 | {i}, j1))
            if not t0.feasible:
                j1.add(i)
                continue
            t1 = propagate_set(elems, FixState(fs.n, j0, j1 | {i}))
            if not t1.feasible:
                j0.add(i)
        return PropagationResult.of(j0, j1)


def _row_propagate(bp: BinaryProgram, fs: FixState) -> bool:
    """Min/max-activity domain propagation; False when a row is violated."""
    changed = True
    while changed:
        changed = False
        for row in bp.rows:
            lo = hi = 0.0
            free: List[Tuple[int, float]] = []
            for i, a in row.coeffs:
                v = fs.value(i)
                if v is not None:
                    lo += a * v
                    hi += a * v
                else:
                    lo += min(a, 0.0)
                    hi += max(a, 0.0)
                    free.append((i, a))
            if lo > row.rhs + EPS:
                return False
            if row.sense == "==" and hi < row.rhs - EPS:
                return False
            for i, a in free:
                for v in (0, 1):
                    new_lo = lo - min(a, 0.0) + a * v
                    bad = new_lo > row.rhs + EPS
                    if not bad and row.sense == "==":
                        new_hi = hi - max(a, 0.0) + a * v
                        bad = new_hi < row.rhs - EPS
                    if bad:
                        if fs.value(i) == v:
                            return False
                        if fs.value(i) is None:
                            (fs.fixed1 if v == 0 else fs.fixed0).add(i)
                            changed = True
                        break
    return True


def node_propagate(
    bp: BinaryProgram,
    fixings: FixState,
    settings: Settings,
    engine: Optional[_SymmetryEngine] = None,
    stats: Optional[Dict[str, int]] = None,
) -> PropagationResult:
    """Row propagation and symmetry propagation to a joint fixpoint."""
    if not fixings.is_consistent():
        return PropagationResult.infeasible()
    if engine is None:
        engine = _SymmetryEngine(bp, settings)
    if stats is None:
        stats = {}
    fs = fixings
    while True:
        before = len(fs.fixed0) + len(fs.fixed1)
        if not _row_propagate(bp, fs):
            return PropagationResult.infeasible()
        if not engine.propagate(fs, stats):
            return PropagationResult.infeasible()
        if len(fs.fixed0) + len(fs.fixed1) == before:
            break
    return PropagationResult.of(fs.fixed0, fs.fixed1)


def _relabel_program(
    bp: BinaryProgram, strategy: str
) -> Tuple[BinaryProgram, Optional[RelabelPlan]]:
    gens = [g for g in bp.generators if not g.is_identity()]
    if strategy == "original" or not gens:
        return bp, None
    plan = relabel(gens, strategy)
    lab = plan.labeling
    objective = [0.0] * bp.n
    names = [""] * bp.n
    for i in range(bp.n):
        objective[lab.image[i]] = bp.objective[i]
        names[lab.image[i]] = bp.names[i]
    rows = [Row.make({lab.image[i]: a for i, a in r.coeffs}, r.sense, r.rhs)
            for r in bp.rows]
    new_gens = [plan.apply_to(g) for g in bp.generators]
    return BinaryProgram(bp.n, objective, rows, names, new_gens), plan


def solve(bp: BinaryProgram, settings: Settings = Settings()) -> SolveResult:
    """Depth-first search, branching lowest-index unfixed variable, 1 first."""
    t0 = time.perf_counter()
    work, plan = _relabel_program(bp, settings.relabel)
    engine = _SymmetryEngine(work, settings)
    stats: Dict[str, float] = {"sym_fixings": 0}
    n = work.n
    best_obj: Optional[float] = None
    best_x: Optional[Tuple[int, ...]] = None
    nodes = 0
    timed_out = False
    stack: List[FixState] = [FixState(n)]
    while stack:
        if settings.time_limit is not None and \
                time.perf_counter() - t0 > settings.time_limit:
            timed_out = True
            break
        fs = stack.pop()
        nodes += 1
        res = node_propagate(work, fs, settings, engine, stats)
        if not res.feasible:
            continue
        bound = sum(work.objective[i] for i in fs.fixed1) + \
            sum(c for i, c in enumerate(work.objective)
                if c > 0 and not fs.is_fixed(i))
        if best_obj is not None and bound <= best_obj + EPS:
            continue
        free = fs.unfixed()
        if not free:
            x = tuple(1 if i in fs.fixed1 else 0 for i in range(n))
            if work.is_feasible(x):
                obj = work.objective_value(x)
                if best_obj is None or obj > best_obj + EPS:
                    best_obj = obj
                    best_x = x
            continue
        i = free[0]
        zero = fs.copy()
        zero.fixed0.add(i)
        one = fs.copy()
        one.fixed1.add(i)
        stack.append(zero)
        stack.append(one)   # popped first: 1-branch explored first
    wall = time.perf_counter() - t0
    if timed_out:
        status = "timelimit"
    elif best_obj is None:
        status = "infeasible"
    else:
        status = "optimal"
    incumbent = best_x
    if incumbent is not None and plan is not None:
        incumbent = plan.unmap_vector(incumbent)
    return SolveResult(
        status=status,
        objective=best_obj,
        incumbent=incumbent,
        nodes=nodes,
        sym_fixings=int(stats.get("sym_fixings", 0)),
        wall_time=wall,
        sym_time=float(stats.get("sym_time", 0.0)),
        seed=settings.seed,
    )
