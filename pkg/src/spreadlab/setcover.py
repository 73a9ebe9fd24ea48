"""Exact minimum set cover over bitmask sets (branch and bound).

Sets and the universe are Python ints used as bitsets.  The solver removes
duplicate and dominated sets, seeds the incumbent with a greedy cover, then
branches on the uncovered element contained in the fewest sets.  Two lower
bounds prune the search: a counting bound and a packing bound built from
elements that no single set can cover together.
"""

from __future__ import annotations

from dataclasses import dataclass


def popcount(x):
    return x.bit_count()


def bits(x):
    """Indices of set bits, ascending."""
    out = []
    while x:
        low = x & -x
        out.append(low.bit_length() - 1)
        x ^= low
    return out


@dataclass
class CoverResult:
    size: int
    chosen: list
    nodes: int
    exhaustive: bool = True


def reduce_sets(universe, sets):
    """Indices of the sets that survive deduplication and dominance pruning
    (restricted to ``universe``)."""
    restricted = [(s & universe, i) for i, s in enumerate(sets)]
    seen = {}
    for s, i in restricted:
        if s and s not in seen:
            seen[s] = i
    items = sorted(seen.items(), key=lambda t: -popcount(t[0]))
    kept = []
    for s, i in items:
        if any(s & k == s for k, _ in kept):
            continue
        kept.append((s, i))
    return kept


def greedy_cover(universe, sets):
    left = universe
    chosen = []
    while left:
        best = max(range(len(sets)), key=lambda j: popcount(sets[j] & left))
        if not sets[best] & left:
            return None
        chosen.append(best)
        left &= ~sets[best]
    return chosen


class _Solver:
    def __init__(self, universe, sets, node_limit, first_choices):
        self.universe = universe
        self.sets = sets
        self.node_limit = node_limit
        self.nodes = 0
        self.first_choices = first_choices
        elems = bits(universe)
        self.containing = {}
        self.neigh = {}
        for e in elems:
            bit = 1 << e
            idx = [j for j, s in enumerate(sets) if s & bit]
            self.containing[e] = idx
            acc = 0
            for j in idx:
                acc |= sets[j]
            self.neigh[e] = acc
        self.best = None
        self.best_size = None
        self.aborted = False

    def lower_bound(self, left):
        n = popcount(left)
        mx = max(popcount(s & left) for s in self.sets)
        if mx == 0:
            return 10 ** 9
        lb1 = -(-n // mx)
        # packing bound: elements pairwise not coverable by one set
        blocked = 0
        lb2 = 0
        rest = left
        for e in self._order(left):
            if not (blocked >> e) & 1:
                lb2 += 1
                blocked |= self.neigh[e]
        return max(lb1, lb2)

    def _order(self, left):
        return sorted(bits(left), key=lambda e: len(self.containing[e]))

    def solve(self, init):
        self.best = list(init)
        self.best_size = len(init)
        self._dfs(self.universe, [], True)
        return self.best

    def _dfs(self, left, chosen, top):
        if self.aborted:
            return
        self.nodes += 1
        if self.node_limit is not None and self.nodes > self.node_limit:
            self.aborted = True
            return
        if not left:
            if len(chosen) < self.best_size:
                self.best = list(chosen)
                self.best_size = len(chosen)
            return
        if len(chosen) + 1 >= self.best_size:
            return
        if len(chosen) + self.lower_bound(left) >= self.best_size:
            return
        e = min(bits(left), key=lambda x: len(self.containing[x]))
        cands = self.containing[e]
        if top and self.first_choices is not None:
            cands = self.first_choices(e, cands)
        cands = sorted(cands, key=lambda j: -popcount(self.sets[j] & left))
        for j in cands:
            chosen.append(j)
            self._dfs(left & ~self.sets[j], chosen, False)
            chosen.pop()
            if self.aborted:
                return


def min_set_cover(universe, sets, node_limit=None, first_choices=None):
    """Minimum number of ``sets`` whose union contains ``universe``.

    Returns a :class:`CoverResult` whose ``chosen`` lists indices into the
    original ``sets``.  ``first_choices(element, candidate_indices)`` may
    prune the candidates at the root (symmetry breaking); it receives and
    returns indices into the reduced set list, exposed as
    ``CoverResult.reduced`` for callers that need the mapping.  Raises
    ValueError if no cover exists.
    """
    if universe == 0:
        return CoverResult(0, [], 0)
    kept = reduce_sets(universe, sets)
    union = 0
    for s, _ in kept:
        union |= s
    if union & universe != universe:
        raise ValueError("the sets do not cover the universe")
    rsets = [s for s, _ in kept]
    orig = [i for _, i in kept]
    greedy = greedy_cover(universe, rsets)
    fc = None
    if first_choices is not None:
        def fc(e, cands):
            return first_choices(e, cands, rsets, orig)
    solver = _Solver(universe, rsets, node_limit, fc)
    best = solver.solve(greedy)
    return CoverResult(len(best), sorted(orig[j] for j in best), solver.nodes,
                       exhaustive=not solver.aborted)


def verify_cover(universe, sets, chosen):
    acc = 0
    for j in chosen:
        acc |= sets[j]
    return acc & universe == universe


def milp_min_cover(universe, sets):
    """Independent oracle via scipy's MILP solver (used in tests)."""
    import numpy as np
    from scipy.optimize import Bounds, LinearConstraint, milp

    elems = bits(universe)
    m = len(sets)
    A = np.zeros((len(elems), m))
    for r, e in enumerate(elems):
        for j, s in enumerate(sets):
            if (s >> e) & 1:
                A[r, j] = 1
    res = milp(c=np.ones(m), constraints=LinearConstraint(A, lb=np.ones(len(elems))),
               integrality=np.ones(m), bounds=Bounds(0, 1))
    if not res.success:
        raise ValueError("MILP failed")
    return int(round(res.fun))
