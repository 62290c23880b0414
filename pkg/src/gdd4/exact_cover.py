"""Dancing-links exact cover, used to find small designs or prove they don't exist.

Columns are the pairs a design must cover (distinct groups, distinct holes);
rows are the candidate blocks (k-subsets with no forbidden pair).  A solution
is a set of rows covering every column exactly once.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .core import GroupedDesign, Provenance, TypeSignature, cross_pair_count

DEFAULT_MAX_PAIRS = 2000


class InstanceTooLarge(ValueError):
    pass


@dataclass
class SolveResult:
    status: str  # "sat", "unsat", "timeout"
    design: GroupedDesign | None = None
    seed: int | None = None
    nodes: int = 0
    attempts: int = 0
    elapsed: float = 0.0

    def __bool__(self):
        return self.status == "sat"


class _Budget(Exception):
    pass


class DancingLinks:
    """Knuth's Algorithm X on a toroidal doubly linked list.

    Node 0 is the root; nodes 1..ncols are column headers; the rest are row
    cells.  Arrays are plain lists for speed.
    """

    def __init__(self, ncols: int, rows):
        n = ncols + 1
        self.L = list(range(-1, n - 1))
        self.R = list(range(1, n + 1))
        self.L[0] = ncols
        self.R[ncols] = 0
        self.U = list(range(n))
        self.D = list(range(n))
        self.C = list(range(n))
        self.S = [0] * n
        self.row_of = [-1] * n
        self.ncols = ncols
        for r, cols in enumerate(rows):
            first = None
            for c in cols:
                c += 1
                x = len(self.C)
                self.C.append(c)
                self.row_of.append(r)
                self.U.append(self.U[c])
                self.D.append(c)
                self.D[self.U[c]] = x
                self.U[c] = x
                self.S[c] += 1
                if first is None:
                    first = x
                    self.L.append(x)
                    self.R.append(x)
                else:
                    self.L.append(self.L[first])
                    self.R.append(first)
                    self.R[self.L[first]] = x
                    self.L[first] = x

    def _cover(self, c):
        L, R, U, D, C, S = self.L, self.R, self.U, self.D, self.C, self.S
        R[L[c]] = R[c]
        L[R[c]] = L[c]
        i = D[c]
        while i != c:
            j = R[i]
            while j != i:
                U[D[j]] = U[j]
                D[U[j]] = D[j]
                S[C[j]] -= 1
                j = R[j]
            i = D[i]

    def _uncover(self, c):
        L, R, U, D, C, S = self.L, self.R, self.U, self.D, self.C, self.S
        i = U[c]
        while i != c:
            j = L[i]
            while j != i:
                S[C[j]] += 1
                U[D[j]] = j
                D[U[j]] = j
                j = L[j]
            i = U[i]
        R[L[c]] = c
        L[R[c]] = c

    def solve(self, node_limit=None, deadline=None):
        """Return (solution rows or None, nodes, exhausted)."""
        R, D, S, C = self.R, self.D, self.S, self.C
        self.nodes = 0
        partial = []

        def search():
            if R[0] == 0:
                return True
            self.nodes += 1
            if node_limit is not None and self.nodes > node_limit:
                raise _Budget
            if deadline is not None and (self.nodes & 1023) == 0 and time.monotonic() > deadline:
                raise _Budget
            # minimum remaining values
            c = R[0]
            best = S[c]
            j = R[c]
            while j != 0 and best > 0:
                if S[j] < best:
                    c, best = j, S[j]
                j = R[j]
            if best == 0:
                return False
            self._cover(c)
            r = D[c]
            while r != c:
                partial.append(self.row_of[r])
                j = R[r]
                while j != r:
                    self._cover(C[j])
                    j = R[j]
                if search():
                    return True
                j = self.L[r]
                while j != r:
                    self._uncover(C[j])
                    j = self.L[j]
                partial.pop()
                r = D[r]
            self._uncover(c)
            return False

        try:
            found = search()
        except _Budget:
            return None, self.nodes, False
        return (list(partial) if found else None), self.nodes, True


def groups_for(signature: TypeSignature) -> list[list[int]]:
    groups = []
    start = 0
    for size in signature.sizes():
        groups.append(list(range(start, start + size)))
        start += size
    return groups


def holes_for(groups, w: int) -> list[list[int]]:
    """Split every group into w equal slices; hole j collects slice j of each group."""
    holes = [[] for _ in range(w)]
    for g in groups:
        if len(g) % w:
            raise ValueError(f"group of size {len(g)} cannot meet {w} holes equally")
        h = len(g) // w
        for j in range(w):
            holes[j].extend(g[j * h : (j + 1) * h])
    return holes


def build_instance(v, groups, holes=None, k=4, symmetry=True):
    """(columns, rows): columns are required pairs, rows candidate blocks."""
    gid = np.empty(v, dtype=np.int64)
    for i, g in enumerate(groups):
        gid[g] = i
    hid = None
    if holes is not None:
        hid = np.empty(v, dtype=np.int64)
        for i, h in enumerate(holes):
            hid[h] = i

    def ok(a, b):
        return gid[a] != gid[b] and (hid is None or hid[a] != hid[b])

    col_of = {}
    for a, b in combinations(range(v), 2):
        if ok(a, b):
            col_of[(a, b)] = len(col_of)
    rows = []
    for blk in combinations(range(v), k):
        if all(ok(a, b) for a, b in combinations(blk, 2)):
            rows.append(blk)
    if symmetry and holes is None and len(groups) >= k:
        rows = _break_first_block(rows, groups, gid, k)
    return col_of, rows


def _break_first_block(rows, groups, gid, k):
    """Keep only canonical blocks through the pair (first point, first point of group 1).

    Points within a group are interchangeable, as are groups of equal size
    other than groups 0 and 1, so the remaining points of that block can be
    taken as first points of the lowest-index groups of each chosen size.
    """
    p0, p1 = groups[0][0], groups[1][0]
    allowed = set()
    rest = [i for i in range(2, len(groups))]
    by_size = {}
    for i in rest:
        by_size.setdefault(len(groups[i]), []).append(i)
    sizes = sorted(by_size)

    def pick(need, start, chosen):
        if need == 0:
            allowed.add(tuple(sorted([p0, p1] + [groups[i][0] for i in chosen])))
            return
        for si in range(start, len(sizes)):
            avail = by_size[sizes[si]]
            for take in range(1, min(need, len(avail)) + 1):
                pick(need - take, si + 1, chosen + avail[:take])

    pick(k - 2, 0, [])
    return [r for r in rows if not (p0 in r and p1 in r) or r in allowed]


def orbit_instance(v, groups, holes, perm, k=4, base=None):
    """Exact cover over orbits of a permutation preserving groups and holes.

    Columns are pair orbits; rows are block orbits whose pairs are all
    distinct, each listed as (orbit blocks, pair-orbit columns).  ``base`` is
    a precomputed ``build_instance(..., symmetry=False)`` result.
    """
    col_of, blocks = base or build_instance(v, groups, holes, k, symmetry=False)
    perm = [int(x) for x in perm]

    def orbit(items):
        out = [items]
        cur = items
        while True:
            cur = tuple(sorted(perm[x] for x in cur))
            if cur == items:
                return out
            out.append(cur)

    pair_orbit = {}
    ncols = 0
    for pair in col_of:
        if pair in pair_orbit:
            continue
        for p in orbit(pair):
            pair_orbit[p] = ncols
        ncols += 1
    seen = set()
    rows = []
    for blk in blocks:
        if blk in seen:
            continue
        orb = orbit(blk)
        seen.update(orb)
        pairs = [p for b in orb for p in combinations(b, 2)]
        if len(set(pairs)) != len(pairs):
            continue
        rows.append((orb, sorted({pair_orbit[p] for p in pairs})))
    return ncols, rows


def cyclic_subgroups(perm) -> list[np.ndarray]:
    """Powers perm**d for each proper divisor d of the order, largest subgroup first."""
    perm = np.asarray(perm)
    order = 1
    cur = perm.copy()
    ident = np.arange(len(perm))
    while not np.array_equal(cur, ident):
        cur = perm[cur]
        order += 1
    out = []
    for d in range(1, order):
        if order % d == 0:
            power = ident
            for _ in range(d):
                power = perm[power]
            out.append(power)
    return out


def natural_automorphism(groups) -> np.ndarray | None:
    """Cyclic shift on each run of equal-size groups laid out as residue classes.

    For c groups of size s occupying the points start .. start + s*c - 1 as
    residue classes mod c, the shift x -> x + 1 (mod s*c) permutes them.
    Single groups are fixed pointwise.  Returns None when the groups are not
    laid out that way.
    """
    v = sum(len(g) for g in groups)
    perm = np.arange(v)
    i = 0
    while i < len(groups):
        j = i
        while j + 1 < len(groups) and len(groups[j + 1]) == len(groups[i]):
            j += 1
        run = groups[i : j + 1]
        c = len(run)
        if c > 1:
            start = min(min(g) for g in run)
            s = len(run[0])
            want = [list(range(start + r, start + s * c, c)) for r in range(c)]
            if sorted(map(sorted, run)) != sorted(want):
                return None
            block = np.arange(start, start + s * c)
            perm[block] = start + (block - start + 1) % (s * c)
        i = j + 1
    return perm


def residue_groups(signature: TypeSignature) -> list[list[int]]:
    """Groups laid out so that ``natural_automorphism`` applies."""
    groups = []
    start = 0
    for s, c in signature.parts:
        if c == 1:
            groups.append(list(range(start, start + s)))
        else:
            groups.extend(list(range(start + r, start + s * c, c)) for r in range(c))
        start += s * c
    return groups


def _plain_search(v, groups, holes, k, seed, deadline, col_of, rows):
    row_cols = [[col_of[(a, b)] for a, b in combinations(r, 2)] for r in rows]
    limit = 20000
    attempt = 0
    total = 0
    while True:
        s = seed + attempt
        order = list(range(len(rows)))
        random.Random(s).shuffle(order)
        dlx = DancingLinks(len(col_of), [row_cols[i] for i in order])
        sol, nodes, exhausted = dlx.solve(node_limit=limit, deadline=deadline)
        total += nodes
        attempt += 1
        if sol is not None:
            return "sat", [rows[order[i]] for i in sol], s, total, attempt
        if exhausted:
            return "unsat", None, None, total, attempt
        if time.monotonic() > deadline:
            return "timeout", None, None, total, attempt
        limit *= 2


def _orbit_search(v, groups, holes, k, seed, deadline, perms, base):
    """Rounds over candidate automorphisms with doubling node limits.

    A candidate whose orbit search is exhausted has no invariant design and
    is dropped; the first design found wins.
    """
    instances = []
    for perm in perms:
        ncols, rows = orbit_instance(v, groups, holes, perm, k, base)
        if rows:
            instances.append((ncols, rows))
    total = 0
    limit = 5000
    while instances and time.monotonic() < deadline:
        alive = []
        for ncols, rows in instances:
            order = list(range(len(rows)))
            random.Random(seed).shuffle(order)
            dlx = DancingLinks(ncols, [rows[i][1] for i in order])
            sol, nodes, exhausted = dlx.solve(node_limit=limit, deadline=deadline)
            total += nodes
            if sol is not None:
                return [b for i in sol for b in rows[order[i]][0]], total
            if not exhausted:
                alive.append((ncols, rows))
        instances = alive
        limit *= 4
    return None, total


def solve_partition(v, groups, holes=None, *, k=4, seed=0, budget=30.0, max_pairs=DEFAULT_MAX_PAIRS,
                    kind=None, symmetry=True, automorphism=None) -> SolveResult:
    """Find a design on the given partition(s), or prove there is none.

    With ``automorphism`` (a permutation array, or "auto" for the natural
    cyclic shift) an orbit search runs first; it can only succeed or fail to
    find an invariant design.  Nonexistence is claimed solely from an
    exhausted plain search.
    """
    start = time.monotonic()
    deadline = start + budget
    col_of, rows = build_instance(v, groups, holes, k, symmetry)
    if len(col_of) > max_pairs:
        raise InstanceTooLarge(f"{len(col_of)} required pairs exceeds the bound {max_pairs}")
    per = k * (k - 1) // 2
    if len(col_of) % per:
        return SolveResult("unsat", elapsed=time.monotonic() - start)
    kind = kind or ("DGDD" if holes is not None else "GDD")
    nodes = 0
    if isinstance(automorphism, str):
        automorphism = natural_automorphism(groups) if automorphism == "auto" else None
    if automorphism is not None:
        perms = cyclic_subgroups(automorphism)
        orbit_deadline = start + budget / 2
        base = build_instance(v, groups, holes, k, symmetry=False)
        blocks, nodes = _orbit_search(v, groups, holes, k, seed, orbit_deadline, perms, base)
        if blocks is not None:
            design = GroupedDesign(v, groups, blocks, kind=kind, k=k, holes=holes,
                                   provenance=Provenance.make("exact-cover", "dlx-orbits", seed=seed))
            return SolveResult("sat", design, seed, nodes, 1, time.monotonic() - start)
    status, blocks, s, more, attempts = _plain_search(v, groups, holes, k, seed, deadline, col_of, rows)
    design = None
    if blocks is not None:
        design = GroupedDesign(v, groups, blocks, kind=kind, k=k, holes=holes,
                               provenance=Provenance.make("exact-cover", "dlx", seed=s))
    return SolveResult(status, design, s, nodes + more, attempts, time.monotonic() - start)


def solve_signature(signature, holes_profile=None, seed=0, time_budget=30.0, *, max_pairs=DEFAULT_MAX_PAIRS,
                    k=4) -> SolveResult:
    """Search for a k-GDD (or k-DGDD when ``holes_profile`` = w is given)."""
    if isinstance(signature, str):
        signature = TypeSignature.parse(signature)
    if cross_pair_count(signature) > max_pairs:
        raise InstanceTooLarge(f"{signature}: {cross_pair_count(signature)} cross pairs exceeds {max_pairs}")
    groups = residue_groups(signature)
    holes = holes_for(groups, holes_profile) if holes_profile else None
    return solve_partition(signature.v, groups, holes, k=k, seed=seed, budget=time_budget, max_pairs=max_pairs,
                           automorphism="auto")
