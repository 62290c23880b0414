"""Exhaustive pair-coverage verification of GDD, DGDD, TD and RGDD values."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .core import GroupedDesign

# cap on violations listed per category; counts stay exact
MAX_LISTED = 1000


@dataclass(frozen=True)
class Violation:
    kind: str  # pair-covered-twice, pair-uncovered, same-group-pair, same-hole-pair, bad-block-shape, bad-resolution, bad-profile
    data: tuple

    def __str__(self):
        return f"{self.kind} {self.data}"


@dataclass
class VerificationReport:
    v: int = 0
    num_blocks: int = 0
    kind: str = "GDD"
    violations: list[Violation] = field(default_factory=list)
    counts: dict[str, int] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.counts

    def add(self, kind, *data):
        self.counts[kind] = self.counts.get(kind, 0) + 1
        if self.counts[kind] <= MAX_LISTED:
            self.violations.append(Violation(kind, tuple(data)))

    def add_many(self, kind, n, rows):
        """Record ``n`` violations; ``rows`` yields their data lazily."""
        if n <= 0:
            return
        listed = self.counts.get(kind, 0)
        self.counts[kind] = listed + n
        room = max(0, MAX_LISTED - listed)
        for data, _ in zip(rows, range(min(room, n))):
            self.violations.append(Violation(kind, tuple(data)))

    def count(self, kind) -> int:
        return self.counts.get(kind, 0)

    def summary(self) -> str:
        status = "passed" if self.passed else "FAILED"
        line = f"{self.kind} v={self.v}: {self.num_blocks} blocks, {status}"
        if not self.passed:
            line += " (" + ", ".join(f"{k}: {n}" for k, n in sorted(self.counts.items())) + ")"
        return line

    def json_lines(self) -> str:
        """One JSON object for the summary, then one per listed violation."""
        head = {
            "record": "summary",
            "kind": self.kind,
            "v": self.v,
            "blocks": self.num_blocks,
            "passed": self.passed,
            "counts": dict(sorted(self.counts.items())),
        }
        lines = [json.dumps(head, sort_keys=True)]
        for viol in self.violations:
            lines.append(json.dumps({"record": "violation", "type": viol.kind, "data": list(viol.data)}, sort_keys=True))
        return "\n".join(lines)


def pair_ids(a: np.ndarray, b: np.ndarray, v: int) -> np.ndarray:
    """Triangular index of unordered pairs (a, b), a != b."""
    lo = np.minimum(a, b)
    hi = np.maximum(a, b)
    return lo * v - lo * (lo + 1) // 2 + (hi - lo - 1)


def verify(design: GroupedDesign) -> VerificationReport:
    v = design.v
    blocks = design.blocks
    rep = VerificationReport(v=v, num_blocks=len(blocks), kind=design.kind)
    k = design.k
    if blocks.shape[1] != k:
        rep.add("bad-block-shape", -1)
        return rep
    # block shape: k distinct points in range
    bad = (blocks[:, 1:] == blocks[:, :-1]).any(axis=1) | (blocks < 0).any(axis=1) | (blocks >= v).any(axis=1)
    hits = np.flatnonzero(bad)
    rep.add_many("bad-block-shape", len(hits), ((int(i),) for i in hits))
    good = ~bad
    gb = blocks[good]
    gidx = np.flatnonzero(good)

    group_of = design.group_index()
    hole_of = design.hole_index() if design.kind == "DGDD" or design.holes is not None else None

    cols = list(combinations(range(k), 2))
    a = np.concatenate([gb[:, i] for i, _ in cols])
    b = np.concatenate([gb[:, j] for _, j in cols])
    owner = np.tile(gidx, len(cols))

    same_group = group_of[a] == group_of[b]
    hits = np.flatnonzero(same_group)
    rep.add_many("same-group-pair", len(hits), ((int(a[i]), int(b[i]), int(owner[i])) for i in hits))
    if hole_of is not None:
        same_hole = hole_of[a] == hole_of[b]
        hits = np.flatnonzero(same_hole & ~same_group)
        rep.add_many("same-hole-pair", len(hits), ((int(a[i]), int(b[i]), int(owner[i])) for i in hits))

    npairs = v * (v - 1) // 2
    ids = pair_ids(a, b, v)
    counts = np.minimum(np.bincount(ids, minlength=npairs), 255).astype(np.uint8)

    # required pairs: distinct groups (and holes)
    p, q = np.triu_indices(v, 1)
    required = group_of[p] != group_of[q]
    if hole_of is not None:
        required &= hole_of[p] != hole_of[q]
    # triu_indices enumerates pairs in exactly the triangular id order
    twice = np.flatnonzero(required & (counts >= 2))
    if len(twice):
        _report_twice(rep, twice, ids, owner, p, q)
    hits = np.flatnonzero(required & (counts == 0))
    rep.add_many("pair-uncovered", len(hits), ((int(p[i]), int(q[i])) for i in hits))

    if design.resolution is not None:
        _check_resolution(rep, design)
    return rep


def _report_twice(rep, twice, ids, owner, p, q):
    order = np.argsort(ids, kind="stable")
    sids = ids[order]

    def rows():
        for pid in twice.tolist():
            lo = np.searchsorted(sids, pid)
            users = owner[order[lo : lo + 2]].tolist()
            yield int(p[pid]), int(q[pid]), users[0], users[1]

    rep.add_many("pair-covered-twice", len(twice), rows())


def _check_resolution(rep, design):
    v = design.v
    seen_blocks = np.zeros(len(design.blocks), dtype=np.int64)
    for ci, cls in enumerate(design.resolution):
        idx = np.asarray(cls, dtype=np.int64)
        if idx.size and (idx.min() < 0 or idx.max() >= len(design.blocks)):
            rep.add("bad-resolution", ci, -1)
            continue
        np.add.at(seen_blocks, idx, 1)
        cover = np.bincount(design.blocks[idx].ravel(), minlength=v)
        for pt in np.flatnonzero(cover != 1).tolist():
            rep.add("bad-resolution", ci, pt)
    if not np.all(seen_blocks == 1):
        rep.add("bad-resolution", -1, -1)


def verify_dgdd_profile(design: GroupedDesign, h_per_group) -> VerificationReport:
    """Check |group_i & hole_j| = h_i for all i, j, then run verify."""
    rep = verify(design)
    if design.holes is None:
        rep.add("bad-profile", "no holes")
        return rep
    if len(h_per_group) != len(design.groups):
        rep.add("bad-profile", "profile length", len(h_per_group), len(design.groups))
        return rep
    hole_of = design.hole_index()
    nh = len(design.holes)
    for i, grp in enumerate(design.groups):
        meet = np.bincount(hole_of[list(grp)], minlength=nh)
        for jh in np.flatnonzero(meet != h_per_group[i]).tolist():
            rep.add("bad-profile", i, jh, int(meet[jh]), int(h_per_group[i]))
    return rep


def verify_many(designs, jobs: int = 1):
    """Verify in parallel; results come back in input order."""
    designs = list(designs)
    if jobs <= 1:
        return [verify(d) for d in designs]
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(jobs) as ex:
        return list(ex.map(verify, designs))
