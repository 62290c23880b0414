"""Ingredient designs derived from others: RTD -> DGDD, transposition, weighting."""

from __future__ import annotations

import numpy as np

from .algebra import rtd, transversal
from .core import GroupedDesign, Provenance


class IngredientError(ValueError):
    pass


def overlay_blocks(filler: GroupedDesign, parts, what="filler") -> np.ndarray:
    """Blocks of ``filler`` relabelled onto ``parts`` (lists of global point ids).

    Filler groups are matched to parts by size; among equal sizes, in index
    order.  Within a matched pair, the r-th smallest filler point maps to
    ``part[r]``.
    """
    parts = [list(p) for p in parts]
    fgroups = [sorted(g) for g in filler.groups]
    if len(fgroups) != len(parts):
        raise IngredientError(f"{what}: {len(fgroups)} groups, need {len(parts)}")
    free = {}
    for i, g in enumerate(fgroups):
        free.setdefault(len(g), []).append(i)
    label = np.full(filler.v, -1, dtype=np.int64)
    for part in parts:
        queue = free.get(len(part))
        if not queue:
            want = sorted(len(p) for p in parts)
            have = sorted(len(g) for g in fgroups)
            raise IngredientError(f"{what}: group sizes {have} do not match {want}")
        g = fgroups[queue.pop(0)]
        label[g] = part
    return label[filler.blocks]


def rtd_to_dgdd(n: int) -> GroupedDesign:
    """4-DGDD of type (n, 1^n)^4: RTD(4, n) minus one parallel class, which becomes the holes."""
    if n == 6:
        raise IngredientError("no 4-DGDD of type (6, 1^6)^4")
    r = rtd(4, n)
    removed = list(r.resolution[0])
    holes = [r.blocks[i].tolist() for i in removed]
    keep = np.setdiff1d(np.arange(len(r.blocks)), removed)
    return GroupedDesign(
        r.v,
        r.groups,
        r.blocks[keep],
        kind="DGDD",
        k=4,
        holes=holes,
        provenance=Provenance.make("derived", "rtd_to_dgdd", children=(r.provenance,), n=n),
    )


def grid_shape(design: GroupedDesign) -> tuple[int, int]:
    """(g, u) when every group meets every hole in exactly one point."""
    if design.holes is None:
        raise IngredientError("design has no holes")
    hole_of = design.hole_index()
    nh = len(design.holes)
    for grp in design.groups:
        if sorted(hole_of[list(grp)].tolist()) != list(range(nh)):
            raise IngredientError("not a (g, 1^g)^u grid: a group misses or repeats a hole")
    return nh, len(design.groups)


def dgdd_transpose(design: GroupedDesign) -> GroupedDesign:
    """Swap groups and holes: (g, 1^g)^u becomes (u, 1^u)^g."""
    if design.kind != "DGDD" or design.holes is None:
        raise IngredientError("transpose needs a DGDD with holes")
    grid_shape(design)
    return design.replace(
        groups=design.holes,
        holes=design.groups,
        provenance=Provenance.make("derived", "transpose", children=(design.provenance,)),
    )


def inflate_partition(parts, w):
    return [[p * w + t for p in part for t in range(w)] for part in parts]


def weight_design(design: GroupedDesign, w: int, overlay: GroupedDesign | None = None) -> GroupedDesign:
    """Replace each point p by p*w .. p*w+w-1 and each block by a TD(k, w) overlay.

    The TD's i-th group is laid on the copies of the block's i-th smallest
    point; its r-th point is copy r.
    """
    if w < 1 or w == 2 or w == 6:
        raise IngredientError(f"no TD(4,{w}) for weighting")
    k = design.k
    if overlay is None:
        overlay = transversal(k, w)
    if overlay.k != k or len(overlay.groups) != k or any(len(g) != w for g in overlay.groups):
        raise IngredientError(f"overlay must be a TD({k},{w})")
    # position of each overlay point: (group index, rank within group)
    gidx = overlay.group_index()
    rank = np.empty(overlay.v, dtype=np.int64)
    for grp in overlay.groups:
        rank[sorted(grp)] = np.arange(w)
    ob = overlay.blocks
    order = np.argsort(gidx[ob], axis=1)
    ranks = np.take_along_axis(rank[ob], order, axis=1)  # (w^2, k), column i = copy used in slot i
    blocks = (design.blocks[:, None, :] * w + ranks[None, :, :]).reshape(-1, k)
    holes = None if design.holes is None else inflate_partition(design.holes, w)
    return GroupedDesign(
        design.v * w,
        inflate_partition(design.groups, w),
        blocks,
        kind=design.kind if design.kind in ("GDD", "DGDD") else "GDD",
        k=k,
        holes=holes,
        provenance=Provenance.make("derived", "weight", children=(design.provenance, overlay.provenance), w=w),
    )
