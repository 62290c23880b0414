"""Recursive constructions: each takes ingredient designs and returns a new 4-GDD.

Outputs are not trusted: callers (and the tests) always re-verify.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .admissibility import check_gum
from .core import GroupedDesign, Provenance, TypeSignature
from .derived import IngredientError, grid_shape, overlay_blocks, weight_design


@dataclass(frozen=True)
class IngredientRequest:
    """One ingredient a construction needs."""

    role: str
    signature: TypeSignature
    kind: str = "GDD"
    extra: dict = field(default_factory=dict, compare=False)

    def __str__(self):
        return f"{self.role}: {self.kind} {self.signature}"


def sig(*pairs) -> TypeSignature:
    """Type signature from (size, count) pairs, dropping empty parts."""
    return TypeSignature.of([(s, c) for s, c in pairs if s > 0 and c > 0])


def _require(design: GroupedDesign | None, want: TypeSignature, role: str, kind: str = "GDD"):
    if design is None:
        raise IngredientError(f"missing ingredient {role}: {want}")
    if design.signature() != want:
        raise IngredientError(f"{role}: expected type {want}, got {design.signature()}")
    if design.k != 4 and kind != "RGDD":
        raise IngredientError(f"{role}: block size {design.k}, expected 4")
    return design


def _lookup(fillers, want: TypeSignature, role: str):
    for d in fillers:
        if d.signature() == want:
            return d
    raise IngredientError(f"missing ingredient {role}: {want}")


def _assemble(npoints, groups, block_lists, name, children, **params):
    blocks = np.concatenate([np.asarray(b, dtype=np.int64).reshape(-1, 4) for b in block_lists])
    return GroupedDesign(
        npoints,
        [g for g in groups if len(g)],
        blocks,
        kind="GDD",
        k=4,
        provenance=Provenance.make("theorem", name, children=[c.provenance for c in children], **params),
    )


# fundamental construction with a resolvable design


def fundamental_requests(a, b, c, d, t, u, v) -> list[IngredientRequest]:
    """Ingredients of the RGDD construction for (va+b)^u (ct+d)^1."""
    _check_fundamental_params(a, b, c, d, t, u, v)
    reqs = [IngredientRequest("rgdd", sig((u, v + 1)), kind="RGDD", extra={"block_size": v + 1})]
    if t * c > 0:
        reqs.append(IngredientRequest("block filler with c", sig((a, v), (b, 1), (c, 1))))
    if c == 0 or t < u - 1:
        reqs.append(IngredientRequest("block filler", sig((a, v), (b, 1))))
    reqs.append(IngredientRequest("a-group filler", sig((a, u), (d, 1))))
    reqs.append(IngredientRequest("b-group filler", sig((b, u), (d, 1))))
    return reqs


def _check_fundamental_params(a, b, c, d, t, u, v):
    if min(a, b, c, d, t, u, v) < 0:
        raise IngredientError("parameters must be non-negative")
    if not 2 <= v <= u - 1:
        raise IngredientError(f"need 2 <= v <= u-1, got v={v}, u={u}")
    if not 0 <= t <= u - 1:
        raise IngredientError(f"need 0 <= t <= u-1, got t={t}, u={u}")
    if a == 0 or b == 0:
        raise IngredientError("inflation factors a and b must be positive")


def thm_fundamental(a, b, c, d, t, u, v, rgdd: GroupedDesign, fillers) -> GroupedDesign:
    """4-GDD of type (va+b)^u (ct+d)^1 from a (v+1)-RGDD of type u^(v+1).

    Parallel class 0 is removed; its inflated blocks become the groups.  The
    RGDD's last group is inflated by b, the others by a.  Classes 1..t each
    receive c of the new points; the last d new points fill the groups.
    """
    _check_fundamental_params(a, b, c, d, t, u, v)
    _require(rgdd, sig((u, v + 1)), "rgdd", kind="RGDD")
    if rgdd.k != v + 1 or rgdd.resolution is None or len(rgdd.resolution) != u:
        raise IngredientError(f"rgdd must be a resolvable {v + 1}-GDD with {u} parallel classes")
    fillers = list(fillers)
    f_abc = _lookup(fillers, sig((a, v), (b, 1), (c, 1)), "block filler with c") if t * c > 0 else None
    f_ab = _lookup(fillers, sig((a, v), (b, 1)), "block filler") if c == 0 or t < u - 1 else None
    f_ad = _lookup(fillers, sig((a, u), (d, 1)), "a-group filler")
    f_bd = _lookup(fillers, sig((b, u), (d, 1)), "b-group filler")

    last = set(rgdd.groups[-1])
    weight = np.array([b if p in last else a for p in range(rgdd.v)], dtype=np.int64)
    start = np.concatenate([[0], np.cumsum(weight)])
    copies = [list(range(start[p], start[p + 1])) for p in range(rgdd.v)]
    base = int(start[-1])
    class_pts = {ci: list(range(base + (ci - 1) * c, base + ci * c)) for ci in range(1, t + 1)} if c else {}
    d_pts = list(range(base + t * c, base + t * c + d))
    total = base + t * c + d

    out = []
    for ci, cls in enumerate(rgdd.resolution):
        if ci == 0:
            continue
        extra = class_pts.get(ci, [])
        filler = f_abc if extra else f_ab
        for bi in cls:
            parts = [copies[p] for p in rgdd.blocks[bi]]
            if extra:
                parts.append(extra)
            out.append(overlay_blocks(filler, parts, "block filler"))
    for grp in rgdd.groups:
        filler = f_bd if grp[0] in last else f_ad
        parts = [copies[p] for p in grp]
        if d:
            parts.append(d_pts)
        out.append(overlay_blocks(filler, parts, "group filler"))

    groups = [sorted(x for p in rgdd.blocks[bi] for x in copies[p]) for bi in rgdd.resolution[0]]
    groups.append(list(range(base, total)))
    children = [rgdd] + [f for f in (f_abc, f_ab, f_ad, f_bd) if f is not None]
    return _assemble(total, groups, out, "thm33", children, a=a, b=b, c=c, d=d, t=t, u=u, v=v)


# adjoin g points to a coarse design and split its groups


def thm_fill_groups(big: GroupedDesign, g: int, td4g: GroupedDesign, m: int | None = None) -> GroupedDesign:
    """g^u m^1 from (3g)^(u/3) (m-g)^1 plus g new points and TD(4, g) overlays.

    Each 3g-group is cut into three g-parts by ascending point index.  ``m``
    is needed only when m - g = 3g, where the type alone is ambiguous; the
    last group is then taken as the distinguished one.
    """
    if g in (2, 6) or g < 1:
        raise IngredientError(f"no 4-GDD of type {g}^4 for this construction")
    _require(td4g, sig((g, 4)), "td4g")
    sizes = [len(x) for x in big.groups]
    others = [i for i, s in enumerate(sizes) if s != 3 * g]
    if len(others) > 1 or len(others) == len(sizes):
        raise IngredientError(f"big design must have type (3g)^n r^1 with g={g}, got {big.signature()}")
    if others:
        m_idx = others[0]
        if m is not None and sizes[m_idx] != m - g:
            raise IngredientError(f"big design has a group of size {sizes[m_idx]}, expected {m - g}")
    elif m is not None and m - g == 3 * g:
        m_idx = len(sizes) - 1
    elif m is None or m == g:
        m_idx = None
    else:
        raise IngredientError(f"big design has no group of size {m - g}")
    new = list(range(big.v, big.v + g))
    out = [big.blocks]
    groups = []
    for i, grp in enumerate(big.groups):
        if i == m_idx:
            continue
        grp = sorted(grp)
        parts = [grp[0:g], grp[g : 2 * g], grp[2 * g : 3 * g]]
        out.append(overlay_blocks(td4g, parts + [new], "td4g"))
        groups.extend(parts)
    groups.append((list(big.groups[m_idx]) if m_idx is not None else []) + new)
    return _assemble(big.v + g, groups, out, "thm41", [big, td4g], g=g, m=len(groups[-1]))


# inflate through a DGDD and fill groups


def thm_wilson_inflate(small: GroupedDesign, u: int, dgdd_u: GroupedDesign, fillers, m: int) -> GroupedDesign:
    """(sum g_i t_i)^u m^1 from a 4-GDD of type g_1^t_1 ..., a (u, 1^u)^4 DGDD and g_i^u m^1 fillers.

    Point p becomes p*u + h; copy h lies in hole h.  DGDD group i lands on
    the copies of the block's i-th point, its hole-h point on copy h.
    """
    if u < 4 or u == 6:
        raise IngredientError(f"need u >= 4 and u != 6, got u={u}")
    if small.k != 4:
        raise IngredientError("small design must have block size 4")
    if dgdd_u.holes is None or dgdd_u.k != 4:
        raise IngredientError("dgdd_u must be a 4-DGDD with holes")
    if grid_shape(dgdd_u) != (u, 4):
        raise IngredientError(f"dgdd_u must have type ({u}, 1^{u})^4")
    fillers = list(fillers)
    sizes = sorted({len(x) for x in small.groups})
    by_size = {s: _lookup(fillers, sig((s, u), (m, 1)), f"group filler {s}^{u} {m}^1") for s in sizes}

    gi = dgdd_u.group_index()
    hi = dgdd_u.hole_index()
    out = []
    # slot of each DGDD point: (group index, hole index)
    db = dgdd_u.blocks
    for blk in small.blocks:
        out.append(blk[gi[db]] * u + hi[db])
    new = list(range(small.v * u, small.v * u + m))
    for grp in small.groups:
        grp = sorted(grp)
        parts = [[p * u + h for p in grp] for h in range(u)]
        if m:
            parts.append(new)
        out.append(overlay_blocks(by_size[len(grp)], parts, "group filler"))
    groups = [[p * u + h for p in range(small.v)] for h in range(u)] + [new]
    children = [small, dgdd_u] + [by_size[s] for s in sizes]
    return _assemble(small.v * u + m, groups, out, "thm42", children, u=u, m=m)


# fill the holes of a DGDD


def hole_fill_hypotheses(g, u, m) -> bool:
    """The modular conditions under which a 1^u m^1 filler is guaranteed."""
    if g < 4 or u < 4 or g % 3 != 1 or 2 * m > u - 1:
        return False
    return (
        (u % 12 == 0 and m % 3 == 1)
        or (u % 12 == 3 and m % 6 == 1)
        or (u % 12 == 9 and m % 6 == 4)
    )


def hole_profile(design: GroupedDesign) -> int:
    """h when every group meets every hole in exactly h points."""
    if design.holes is None:
        raise IngredientError("input has no holes")
    hole_of = design.hole_index()
    nh = len(design.holes)
    sizes = {int(c) for grp in design.groups for c in np.bincount(hole_of[list(grp)], minlength=nh)}
    if len(sizes) != 1 or 0 in sizes:
        raise IngredientError(f"groups meet holes unevenly: intersection sizes {sorted(sizes)}")
    return sizes.pop()


def thm_hole_fill(dgdd: GroupedDesign, filler: GroupedDesign, m: int) -> GroupedDesign:
    """g^u m^1 from a (g, h^w)^u DGDD by filling each hole plus m new points with h^u m^1.

    With h = 1 this is the grid case (g, 1^g)^u and the filler is 1^u m^1.
    Within a hole, filler group i lands on the hole's intersection with
    group i, by group index.
    """
    h = hole_profile(dgdd)
    u = len(dgdd.groups)
    g = len(dgdd.groups[0])
    if not check_gum(h, u, m).admissible:
        raise IngredientError(f"{h}^{u} {m}^1 is not admissible")
    _require(filler, sig((h, u), (m, 1)), "hole filler")
    if h == 1 and not hole_fill_hypotheses(g, u, m):
        warnings.warn(
            f"(g, u, m) = ({g}, {u}, {m}) lies outside the usual hypotheses; result rests on the supplied filler",
            stacklevel=2,
        )
    gidx = dgdd.group_index()
    new = list(range(dgdd.v, dgdd.v + m))
    out = [dgdd.blocks]
    for hole in dgdd.holes:
        parts = [[] for _ in dgdd.groups]
        for p in sorted(hole):
            parts[gidx[p]].append(p)
        if m:
            parts.append(new)
        out.append(overlay_blocks(filler, parts, "hole filler"))
    groups = [list(x) for x in dgdd.groups] + [new]
    return _assemble(dgdd.v + m, groups, out, "thm43", [dgdd, filler], g=g, h=h, u=u, m=m)


# fill one large group


def fill_big_group(design: GroupedDesign, filler: GroupedDesign, g: int, m: int) -> GroupedDesign:
    """g^(n+k) m^1 from g^n (kg+m)^1 by overlaying the big group with a g^k m^1 filler.

    The big group's points, in ascending order, form k parts of size g and
    then the m-part.
    """
    sizes = [len(x) for x in design.groups]
    big = [i for i, s in enumerate(sizes) if s != g]
    if len(big) != 1 or (sizes[big[0]] - m) % g or sizes[big[0]] <= m:
        raise IngredientError(f"design must have type {g}^n (kg+{m})^1, got {design.signature()}")
    pts = sorted(design.groups[big[0]])
    k = (len(pts) - m) // g
    _require(filler, sig((g, k), (m, 1)), "big-group filler")
    parts = [pts[i * g : (i + 1) * g] for i in range(k)] + ([pts[k * g :]] if m else [])
    out = [design.blocks, overlay_blocks(filler, parts, "big-group filler")]
    groups = [list(x) for i, x in enumerate(design.groups) if i != big[0]] + parts
    return _assemble(design.v, groups, out, "big-group", [design, filler], g=g, m=m)


# scalar inflation


def thm_scalar_inflate(design: GroupedDesign, r: int, td4r: GroupedDesign | None = None) -> GroupedDesign:
    """(rg)^u (rm)^1 from g^u m^1 by weighting every point by r."""
    if r < 3 or r == 6:
        raise IngredientError(f"need r >= 3 and r != 6, got r={r}")
    if design.holes is not None:
        raise IngredientError("scalar inflation takes a GDD without holes")
    if td4r is not None:
        _require(td4r, sig((r, 4)), "td4r")
    out = weight_design(design, r, td4r)
    return out.replace(
        kind="GDD",
        holes=None,
        provenance=Provenance.make("theorem", "thm44", children=[out.provenance], r=r),
    )
