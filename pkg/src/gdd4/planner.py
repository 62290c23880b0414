"""Turn a target type g^u m^1 into a construction tree with explicit leaves.

Planning is a pure function of (g, u, m) and the schedule tables; execution
builds the tree bottom-up, verifying every intermediate design.
"""

from __future__ import annotations

import functools
import json
import math
from dataclasses import dataclass, field

from . import schedules as S
from .admissibility import KNOWN_NONEXISTENT_TAG, check_gum
from .algebra import prime_power
from .appendix import find_by_signature
from .constructors import fundamental_requests, hole_fill_hypotheses, sig
from .core import TypeSignature, cross_pair_count

LEAF_METHODS = ("appendix", "algebra", "derived", "import", "search")
METHODS = LEAF_METHODS + ("theorem",)
DEFAULT_DEPTH = 3
# search leaves up to this many cross pairs count as self-suppliable
SELF_SUPPLY_PAIRS = 200
MAX_SEARCH_PAIRS = 2000


class PlanError(ValueError):
    """Inadmissible or known-nonexistent target."""


class OutOfScope(ValueError):
    """Parameters outside every schedule row; the reason says where they are delegated."""


@dataclass(frozen=True)
class PlanNode:
    goal: TypeSignature
    method: str
    name: str
    row: str
    kind: str = "GDD"
    params: tuple = ()
    children: tuple["PlanNode", ...] = ()
    role: str = ""
    notes: tuple[str, ...] = ()

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown plan method {self.method!r}")
        if self.row not in S.ROWS:
            raise ValueError(f"plan row {self.row!r} is not in the schedule tables")
        if self.method in LEAF_METHODS and self.children:
            raise ValueError("leaf nodes take no children")

    def param(self, key, default=None):
        return dict(self.params).get(key, default)

    def walk(self):
        yield self
        for c in self.children:
            yield from c.walk()

    def leaves(self):
        return [n for n in self.walk() if not n.children]

    def unresolved(self, search_pairs: int = SELF_SUPPLY_PAIRS) -> list["PlanNode"]:
        """Leaves that cannot be produced locally."""
        out = []
        for n in self.leaves():
            if n.method == "import" or (n.method == "search" and n.param("pairs", 0) > search_pairs):
                out.append(n)
        return out

    def complete(self, search_pairs: int = SELF_SUPPLY_PAIRS) -> bool:
        return not self.unresolved(search_pairs)

    def label(self) -> str:
        holes = self.param("holes")
        goal = f"{self.kind} {format_type(self.goal)}" + (f" holes={holes}" if holes else "")
        shown = ", ".join(f"{k}={v}" for k, v in self.params if k not in ("holes", "pairs"))
        head = f"{self.method} {self.name}" + (f"({shown})" if shown else "")
        return f"{head} -> {goal}"

    def render(self, indent: int = 0) -> str:
        role = f"{self.role}: " if self.role else ""
        lines = ["  " * indent + f"{role}{self.label()}  [{self.row}]"]
        for note in self.notes:
            lines.append("  " * indent + f"  note: {note}")
        for c in self.children:
            lines.append(c.render(indent + 1))
        return "\n".join(lines)

    def to_obj(self) -> dict:
        obj = {
            "goal": format_type(self.goal),
            "kind": self.kind,
            "method": self.method,
            "name": self.name,
            "row": self.row,
            "params": dict(self.params),
        }
        if self.role:
            obj["role"] = self.role
        if self.notes:
            obj["notes"] = list(self.notes)
        if self.children:
            obj["children"] = [c.to_obj() for c in self.children]
        return obj

    def dumps(self) -> str:
        return json.dumps(self.to_obj(), sort_keys=True)


def _node(goal, method, name, row, kind="GDD", children=(), role="", notes=(), **params):
    return PlanNode(goal, method, name, row, kind, tuple(sorted(params.items())), tuple(children), role, tuple(notes))


def _with_role(node: PlanNode, role: str) -> PlanNode:
    return PlanNode(node.goal, node.method, node.name, node.row, node.kind, node.params, node.children, role, node.notes)


# leaves


def td4_available(q: int) -> bool:
    """TD(4, q) from fields and MacNeish products: q odd or divisible by 4, q != 2, 6."""
    return q == 1 or (q not in (2, 6) and (q % 2 == 1 or q % 4 == 0))


def _rtd_available(k: int, q: int) -> bool:
    return prime_power(q) is not None and 2 <= k <= q


def leaf_for(signature: TypeSignature, row: str | None = None, role: str = "") -> PlanNode:
    """Best leaf for a GDD type: appendix, field TD, search or import."""
    entry = find_by_signature(signature)
    if entry is not None:
        return _node(signature, "appendix", entry.name, "appendix", role=role)
    if len(signature.parts) == 1 and signature.parts[0][1] == 4 and td4_available(signature.parts[0][0]):
        q = signature.parts[0][0]
        return _node(signature, "algebra", "td", "field:td", kind="TD", role=role, k=4, q=q)
    gum = split_gum(signature)
    if gum is not None and check_gum(*gum).existence == KNOWN_NONEXISTENT_TAG:
        raise PlanError(f"ingredient {signature} is known not to exist")
    pairs = cross_pair_count(signature)
    if pairs <= MAX_SEARCH_PAIRS:
        return _node(signature, "search", "exact-cover", "leaf:search", role=role, pairs=pairs)
    return _node(signature, "import", "external", row or "leaf:import", role=role, pairs=pairs)


def dgdd_leaf(g: int, u: int, role: str = "") -> PlanNode:
    """A 4-DGDD of type (g, 1^g)^u: u groups of size g, g holes."""
    goal = sig((g, u))
    if u == 4 and _rtd_available(4, g) and g != 6:
        return _node(goal, "derived", "rtd_to_dgdd", "derived:dgdd-rtd", kind="DGDD", role=role, n=g, holes=g)
    if g == 4 and _rtd_available(4, u) and u != 6:
        return _node(goal, "derived", "dgdd_transpose_rtd", "derived:dgdd-transpose", kind="DGDD", role=role, n=u, holes=g)
    return _node(goal, "import", "external", "leaf:import", kind="DGDD", role=role, holes=g)


def rgdd_leaf(k: int, u: int, role: str = "rgdd") -> PlanNode:
    goal = sig((u, k))
    if _rtd_available(k, u):
        return _node(goal, "algebra", "rtd", "field:rtd", kind="RGDD", role=role, k=k, q=u)
    return _node(goal, "import", "external", "leaf:import", kind="RGDD", role=role, k=k)


def format_type(signature: TypeSignature) -> str:
    """g^u m^1 order when the type has that shape."""
    gum = split_gum(signature)
    if gum is None or gum[2] == 0:
        return str(signature)
    g, u, m = gum
    return f"{g}^{u} {m}^1"


def split_gum(signature: TypeSignature):
    """(g, u, m) when the type is g^u m^1 (m = 0 for uniform types), else None."""
    parts = signature.parts
    if len(parts) == 1:
        return parts[0][0], parts[0][1], 0
    if len(parts) == 2:
        (s1, c1), (s2, c2) = parts
        if c2 == 1 and c1 > 1:
            return s1, c1, s2
        if c1 == 1 and c2 > 1:
            return s2, c2, s1
    return None


def plan_signature(signature: TypeSignature, depth: int = DEFAULT_DEPTH, role: str = "") -> PlanNode:
    gum = split_gum(signature)
    if gum is not None and depth > 0:
        g, u, m = gum
        return _with_role(_plan(g, u, m, depth), role)
    return leaf_for(signature, role=role)


# theorem nodes


def _thm33(goal, a, b, c, d, t, u, v, row, depth, notes=()):
    children = [rgdd_leaf(v + 1, u)]
    for req in fundamental_requests(a, b, c, d, t, u, v)[1:]:
        children.append(plan_signature(req.signature, depth - 1, role=req.role))
    return _node(goal, "theorem", "thm33", row, children=children, notes=notes, a=a, b=b, c=c, d=d, t=t, u=u, v=v)


def _rgdd_scheme_params(g, u):
    """(a, v, b, row) for u in {7, 11}."""
    if g in S.RGDD_SCHEME:
        a, v, b = S.RGDD_SCHEME[g]
        return a, v, b, f"rgdd-scheme:g={g}"
    if g >= S.RGDD_SCHEME_FORMULA_MIN_G:
        a = 6 * ((g + 18) // 36)
        return a, 5, g - 5 * a, "rgdd-scheme:formula"
    raise OutOfScope(f"g = {g} has no scheme row")


def scheme_mod6_3(g: int, u: int, m: int, depth: int = DEFAULT_DEPTH) -> PlanNode:
    """RGDD-based schedule for g = 3 (mod 6), u in {7, 8, 11}."""
    if g % 6 != 3:
        raise OutOfScope(f"g = {g} is not 3 mod 6")
    if u not in (7, 8, 11):
        raise OutOfScope(f"delegated: u = {u} is covered by the prior catalogue")
    verdict = check_gum(g, u, m)
    if not verdict.admissible:
        raise PlanError(f"{g}^{u} {m}^1 is not admissible: {verdict}")
    if g < 39 or any(g % q == 0 for q in S.RGDD_SCHEME_DIVISORS):
        raise OutOfScope(f"delegated: g = {g} is below 39 or divisible by one of {S.RGDD_SCHEME_DIVISORS} (prior literature)")
    goal = TypeSignature.gum(g, u, m)
    if u in (7, 11):
        a, v, b, row = _rgdd_scheme_params(g, u)
        checks = {
            "g = va + b": g == v * a + b,
            "v <= u - 1": v <= u - 1,
            "a = 0 (mod 6)": a % 6 == 0,
            "b = 3 (mod 6)": b % 6 == 3,
            "0 < b <= a(v-1)/2 < g": 0 < 2 * b <= a * (v - 1) < 2 * g,
            "b(u-1)/2 >= a - 3": b * (u - 1) >= 2 * (a - 3),
            "a(u-1)/2 >= a - 3": a * (u - 1) >= 2 * (a - 3),
            "7a - 3 >= g - 6": 7 * a - 3 >= g - 6,
        }
        bad = [k for k, ok in checks.items() if not ok]
        if bad:
            raise OutOfScope(f"scheme conditions fail for g = {g}: {', '.join(bad)}")
        if not (3 <= m <= 7 * a - 3 and m % 6 == 3):
            raise OutOfScope(f"m = {m} is outside 3, 9, .., {7 * a - 3}")
        t, d = divmod(m, a)
        return _thm33(goal, a, b, a, d, t, u, v, row, depth)
    # u = 8
    if (g - 3) % 30 or (g - 3) // 30 < S.U8_BRANCH_MIN_H:
        raise OutOfScope(f"delegated: u = 8 needs g = 30h + 3 with h >= 3, got g = {g}")
    h = (g - 3) // 30
    a, b, c, v = 6 * h, 6 * h + 3, 12 * h, 4
    dmax = 3 * b
    if m % 3 or m > 7 * c + dmax:
        raise OutOfScope(f"m = {m} is outside 0, 3, .., {7 * c + dmax}")
    t = min(7, m // c)
    d = m - t * c
    note = ("the increase of the upper end to (7g - 21)/2 is conditional and not planned",)
    return _thm33(goal, a, b, c, d, t, 8, v, "rgdd-scheme:u=8", depth, notes=note)


# dispatch


def plan_gum(g: int, u: int, m: int, depth: int = DEFAULT_DEPTH) -> PlanNode:
    """Plan a 4-GDD of type g^u m^1; the first complete candidate wins.

    Order: appendix, field TD, group splitting, scalar inflation, per-g recipe
    tables, RGDD schedules, then a search or import leaf.  When no candidate
    is complete, a candidate from a specific table row is preferred.
    """
    verdict = check_gum(g, u, m)
    if not verdict.admissible:
        raise PlanError(f"{g}^{u} {m}^1 is not admissible: {', '.join(verdict.failed_conditions)}")
    if verdict.existence == KNOWN_NONEXISTENT_TAG:
        raise PlanError(f"{g}^{u} {m}^1 is known not to exist ({verdict.citation})")
    return _plan(g, u, m, depth)


@functools.lru_cache(maxsize=4096)
def _plan(g, u, m, depth):
    goal = TypeSignature.gum(g, u, m)
    candidates = []
    for make in (_cand_leaf, _cand_split, _cand_scale, _cand_tables, _cand_scheme):
        try:
            candidates.extend(make(g, u, m, depth))
        except (OutOfScope, PlanError):
            continue
    for c in candidates:
        if c.complete():
            return c
    for c in candidates:
        if not c.row.startswith(("generic:", "leaf:")):
            return c
    if candidates:
        return candidates[0]
    return leaf_for(goal)


def _admissible_existing(g, u, m):
    if g < 1 or u < 1 or m < 0:
        return False
    v = check_gum(g, u, m)
    return v.admissible and v.existence != KNOWN_NONEXISTENT_TAG


def _cand_leaf(g, u, m, depth):
    leaf = leaf_for(TypeSignature.gum(g, u, m))
    return [leaf] if leaf.method in ("appendix", "algebra") else []


def _cand_split(g, u, m, depth):
    if depth <= 0 or u % 3 or u // 3 < 4 or g in (2, 6) or m < g:
        return []
    if not _admissible_existing(3 * g, u // 3, m - g):
        return []
    sub = _with_role(_plan(3 * g, u // 3, m - g, depth - 1), "coarse design")
    if u == 24 and m in S.SPLIT_GROUPS.get(g, ()):
        row = f"split-groups:g={g}"
    elif u in (21, 33) and ((g % 6 == 1 and m % 6 == 4) or (g % 6 == 5 and m % 6 == 2)) and 2 * m <= g * (u - 1):
        row = "split-groups:u=21,33"
    elif u == 24 and g % 30 in (1, 11) and 5 * m <= 56 * g - 6:
        row = "split-groups:u=24"
    elif sub.method == "import":
        return []
    else:
        row = "generic:split-groups"
    td = leaf_for(sig((g, 4)), role="td4g")
    goal = TypeSignature.gum(g, u, m)
    return [_node(goal, "theorem", "thm41", row, children=(sub, td), g=g, m=m)]


def _cand_scale(g, u, m, depth):
    if depth <= 0:
        return []
    tabled = S.SCALE.get((g, u, m))
    out = []
    for r in sorted(_divisors(math.gcd(g, m)), reverse=True):
        if r < 3 or r == 6:
            continue
        if not _admissible_existing(g // r, u, m // r):
            continue
        sub = _with_role(_plan(g // r, u, m // r, depth - 1), "base design")
        td = leaf_for(sig((r, 4)), role="td4r")
        row = f"scale:{g}^{u} {m}^1" if tabled == r else "generic:scale"
        out.append(_node(TypeSignature.gum(g, u, m), "theorem", "thm44", row, children=(sub, td), r=r))
    return out


def _cand_tables(g, u, m, depth):
    goal = TypeSignature.gum(g, u, m)
    out = []
    if m in S.HOLE_FILL.get(g, {}).get(u, ()):
        out.append(_hole_fill_node(goal, g, u, m, f"hole-fill:g={g}", depth))
    if m in S.HOLE_FILL_H5.get(g, {}).get(u, ()):
        w = g // 5
        dgdd = _node(sig((g, u)), "import", "external", "leaf:import", kind="DGDD", role="dgdd", holes=w)
        filler = plan_signature(sig((5, u), (m, 1)), depth - 1, role="hole filler")
        out.append(_node(goal, "theorem", "thm43", f"hole-fill-h5:g={g}", children=(dgdd, filler), m=m))
    if g in S.WILSON and m in S.WILSON[g][1].get(u, ()):
        small_sig = TypeSignature.parse(S.WILSON[g][0])
        children = [plan_signature(small_sig, depth - 1, role="small design"), dgdd_leaf(u, 4, role="dgdd")]
        for s, _ in small_sig.parts:
            children.append(plan_signature(sig((s, u), (m, 1)), depth - 1, role=f"filler {s}"))
        out.append(_node(goal, "theorem", "thm42", f"wilson:g={g}", children=children, u=u, m=m))
    if u in S.BIG_GROUP and g in S.BIG_GROUP_G and 0 < m < g and depth > 0:
        k = S.BIG_GROUP[u]
        if _admissible_existing(g, u - k, k * g + m) and _admissible_existing(g, k, m):
            coarse = _with_role(_plan(g, u - k, k * g + m, depth - 1), "coarse design")
            filler = _with_role(_plan(g, k, m, depth - 1), "big-group filler")
            out.append(_node(goal, "theorem", "big-group", f"big-group:u={u}", children=(coarse, filler), g=g, m=m))
    if g == 17 and u in (21, 24, 27) and m < 17:
        out.append(leaf_for(goal, row="literature:g=17:dgdd-route"))
    if g == 25 and u == 24 and m <= 22:
        out.append(leaf_for(goal, row="literature:g=25:u=24"))
    if g % 3 == 1 and hole_fill_hypotheses(g, u, m) and g not in S.HOLE_FILL:
        out.append(_hole_fill_node(goal, g, u, m, "generic:hole-fill", depth))
    return out


def _hole_fill_node(goal, g, u, m, row, depth):
    dgdd = dgdd_leaf(g, u, role="dgdd")
    filler = plan_signature(sig((1, u), (m, 1)), depth - 1, role="hole filler")
    return _node(goal, "theorem", "thm43", row, children=(dgdd, filler), m=m)


def _cand_scheme(g, u, m, depth):
    out = []
    if u == 8:
        for rid, tg, ms, a, v, b, c, t in S.U8_TABLE:
            if tg == g and m in ms:
                out.append(_thm33(TypeSignature.gum(g, u, m), a, b, c, m - t * c, t, 8, v, rid, depth))
    try:
        out.append(scheme_mod6_3(g, u, m, depth))
    except (OutOfScope, PlanError):
        pass
    return out


def _divisors(n):
    return [d for d in range(1, n + 1) if n % d == 0] if n > 0 else []


def plan_rows(plan: PlanNode) -> list[str]:
    return [n.row for n in plan.walk()]


# execution


@dataclass(frozen=True)
class MissingIngredient:
    signature: str
    kind: str
    method: str
    row: str
    reason: str

    def __str__(self):
        return f"{self.kind} {self.signature} ({self.method}, {self.row}): {self.reason}"


class UnresolvedPlan(RuntimeError):
    def __init__(self, missing: list[MissingIngredient]):
        self.missing = list(missing)
        names = ", ".join(f"{m.kind} {m.signature}" for m in self.missing)
        super().__init__(f"plan has {len(self.missing)} unresolved ingredient(s): {names}")


@dataclass
class ExecutionConfig:
    seed: int = 0
    search_budget: float = 30.0
    max_search_pairs: int = MAX_SEARCH_PAIRS


class _Executor:
    def __init__(self, registry, config: ExecutionConfig):
        self.registry = registry
        self.config = config
        self.memo = {}
        self.missing: list[MissingIngredient] = []

    def _miss(self, node, reason):
        self.missing.append(MissingIngredient(format_type(node.goal), node.kind, node.method, node.row, reason))

    def _cached(self, node):
        if self.registry is None:
            return None
        return self.registry.get(node.goal, node.kind, node.param("holes"))

    def build(self, node: PlanNode):
        key = (node.kind, node.goal, node.param("holes"), node.method, node.name, node.params)
        if key in self.memo:
            return self.memo[key]
        design = self._cached(node)
        if design is None:
            design = self._make(node)
            if design is not None:
                self._check(node, design)
                if self.registry is not None:
                    self.registry.put(design)
        self.memo[key] = design
        return design

    def _check(self, node, design):
        from .verify import verify

        report = verify(design)
        if not report.passed:
            raise RuntimeError(f"construction {node.name} produced an invalid design: {report.summary()}")
        if design.signature() != node.goal:
            raise RuntimeError(f"construction {node.name} produced {design.signature()}, expected {node.goal}")

    def _make(self, node):
        from . import algebra, constructors, derived
        from .appendix import expand_entry, get_entry
        from .exact_cover import solve_signature

        if node.method == "appendix":
            return expand_entry(get_entry(node.name))
        if node.method == "algebra":
            if node.name == "td":
                return algebra.transversal(node.param("k"), node.param("q"))
            return algebra.rtd(node.param("k"), node.param("q"))
        if node.method == "derived":
            d = derived.rtd_to_dgdd(node.param("n"))
            return derived.dgdd_transpose(d) if node.name == "dgdd_transpose_rtd" else d
        if node.method == "import":
            self._miss(node, "not in the registry; supply it with 'catalog import'")
            return None
        if node.method == "search":
            if node.param("pairs", 0) > self.config.max_search_pairs:
                self._miss(node, f"search skipped: {node.param('pairs')} pairs exceeds {self.config.max_search_pairs}")
                return None
            res = solve_signature(node.goal, seed=self.config.seed, time_budget=self.config.search_budget)
            if res.status != "sat":
                self._miss(node, f"search {res.status} after {res.elapsed:.1f} s")
                return None
            return res.design
        kids = [self.build(c) for c in node.children]
        if any(k is None for k in kids):
            return None
        p = dict(node.params)
        if node.name == "thm33":
            return constructors.thm_fundamental(p["a"], p["b"], p["c"], p["d"], p["t"], p["u"], p["v"], kids[0], kids[1:])
        if node.name == "thm41":
            return constructors.thm_fill_groups(kids[0], p["g"], kids[1], m=p["m"])
        if node.name == "thm42":
            return constructors.thm_wilson_inflate(kids[0], p["u"], kids[1], kids[2:], p["m"])
        if node.name == "thm43":
            return constructors.thm_hole_fill(kids[0], kids[1], p["m"])
        if node.name == "thm44":
            return constructors.thm_scalar_inflate(kids[0], p["r"], kids[1])
        if node.name == "big-group":
            return constructors.fill_big_group(kids[0], kids[1], p["g"], p["m"])
        raise ValueError(f"unknown construction {node.name!r}")


def execute_plan(plan: PlanNode, registry=None, config: ExecutionConfig | None = None):
    """Build the plan bottom-up; raises UnresolvedPlan listing every missing leaf."""
    ex = _Executor(registry, config or ExecutionConfig())
    design = ex.build(plan)
    if design is None or ex.missing:
        raise UnresolvedPlan(ex.missing)
    return design
