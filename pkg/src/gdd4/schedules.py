"""Construction schedules as data.

Every plan node cites one row id from ``ROWS``.  The tables below list the
parameter choices of the recursive constructions; the planner only reads
them, so each choice can be audited against its row.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Row:
    id: str
    rule: str  # appendix, field, derived, thm33, thm41, thm42, thm43, thm44, big-group, search, import
    covers: str


def _steps(lo, hi, step=3):
    return tuple(range(lo, hi + 1, step))


# RGDD scheme for g = 3 (mod 6), u in {7, 11}: g -> (a, v, b); c = a, t = 0..6
RGDD_SCHEME = {
    39: (6, 5, 9),
    51: (12, 4, 3),
    57: (12, 4, 9),
    69: (12, 5, 9),
    87: (18, 4, 15),
    93: (18, 4, 21),
}
RGDD_SCHEME_FORMULA_MIN_G = 111  # a = 6 * floor((g + 18) / 36), v = 5, b = g - 5a
RGDD_SCHEME_DIVISORS = (15, 21, 27, 33)  # such g are settled by prior literature

# u = 8, g = 30h + 3, h >= 3: a = 6h, b = 6h + 3, c = 12h, v = 4, t = 0..7, d = 0, 3, .., 3b
U8_BRANCH_MIN_H = 3

# u = 8 table rows for specific g: (g, m values, a, v, b, c, t, d = m - t*c)
U8_TABLE = (
    ("u8:g=51:m=156", 51, (156,), 9, 4, 15, 18, 7),
    ("u8:g=69:m=210-219", 69, _steps(210, 219), 9, 6, 15, 27, 7),
    ("u8:g=87:m=264-294", 87, _steps(264, 294), 12, 6, 15, 36, 7),
    ("u8:g=93:m=282-315", 93, _steps(282, 315), 18, 4, 21, 36, 7),
)

# hole filling of a (g, 1^g)^u DGDD with 1^u m^1: g -> {u: m values}
HOLE_FILL = {
    13: {12: (1, 4), 24: (1, 4, 7, 10), 15: (1, 7), 27: (1, 7), 9: (4,), 21: (4, 10)},
    19: {12: (1, 4), 24: (1, 4, 7, 10), 15: (1, 7), 27: (1, 7, 13), 9: (4,), 21: (4, 10)},
    25: {12: (1, 4), 15: (1, 7), 27: (1, 7, 13), 9: (4,), 21: (4, 10)},
}

# hole filling of a (35, 5^7)^u DGDD with 5^u m^1
HOLE_FILL_H5 = {
    35: {
        12: _steps(2, 26),
        24: _steps(2, 32),
        15: (5, 11, 17, 23, 29),
        27: (5, 11, 17, 23, 29),
        9: (2, 8, 14, 20),
        21: (2, 8, 14, 20, 26, 32),
    },
}

# inflation through (u, 1^u)^4 with a small design: g -> (small type, {u: m values})
WILSON = {
    23: ("2^9 5^1", {12: (2, 5, 8, 11), 24: _steps(2, 20), 15: (5, 11), 27: (5, 11, 17), 9: (2, 8), 21: (2, 8, 14, 20)}),
    29: ("2^12 5^1", {12: (2, 5, 8, 11), 24: _steps(2, 23), 15: (5, 11), 27: (5, 11, 17, 23), 9: (2, 8), 21: (2, 8, 14, 20)}),
    31: ("4^6 7^1", {12: _steps(1, 22), 24: _steps(1, 28), 15: (1, 7, 13, 19, 25), 27: (1, 7, 13, 19, 25), 9: (4, 10, 16), 21: (4, 10, 16, 22, 28)}),
}

# g^24 m^1 from (3g)^8 (m - g)^1: g -> m values
SPLIT_GROUPS = {
    13: _steps(133, 145),
    17: _steps(173, 191),
    19: _steps(193, 214),
    23: _steps(233, 260),
    25: _steps(253, 283),
    29: _steps(293, 329),
    31: _steps(313, 352),
    35: _steps(353, 398),
}

# scalar inflation: (g, u, m) -> (r, small (g', u, m'))
SCALE = {
    (25, 12, 10): 5,
    (25, 9, 10): 5,
    (25, 9, 40): 5,
    (25, 9, 70): 5,
    (35, 9, 50): 5,
    (35, 9, 80): 5,
    (35, 9, 110): 5,
    (35, 9, 56): 7,
    (35, 9, 98): 7,
}

# big-group overlay for u in {33, 39, 51}, m < g: u -> number of g-groups in the filler
BIG_GROUP = {33: 9, 39: 12, 51: 12}
BIG_GROUP_G = (13, 17, 19, 23, 25, 29, 31, 35)

# cases whose ingredients come only from outside literature
LITERATURE_ONLY = (
    ("literature:g=17:dgdd-route", "17^u m^1 for u in {21, 24, 27}, m < 17, via (2n, 2^n)^6 (5n, 5^n)^1 DGDDs"),
    ("literature:g=25:u=24", "25^24 m^1, m <= 22, via a (60, 10^6)^10 DGDD"),
    ("literature:g=17:small-m", "17^a 5^1 and 17^b 2^1"),
)


def _build_rows():
    rows = [
        Row("appendix", "appendix", "explicit base-block designs shipped with the package"),
        Row("field:td", "field", "TD(4, q) from finite fields and MacNeish products"),
        Row("field:rtd", "field", "resolvable TD from a finite field"),
        Row("derived:dgdd-rtd", "derived", "(n, 1^n)^4 from an RTD minus one parallel class"),
        Row("derived:dgdd-transpose", "derived", "(4, 1^4)^n as the transpose of (n, 1^n)^4"),
        Row("leaf:search", "search", "small design left to exact-cover search"),
        Row("leaf:import", "import", "design that must be supplied from outside"),
        Row("leaf:literature", "import", "design covered by prior literature, to be imported"),
        Row("generic:split-groups", "thm41", "g^u m^1 from (3g)^(u/3) (m-g)^1 and TD(4, g)"),
        Row("generic:scale", "thm44", "(rg)^u (rm)^1 from g^u m^1 and TD(4, r)"),
        Row("generic:hole-fill", "thm43", "g^u m^1 from (g, 1^g)^u and 1^u m^1"),
        Row("split-groups:u=21,33", "thm41", "g = 1, 5 (mod 6), u in {21, 33}, g <= m via the g = 3 (mod 6) scheme"),
        Row("split-groups:u=24", "thm41", "g = 1, 11 (mod 30), u = 24, g <= m <= (56g - 6)/5"),
        Row("rgdd-scheme:formula", "thm33", "g >= 111, u in {7, 11}: a = 6 floor((g+18)/36), v = 5, b = g - 5a"),
        Row("rgdd-scheme:u=8", "thm33", "g = 30h + 3, u = 8: a = 6h, b = 6h+3, c = 12h, v = 4"),
    ]
    rows += [Row(f"rgdd-scheme:g={g}", "thm33", f"g = {g}, u in {{7, 11}}: a, v, b = {abv}") for g, abv in RGDD_SCHEME.items()]
    rows += [Row(rid, "thm33", f"{g}^8 m^1 for m in {ms[0]}..{ms[-1]}: a={a}, v={v}, b={b}, c={c}, t={t}")
             for rid, g, ms, a, v, b, c, t in U8_TABLE]
    rows += [Row(f"hole-fill:g={g}", "thm43", f"{g}^u m^1 for (u, m) in {dict(tab)}") for g, tab in HOLE_FILL.items()]
    rows += [Row(f"hole-fill-h5:g={g}", "thm43", f"{g}^u m^1 from ({g}, 5^7)^u and 5^u m^1") for g in HOLE_FILL_H5]
    rows += [Row(f"wilson:g={g}", "thm42", f"{g}^u m^1 from {small} via (u, 1^u)^4") for g, (small, _) in WILSON.items()]
    rows += [Row(f"split-groups:g={g}", "thm41", f"{g}^24 m^1 for m in {ms[0]}..{ms[-1]}") for g, ms in SPLIT_GROUPS.items()]
    rows += [Row(f"scale:{g}^{u} {m}^1", "thm44", f"weight {g // r}^{u} {m // r}^1 by {r}") for (g, u, m), r in SCALE.items()]
    rows += [Row(f"big-group:u={u}", "big-group", f"g^{u} m^1, m < g, from g^{u - k} ({k}g+m)^1 and g^{k} m^1")
             for u, k in BIG_GROUP.items()]
    rows += [Row(rid, "import", text) for rid, text in LITERATURE_ONLY]
    return {r.id: r for r in rows}


ROWS: dict[str, Row] = _build_rows()
