import itertools
import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gdd4.algebra import td
from gdd4.appendix import expand_entry, get_entry, load_entries
from gdd4.core import GroupedDesign
from gdd4.derived import dgdd_transpose, rtd_to_dgdd
from gdd4.verify import verify, verify_dgdd_profile, verify_many


def naive_check(design):
    """Pure-python oracle: (passed, cross pairs covered more than once, uncovered cross pairs, inner pairs)."""
    group = {p: i for i, g in enumerate(design.groups) for p in g}
    hole = {p: i for i, h in enumerate(design.holes or ()) for p in h}
    seen = {}
    inner = 0
    for blk in design.blocks.tolist():
        for a, b in itertools.combinations(blk, 2):
            if group[a] == group[b] or (hole and hole[a] == hole[b]):
                inner += 1
            else:
                seen[(a, b)] = seen.get((a, b), 0) + 1
    twice = sum(c > 1 for c in seen.values())
    need = [(a, b) for a, b in itertools.combinations(range(design.v), 2)
            if group[a] != group[b] and not (hole and hole[a] == hole[b])]
    missing = sum(p not in seen for p in need)
    return twice == 0 and missing == 0 and inner == 0, twice, missing, inner


def test_examples():
    rep = verify(expand_entry(get_entry("9^4 18^1 15^1")))
    assert rep.passed and rep.num_blocks == 324
    assert rep.summary().endswith("324 blocks, passed")
    assert verify(td(4, 3)).passed


def test_duplicate_block_gives_six_twice_covered():
    d = td(4, 5)
    dup = d.replace(blocks=np.vstack([d.blocks, d.blocks[:1]]))
    rep = verify(dup)
    assert rep.count("pair-covered-twice") == 6 and set(rep.counts) == {"pair-covered-twice"}


def test_removed_block_gives_six_uncovered():
    d = td(4, 4)
    rep = verify(d.replace(blocks=d.blocks[1:]))
    assert rep.count("pair-uncovered") == 6


def test_profile_examples():
    d = rtd_to_dgdd(9)
    assert verify_dgdd_profile(d, [1] * 4).passed
    t = dgdd_transpose(d)
    assert verify_dgdd_profile(t, [1] * 9).passed
    assert not verify_dgdd_profile(d, [2] * 4).passed
    assert not verify_dgdd_profile(td(4, 3), [1] * 4).passed


def test_holes_equal_groups_fails_profile():
    d = td(4, 3)
    holey = d.replace(holes=d.groups)
    assert not verify_dgdd_profile(holey, [1] * 4).passed


def test_bad_resolution_detected():
    from gdd4.algebra import rtd

    r = rtd(4, 5)
    res = list(map(list, r.resolution))
    res[0], res[1] = res[0][:-1] + [res[1][0]], [res[0][-1]] + res[1][1:]
    assert not verify(r.replace(resolution=res)).passed


def test_json_lines_report():
    d = td(4, 4)
    rep = verify(d.replace(blocks=d.blocks[1:]))
    lines = [json.loads(x) for x in rep.json_lines().splitlines()]
    assert lines[0]["record"] == "summary" and lines[0]["passed"] is False
    assert all(x["type"] == "pair-uncovered" for x in lines[1:]) and len(lines) == 7


def test_verify_many_parallel_matches_serial():
    ds = [td(4, q) for q in (3, 4, 5, 7)] + [expand_entry(get_entry("9^4 18^1 15^1"))]
    serial = [r.passed for r in verify_many(ds, jobs=1)]
    par = [r.passed for r in verify_many(ds, jobs=2)]
    assert serial == par == [True] * 5


SMALL = [td(4, 3), td(4, 4), td(4, 5), rtd_to_dgdd(4), rtd_to_dgdd(5)]


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(range(len(SMALL))), st.data())
def test_agrees_with_naive_oracle(idx, data):
    d = SMALL[idx]
    blocks = d.blocks.copy()
    n_edits = data.draw(st.integers(0, 2))
    for _ in range(n_edits):
        i = data.draw(st.integers(0, len(blocks) - 1))
        j = data.draw(st.integers(0, 3))
        row = [x for x in blocks[i] if x != blocks[i, j]]
        choices = [p for p in range(d.v) if p not in row]
        blocks[i, j] = data.draw(st.sampled_from(choices))
    e = d.replace(blocks=blocks)
    rep = verify(e)
    ok, twice, missing, inner = naive_check(e)
    assert rep.passed == ok
    assert rep.count("pair-covered-twice") == twice
    assert rep.count("pair-uncovered") == missing


@pytest.mark.parametrize("name", sorted(load_entries())[::9][:20])
def test_single_point_perturbation_fails(name):
    d = expand_entry(get_entry(name))
    rng = np.random.default_rng(len(name))
    for _ in range(3):
        blocks = d.blocks.copy()
        i, j = int(rng.integers(len(blocks))), int(rng.integers(4))
        blocks[i, j] = (blocks[i, j] + 1 + int(rng.integers(d.v - 1))) % d.v
        assert not verify(d.replace(blocks=blocks)).passed
