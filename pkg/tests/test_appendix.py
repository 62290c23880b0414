import numpy as np
import pytest

from gdd4.appendix import (
    EntryError,
    SegmentMap,
    apply_mapping,
    derive_groups,
    entry_from_coded,
    expand_entry,
    get_entry,
    load_entries,
    parse_coded_string,
)
from gdd4.core import TypeSignature, blocks_for_signature


def test_entry_count():
    assert len(load_entries()) == 178


def test_parse_coded_string_example():
    v, shells, parts = parse_coded_string("(69, ((36, 9, ((36, 4), (18, 2), (15, 5)))), ((9, 4), (18, 1), (15, 1)))")
    assert v == 69 and parts == [(9, 4), (18, 1), (15, 1)]
    (sh,) = shells
    assert (sh.count, sh.jmax) == (36, 9)
    assert [(s.offset, s.length, s.step, s.modulus) for s in sh.segments] == [
        (0, 36, 4, None), (36, 18, 2, None), (54, 15, 5, None)]


def test_parse_product_action():
    text = "(221, ((2, 69, ((207, 3, (69, 3)), (12, 4), (2, 2))), (17, 207, ((207, 1, (69, 3)), (12, 4), (2, 2)))), ((23, 9), (14, 1)))"
    v, shells, _ = parse_coded_string(text)
    assert v == 221 and len(shells) == 2
    assert shells[0].segments[0].modulus == 69 and shells[0].segments[0].step == 3
    assert shells[1].segments[0].step == 1


def test_parse_rejects_wrong_orbit_count():
    with pytest.raises(EntryError):
        parse_coded_string("(69, ((35, 9, ((36, 4), (18, 2), (15, 5)))), ((9, 4), (18, 1), (15, 1)))")
    with pytest.raises(EntryError):
        parse_coded_string("(69, ((36, 9, ((36, 4), (18, 2)))), ((9, 4), (18, 1), (15, 1)))")
    with pytest.raises(EntryError):
        parse_coded_string("(69, ((36, 9, ((36, 4) (18, 2)")


def test_fixed_point_segment():
    seg = SegmentMap(162, 1, 1)
    assert seg.is_fixed and all(seg.image(162, j) == 162 for j in range(10))


def test_derive_groups_examples():
    g = derive_groups(163, [(13, 12), (7, 1)])
    assert len(g) == 13 and g[0] == list(range(0, 156, 12)) and g[-1] == list(range(156, 163))
    g = derive_groups(438, [(39, 7), (39, 1), (126, 1)])
    assert len(g) == 9 and g[0] == list(range(0, 273, 7))
    assert g[7] == list(range(273, 312)) and g[8] == list(range(312, 438))
    assert derive_groups(12, [(3, 4)]) == [[0, 4, 8], [1, 5, 9], [2, 6, 10], [3, 7, 11]]


def test_apply_mapping_examples():
    segs = (SegmentMap(0, 207, 3, 69), SegmentMap(207, 12, 4), SegmentMap(219, 2, 2))
    assert apply_mapping(5, 2, segs) == 11
    assert all(apply_mapping(x, 0, segs) == x for x in (0, 100, 210, 220))


def test_expand_examples():
    assert expand_entry(get_entry("9^4 18^1 15^1")).num_blocks == 324
    assert expand_entry(get_entry("39^8 120^1")).num_blocks == 13338


def test_29_9_14_orbit_count():
    entry = get_entry("29^9 14^1")
    assert entry.orbit_count == blocks_for_signature(entry.declared_type) == 5655


@pytest.mark.parametrize("name", sorted(load_entries())[::17])
def test_coded_string_expansion_matches_explicit(name):
    entry = get_entry(name)
    assert expand_entry(entry_from_coded(entry)).same_design(expand_entry(entry))


def _group_images(entry, gen):
    groups = [tuple(g) for g in derive_groups(entry.v, entry.declared_type.segments)]
    label = np.empty(entry.v, dtype=int)
    for i, g in enumerate(groups):
        label[list(g)] = i
    return groups, label


@pytest.mark.parametrize("name", sorted(load_entries()))
def test_generators_act_as_group_automorphisms(name):
    """Each one-step map is a permutation of points that carries groups to groups."""
    entry = get_entry(name)
    for gen in entry.generators:
        groups, label = _group_images(entry, gen)
        img = np.array([apply_mapping(x, 1, gen.segments) for x in range(entry.v)])
        assert sorted(img.tolist()) == list(range(entry.v))
        for grp in groups:
            assert len(set(label[img[list(grp)]])) == 1
        two = np.array([apply_mapping(x, 2, gen.segments) for x in range(entry.v)])
        assert np.array_equal(img[img], two)


def test_get_entry_by_type_alias():
    assert get_entry("120^1 39^8").name == "39^8 120^1"
    with pytest.raises(KeyError):
        get_entry("5^5 5^1")


def test_signature_matches_declared():
    for entry in list(load_entries().values())[:30]:
        assert expand_entry(entry).signature() == entry.declared_type
        assert isinstance(entry.declared_type, TypeSignature)
