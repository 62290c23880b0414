import numpy as np
import pytest
from hypothesis import given, strategies as st

from gdd4.algebra import td
from gdd4.appendix import expand_entry, get_entry
from gdd4.core import (
    DesignFormatError,
    GroupedDesign,
    Provenance,
    TypeSignature,
    blocks_for_signature,
    cross_pair_count,
    expected_block_count,
    signature_of,
)


def brute_cross_pairs(sizes):
    labels = [i for i, s in enumerate(sizes) for _ in range(s)]
    n = len(labels)
    return sum(labels[a] != labels[b] for a in range(n) for b in range(a + 1, n))


def test_signature_of_examples():
    d = expand_entry(get_entry("9^4 18^1 15^1"))
    assert signature_of(d) == TypeSignature.of([(18, 1), (15, 1), (9, 4)])
    assert signature_of(td(4, 3)) == TypeSignature.of([(3, 4)])
    single = GroupedDesign(4, [[0, 1, 2, 3]], np.zeros((0, 4), dtype=int))
    assert signature_of(single).parts == ((4, 1),)


def test_signature_canonical_form():
    a = TypeSignature.of([(39, 7), (120, 1), (39, 1)])
    assert a == TypeSignature.of([(120, 1), (39, 8)])
    assert str(a) == "120^1 39^8"
    assert TypeSignature.parse("39^8 120^1") == a
    assert a.v == 39 * 8 + 120


def test_signature_rejects_bad_parts():
    with pytest.raises(ValueError):
        TypeSignature.of([(0, 3)])
    with pytest.raises(ValueError):
        TypeSignature.parse("3^x")


def test_expected_block_count_examples():
    assert expected_block_count(39, 8, 120) == 13338 == 85 * 156 + 2 * 39
    assert expected_block_count(13, 12, 7) == 2041 == 25 * 78 + 39 + 2 * 26
    for g in (3, 4, 5, 7, 8, 9):
        assert expected_block_count(g, 4, 0) == g * g


def test_expected_block_count_rejects_non_integral():
    with pytest.raises(ValueError):
        expected_block_count(2, 4, 1)


def test_cross_pair_count_examples():
    assert cross_pair_count(TypeSignature.parse("9^4 18^1 15^1")) == 1944
    assert cross_pair_count(TypeSignature.parse("3^4")) == 54
    assert cross_pair_count(TypeSignature.parse("2^4")) == 24


@given(st.lists(st.integers(1, 6), min_size=1, max_size=6))
def test_cross_pair_count_matches_brute_force(sizes):
    assert cross_pair_count(TypeSignature.from_sizes(sizes)) == brute_cross_pairs(sizes)


@given(st.integers(1, 40), st.integers(2, 20), st.integers(0, 40))
def test_block_formula_agrees_with_pair_count(g, u, m):
    sig = TypeSignature.gum(g, u, m)
    pairs = cross_pair_count(sig)
    if pairs % 6 == 0:
        assert blocks_for_signature(sig) == pairs // 6
        if (g * g * u * (u - 1) + 2 * g * u * m) % 12 == 0:
            assert expected_block_count(g, u, m) == pairs // 6


def test_design_partition_invariants():
    with pytest.raises(DesignFormatError):
        GroupedDesign(4, [[0, 1], [1, 2, 3]], [[0, 1, 2, 3]])
    with pytest.raises(DesignFormatError):
        GroupedDesign(4, [[0, 1], [2]], [[0, 1, 2, 3]])
    with pytest.raises(DesignFormatError):
        GroupedDesign(4, [[0], [1], [2], [3]], [[0, 1, 2, 4]])
    with pytest.raises(DesignFormatError):
        GroupedDesign(4, [[0], [1], [2], [3]], [[0, 1, 2, 3]], holes=[[0, 1]])


def test_blocks_stored_sorted():
    d = GroupedDesign(4, [[0], [1], [2], [3]], [[3, 1, 0, 2]])
    assert d.blocks.tolist() == [[0, 1, 2, 3]]


def test_serialization_round_trip():
    d = td(4, 5)
    d2 = GroupedDesign.loads(d.dumps())
    assert d2.same_design(d)
    assert d2.dumps() == d.dumps()
    assert d2.provenance == d.provenance


def test_serialization_errors():
    with pytest.raises(DesignFormatError):
        GroupedDesign.loads("v=4\nk=4\n0,1,2,3\n")
    with pytest.raises(DesignFormatError):
        GroupedDesign.loads("v=4\nkind=GDD\nk=4\ngroups=0;1;2;3\n0,1,2\n")


def test_provenance_tree():
    leaf = Provenance.make("field-construction", "td", k=4, q=3)
    top = Provenance.make("theorem", "thm44", children=[leaf, leaf], r=3)
    assert top.depth() == 2
    assert Provenance.loads(top.dumps()) == top
    with pytest.raises(ValueError):
        Provenance.make("wizardry")
