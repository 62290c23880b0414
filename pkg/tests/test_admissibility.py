from hypothesis import given, settings, strategies as st

from gdd4.admissibility import (
    KNOWN_EXISTS,
    KNOWN_NONEXISTENT_TAG,
    check_gum,
    check_uniform,
    congruence_failures,
    table_row,
)


def test_examples():
    assert check_gum(3, 5, 6).admissible
    bad = check_gum(3, 5, 3)
    assert not bad.admissible and any("residue" in f for f in bad.failed_conditions)
    v = check_gum(2, 6, 5)
    assert v.admissible and v.existence == KNOWN_NONEXISTENT_TAG
    assert check_gum(13, 9, 4).admissible


def test_uniform_examples():
    assert check_uniform(3, 9).admissible
    v = check_uniform(2, 4)
    assert v.admissible and v.existence == KNOWN_NONEXISTENT_TAG
    assert check_uniform(6, 4).existence == KNOWN_NONEXISTENT_TAG
    assert check_uniform(1, 4).admissible
    assert not check_uniform(2, 5).admissible


def test_degenerate_m_routes_to_uniform():
    assert check_gum(2, 4, 0).existence == KNOWN_NONEXISTENT_TAG
    assert check_gum(1, 12, 1).admissible
    assert check_gum(3, 3, 3).existence == KNOWN_EXISTS


def test_appendix_existence():
    v = check_gum(39, 8, 120)
    assert v.admissible and v.existence == KNOWN_EXISTS


def test_m_upper_bound():
    assert not check_gum(3, 5, 9).admissible


@settings(max_examples=400)
@given(st.integers(1, 50), st.integers(4, 30), st.integers(1, 800))
def test_table_agrees_with_congruences(g, u, m):
    if m == g or 2 * m > g * (u - 1):
        return
    assert (table_row(g, u, m) is not None) == (not congruence_failures(g, u, m))


@given(st.integers(1, 50), st.integers(4, 30), st.integers(1, 800))
def test_admissible_implies_integral_blocks(g, u, m):
    if check_gum(g, u, m).admissible:
        assert (g * g * u * (u - 1) + 2 * g * u * m) % 12 == 0
