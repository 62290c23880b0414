import pytest

from gdd4.algebra import rtd, td, transversal
from gdd4.appendix import expand_entry, get_entry
from gdd4.constructors import (
    fill_big_group,
    fundamental_requests,
    hole_fill_hypotheses,
    thm_fill_groups,
    thm_fundamental,
    thm_hole_fill,
    thm_scalar_inflate,
    thm_wilson_inflate,
)
from gdd4.core import TypeSignature, expected_block_count
from gdd4.derived import IngredientError, dgdd_transpose, rtd_to_dgdd, weight_design
from gdd4.verify import verify


def _ok(design, text):
    sig = TypeSignature.parse(text)
    return verify(design).passed and design.signature() == sig


def test_fundamental_15_9(solved):
    out = thm_fundamental(3, 3, 0, 0, 0, 9, 4, rtd(5, 9), [solved("3^5"), solved("3^9")])
    assert _ok(out, "15^9") and out.num_blocks == 72 * 15 + 5 * 54 == 1350
    assert out.provenance.name == "thm33" and out.provenance.source == "theorem"


@pytest.mark.parametrize("t", [1, 2, 3])
def test_fundamental_with_new_points(t, solved):
    # (3a + b)^4 (ct)^1 with a = b = c = 3, v = 3, u = 4, d = 0
    fillers = [solved("3^4 3^1"), solved("3^4")]
    if t < 3:
        fillers.append(solved("3^4"))
    out = thm_fundamental(3, 3, 3, 0, t, 4, 3, rtd(4, 4), fillers)
    assert _ok(out, f"12^4 {3 * t}^1")


def test_fundamental_requests_for_51():
    reqs = fundamental_requests(9, 15, 18, 30, 7, 8, 4)
    sigs = {str(r.signature) for r in reqs}
    assert "30^1 9^8" in sigs and "30^1 15^8" in sigs
    assert reqs[0].kind == "RGDD"


def test_fundamental_rejects_large_t(solved):
    with pytest.raises(IngredientError):
        thm_fundamental(3, 3, 3, 0, 9, 9, 4, rtd(5, 9), [])


def test_fundamental_missing_filler():
    with pytest.raises(IngredientError):
        thm_fundamental(3, 3, 0, 0, 0, 9, 4, rtd(5, 9), [])


def test_fill_groups_13_24():
    out = thm_fill_groups(expand_entry(get_entry("39^8 120^1")), 13, td(4, 13))
    assert _ok(out, "13^24 133^1") and out.num_blocks == 13338 + 8 * 169 == 14690
    out = thm_fill_groups(expand_entry(get_entry("39^8 123^1")), 13, td(4, 13))
    assert _ok(out, "13^24 136^1")


def test_fill_groups_rejects_g2():
    with pytest.raises(IngredientError):
        thm_fill_groups(td(4, 3), 2, td(4, 3))


def test_wilson_12_9(solved):
    out = thm_wilson_inflate(td(4, 3), 9, rtd_to_dgdd(9), [solved("3^9")], 0)
    assert _ok(out, "12^9") and out.num_blocks == 9 * 72 + 4 * 54 == 864


def test_wilson_with_point_at_infinity(solved):
    out = thm_wilson_inflate(td(4, 3), 4, rtd_to_dgdd(4), [solved("3^4 3^1")], 3)
    assert _ok(out, "12^4 3^1")


def test_wilson_rejects_u6(solved):
    with pytest.raises(IngredientError):
        thm_wilson_inflate(td(4, 3), 6, rtd_to_dgdd(9), [solved("3^9")], 0)


def test_wilson_needs_every_filler(solved):
    small = expand_entry(get_entry("9^4 18^1 15^1"))
    with pytest.raises(IngredientError):
        thm_wilson_inflate(small, 9, rtd_to_dgdd(9), [solved("3^9")], 0)


def test_hole_fill_4_10(solved):
    out = thm_hole_fill(dgdd_transpose(rtd_to_dgdd(9)), solved("1^9 4^1"), 4)
    assert out.v == 40 and _ok(out, "4^10") and out.num_blocks == 72 + 4 * 12 == 120


def test_hole_fill_weighted_holes(solved):
    dgdd = weight_design(dgdd_transpose(rtd_to_dgdd(9)), 3)
    out = thm_hole_fill(dgdd, solved("3^9"), 0)
    assert _ok(out, "12^9")


def test_hole_fill_rejects_large_m(solved):
    with pytest.raises(IngredientError):
        thm_hole_fill(dgdd_transpose(rtd_to_dgdd(9)), solved("1^9 4^1"), 5)


def test_hole_fill_needs_holes(solved):
    with pytest.raises(IngredientError):
        thm_hole_fill(td(4, 3), solved("1^9 4^1"), 4)


def test_hole_fill_hypotheses():
    assert hole_fill_hypotheses(13, 12, 4)
    assert hole_fill_hypotheses(13, 9, 4)
    assert not hole_fill_hypotheses(13, 9, 1)
    assert not hole_fill_hypotheses(12, 12, 4)


def test_scalar_inflate():
    out = thm_scalar_inflate(expand_entry(get_entry("13^9 10^1")), 3, td(4, 3))
    assert _ok(out, "39^9 30^1") and out.num_blocks == 1209 * 9 == 10881 == expected_block_count(39, 9, 30)


def test_scalar_inflate_rejects_six():
    with pytest.raises(IngredientError):
        thm_scalar_inflate(td(4, 3), 6)


def test_scalar_inflate_17_12_by_5():
    big = thm_scalar_inflate(expand_entry(get_entry("17^12 2^1")), 5)
    assert _ok(big, "85^12 10^1")


def test_fill_big_group(solved):
    out = fill_big_group(solved("1^9 4^1"), transversal(4, 1), 1, 0)
    assert _ok(out, "1^13")
