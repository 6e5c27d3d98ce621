"""Clopen-set algebra checked point by point at depth 8.

The oracle is deliberately dumb: a point of Cantor space is approximated by
a string of DEPTH bits, and every operation is recomputed by scanning all
2^DEPTH of them.  The trie implementation must agree exactly.
"""

from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from randlab.bitstring import BitString
from randlab.cylinders import (CylinderSet, EMPTY_SET, FULL_SET, brute_measure,
                               uniform_suffix_set)
from randlab.dyadic import Dyadic

DEPTH = 8

gen_strings = st.lists(st.text(alphabet="01", max_size=6), max_size=8)
clopens = gen_strings.map(CylinderSet.normalize)


def slow_points(cs):
    return {leaf for leaf in BitString.all_strings(DEPTH)
            if any(g.is_prefix_of(leaf) for g in cs.strings)}


@given(clopens)
def test_normalize_idempotent(a):
    assert CylinderSet.normalize(a.strings) == a


@given(clopens)
def test_canonical_antichain(a):
    gens = a.strings
    for i, g in enumerate(gens):
        for h in gens[i + 1:]:
            assert not g.comparable(h)
    # No unmerged sibling pair: s0 and s1 never both appear.
    as_set = {g.bits for g in gens}
    for g in gens:
        if g.bits.endswith("0"):
            assert g.bits[:-1] + "1" not in as_set


@given(clopens, clopens)
@settings(max_examples=60)
def test_boolean_ops_pointwise(a, b):
    pa, pb = slow_points(a), slow_points(b)
    assert slow_points(a | b) == pa | pb
    assert slow_points(a & b) == pa & pb
    assert slow_points(a - b) == pa - pb


@given(clopens)
def test_complement_pointwise(a):
    everything = set(BitString.all_strings(DEPTH))
    assert slow_points(a.complement()) == everything - slow_points(a)


@given(clopens)
def test_measure_against_brute_force(a):
    assert a.measure() == brute_measure(a.strings, DEPTH)


@given(clopens, clopens)
def test_inclusion_exclusion(a, b):
    assert (a | b).measure() + (a & b).measure() == a.measure() + b.measure()


@given(clopens, clopens)
def test_subset_and_intersects(a, b):
    pa, pb = slow_points(a), slow_points(b)
    assert a.is_subset(b) == (pa <= pb)
    assert a.intersects(b) == bool(pa & pb)


@given(clopens, st.text(alphabet="01", max_size=4))
def test_shift_pointwise(a, eta):
    shifted = a.shift(eta)
    span = DEPTH - len(eta)
    expect = {tail for tail in BitString.all_strings(span)
              if any(g.is_prefix_of(BitString(eta) + tail) or
                     (BitString(eta) + tail).extends(g)
                     for g in a.strings)}
    got = {tail for tail in BitString.all_strings(span)
           if any(g.is_prefix_of(tail) for g in shifted.strings)}
    assert got == expect


@given(clopens, st.text(alphabet="01", min_size=DEPTH, max_size=DEPTH))
def test_contains_prefix_of_matches_points(a, x):
    assert a.contains_prefix_of(x) == (BitString(x) in slow_points(a))


@given(clopens, st.text(alphabet="01", max_size=5))
def test_meets_cylinder(a, s):
    cyl = CylinderSet.cylinder(s) if s else FULL_SET
    assert a.meets_cylinder(s) == a.intersects(cyl)


@given(clopens, st.text(alphabet="01", max_size=5))
def test_conditional_measure(a, s):
    assert a.conditional_measure(s) == a.shift(s).measure()


@given(clopens, clopens)
def test_eq_hash_contract(a, b):
    if a == b:
        assert hash(a) == hash(b)
        assert a.strings == b.strings


def test_extremes():
    assert EMPTY_SET.measure() == 0
    assert FULL_SET.measure() == 1
    assert EMPTY_SET.is_empty() and not EMPTY_SET.is_full()
    assert FULL_SET.is_full() and not FULL_SET.is_empty()
    assert CylinderSet.normalize([]) == EMPTY_SET
    assert CylinderSet.normalize(["^"]) == FULL_SET
    assert CylinderSet.normalize(["0", "1"]) == FULL_SET


def test_sibling_merge_cascades():
    merged = CylinderSet.normalize(["00", "01", "10", "11"])
    assert merged == FULL_SET
    assert CylinderSet.normalize(["000", "001", "01"]) == CylinderSet.cylinder("0")


def test_subsumption():
    assert CylinderSet.normalize(["0", "01"]) == CylinderSet.cylinder("0")
    assert CylinderSet.normalize(["010", "0"]) == CylinderSet.cylinder("0")


def test_rendering_is_length_lex():
    assert str(CylinderSet.normalize(["01", "1"])) == "{1,01}"
    assert str(EMPTY_SET) == "{}"


@given(st.text(alphabet="01", max_size=3), st.integers(min_value=0, max_value=5))
def test_uniform_suffix_set_matches_enumeration(pattern, position):
    fast = uniform_suffix_set(pattern, position)
    slow = CylinderSet.normalize(
        [head + BitString(pattern) for head in BitString.all_strings(position)])
    assert fast == slow
    assert fast.measure() == slow.measure()


def test_uniform_suffix_set_large_offset_is_cheap():
    big = uniform_suffix_set("11", 40)
    assert big.measure() == Dyadic(1, 2)
    assert big.contains_prefix_of("0" * 40 + "11")
    assert not big.contains_prefix_of("0" * 40 + "10")
    # Shifting consumes free positions one head bit at a time.
    assert big.shift("1" * 13) == uniform_suffix_set("11", 27)


def test_measure_of_shared_trie_is_exact():
    # One pattern bit fixed out of position+2: measure 2^-1 regardless of offset.
    for position in (0, 10, 33):
        assert uniform_suffix_set("1", position).measure() == Fraction(1, 2)
