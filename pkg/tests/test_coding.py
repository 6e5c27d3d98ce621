"""Single-step and layered coding, replayed the way a decoder would.

The crossbar tree (remove [00] and [10] at stage 0) is small enough that
every walk below is written out by hand next to its assertion.
"""

import random

import pytest

from randlab.bitstring import EMPTY, BitString, self_delimit
from randlab.cylinders import CylinderSet, EMPTY_SET, uniform_suffix_set
from randlab.coding import (OpenFamily, W2RScheme, encode_bits, extend_into_open,
                            g_lsc, gamma_decode, kg_decode, kg_decode_prefix,
                            kg_encode, kucera_depth, shifted_core,
                            stabilization_stage, w2r_encode)
from randlab.errors import (DensityError, DepthExhausted, RandlabError,
                            SchemeError)
from randlab.generators import (build_working_w2r, random_pi01_tree)
from randlab.staged import Pi01Tree, StagedOpenSet


def crossbar(depth=6):
    return Pi01Tree(depth, [(0, ["00", "10"])], horizon=2)


def test_kucera_depth_crossbar():
    t = crossbar()
    # Length 1 has no intact node (each has a removal strictly below);
    # length 2 branches into the two survivors 01 and 11.
    assert kucera_depth(EMPTY, t, 0) == 2
    assert kucera_depth(BitString("01"), t, 0) == 3
    bare = Pi01Tree(4)
    assert kucera_depth(EMPTY, bare, 0) == 1
    cramped = Pi01Tree(2, [(0, ["00", "10"])])
    with pytest.raises(DepthExhausted):
        kucera_depth(BitString("01"), cramped, 0)


def test_encode_bits_walks_extremes():
    t = crossbar()
    assert encode_bits(BitString("0"), EMPTY, t, 0) == BitString("01")
    assert encode_bits(BitString("1"), EMPTY, t, 0) == BitString("11")
    assert encode_bits(BitString("10"), EMPTY, t, 0) == BitString("110")


def test_kg_codeword_by_hand():
    # self_delimit("1") = 101; the walk takes 11, then 110, then 1101.
    t = crossbar()
    assert kg_encode(BitString("1"), EMPTY, t) == BitString("1101")
    assert kg_decode(BitString("1101"), EMPTY, t) == BitString("1")


def test_kg_round_trip_all_short_payloads():
    t = crossbar(depth=24)
    seen = []
    for k in range(16):
        payload = BitString(format(k, "04b"))
        code = kg_decode_prefix(kg_encode(payload, EMPTY, t), EMPTY, t)
        assert code is not None and code[0] == payload
        seen.append(kg_encode(payload, EMPTY, t))
    # The codeword set is an antichain: the codec is prefix-free and the
    # walk sends incomparable bit streams to incomparable stems.
    for i, a in enumerate(seen):
        for b in seen[i + 1:]:
            assert not a.comparable(b)


def test_kg_decode_rejects_nonwords():
    t = crossbar()
    word = kg_encode(BitString("1"), EMPTY, t)
    assert kg_decode(word + BitString("0"), EMPTY, t) is None
    assert kg_decode(word.prefix(len(word) - 1), EMPTY, t) is None
    assert kg_decode(BitString("10"), EMPTY, t) is None  # off-survivor step
    assert kg_decode_prefix(BitString("0"), BitString("1"), t) is None


def test_kg_round_trip_seeded_trees():
    for i in range(12):
        rng = random.Random(f"kg:{i}")
        tree = random_pi01_tree(rng, depth=24, horizon=8)
        for payload in (BitString("^"), BitString("0"), BitString("101")):
            word = kg_encode(payload, EMPTY, tree)
            assert kg_decode(word, EMPTY, tree) == payload
            assert tree.viable(word, tree.horizon)


def test_stage_replay_garbles_honestly():
    # A removal landing at stage 1 moves the branching level, so a stage-0
    # codeword no longer tracks the stage-1 survivors.
    t = Pi01Tree(4, [(1, ["01"])], horizon=1)
    word = kg_encode(BitString("0"), EMPTY, t, stage=0)
    assert kg_decode(word, EMPTY, t, stage=0) == BitString("0")
    assert kg_decode(word, EMPTY, t, stage=1) is None


def test_open_family_nesting_enforced():
    big = StagedOpenSet.from_events([(0, ["0"])], horizon=2)
    small = StagedOpenSet.from_events([(1, ["00"])], horizon=2)
    OpenFamily((big, small))
    with pytest.raises(SchemeError):
        OpenFamily((small, big))
    with pytest.raises(SchemeError):
        OpenFamily(())


def test_g_lsc_approximates_from_below():
    # Level 0 swallows the whole cylinder above 0 only at stage 2, pushing
    # the least admissible index from 0 up to 1.
    l0 = StagedOpenSet.from_events([(2, ["0"])], horizon=4)
    l1 = StagedOpenSet.from_events([], horizon=4)
    fam = OpenFamily((l0, l1))
    tree = Pi01Tree(6, horizon=4)
    values = [g_lsc(fam, BitString("0"), tree, s) for s in range(5)]
    assert values == [0, 0, 1, 1, 1]
    for a, b in zip(values, values[1:]):
        assert a <= b
    # With every level full above sigma, no index qualifies.
    full = OpenFamily((StagedOpenSet.from_events([(0, ["^"])], horizon=1),))
    assert g_lsc(full, BitString("0"), Pi01Tree(4, horizon=1), 1) is None


def test_w2r_encode_layers_and_classes():
    payloads = [BitString("101"), BitString("01")]
    scheme = build_working_w2r(5, payloads)
    enc = w2r_encode(payloads, scheme)
    assert [l.family_index for l in enc.layers] == list(scheme.star_indices)
    assert [l.payload for l in enc.layers] == payloads
    assert len(enc.classes) == 3
    assert enc.classes[-1].viable(enc.codeword, scheme.horizon)
    for layer in enc.layers:
        assert layer.g_trajectory[-1] == layer.g_value
    with pytest.raises(SchemeError):
        w2r_encode(payloads + [BitString("1")], scheme)


def test_stabilization_confines_errors():
    payloads = [BitString("101"), BitString("01")]
    scheme = build_working_w2r(5, payloads)
    enc = w2r_encode(payloads, scheme)
    stab = stabilization_stage(payloads, scheme)
    for layer in enc.layers:
        assert all(g == layer.g_value for g in layer.g_trajectory[stab:])
    stream = BitString("10101")
    res = gamma_decode(enc.codeword, max(scheme.horizon, stab) + len(stream), scheme)
    assert res.output_prefix() == stream
    for i in range(stab, len(stream)):
        bit, _ = res.positions[i]
        assert bit == stream[i]


def test_gamma_positions_written_once_and_stage_limited():
    payloads = [BitString("11")]
    scheme = build_working_w2r(7, payloads)
    enc = w2r_encode(payloads, scheme)
    res = gamma_decode(enc.codeword, 10, scheme)
    for i, (bit, t) in res.positions.items():
        assert i <= t  # a stage-t replay may claim positions up to t only
    assert res.output_prefix() == BitString("11")
    assert res.defined_upto() == 2


def test_shifted_core_exact():
    for i in range(10):
        rng = random.Random(f"core:{i}")
        gens = [BitString(format(rng.randrange(8), "03b"))
                for _ in range(rng.randrange(1, 4))]
        u = CylinderSet.normalize(gens)
        for n in range(4):
            core = shifted_core(u, n)
            for tail in BitString.all_strings(5):
                expect = all(u.contains_prefix_of(head + tail)
                             for head in BitString.all_strings(n))
                assert core.contains_prefix_of(tail) == expect


def test_extend_into_open_steers_every_head():
    u = uniform_suffix_set("11", 6)
    scheme = build_working_w2r(5, [BitString("10")])
    payload, n, zeta = extend_into_open([BitString("10")], u, scheme)
    assert payload == BitString("0" * (n - 2)) + zeta
    assert n >= 2
    for head in BitString.all_strings(n):
        assert u.contains_prefix_of(head + zeta)


def test_extend_into_open_rejects_sparse_sets():
    # With no coded prefix the head length is zero and a bare cylinder is
    # reachable; one prior payload forces heads the cylinder cannot absorb.
    scheme = build_working_w2r(5, [BitString("10")])
    payload, n, zeta = extend_into_open([], CylinderSet.cylinder("11"), scheme)
    assert (payload, n, zeta) == (BitString("11"), 0, BitString("11"))
    with pytest.raises(DensityError) as err:
        extend_into_open([BitString("10")], CylinderSet.cylinder("11"), scheme)
    assert "head" in str(err.value)
    with pytest.raises(DensityError):
        extend_into_open([BitString("10")], EMPTY_SET, scheme)


def test_scheme_star_index_validation():
    tree = Pi01Tree(6, horizon=1)
    fam = OpenFamily((StagedOpenSet.empty(1),))
    with pytest.raises(SchemeError):
        W2RScheme(tree, (fam,), (1,), horizon=1)
    scheme = W2RScheme(tree, (fam,), (0,), horizon=1)
    with pytest.raises(SchemeError):
        scheme.family(3)
