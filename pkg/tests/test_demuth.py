import random

import pytest

from randlab.bitstring import BitString
from randlab.cylinders import CylinderSet, EMPTY_SET
from randlab.demuth import (DemuthTest, DiffPair, DiffUnionTest,
                            VersionedOpenSet, demuth_to_diffunion,
                            diffunion_to_demuth, solovay_membership_profile,
                            verify_demuth, verify_diffunion)
from randlab.dyadic import Dyadic
from randlab.errors import RandlabError
from randlab.generators import (random_demuth_test, random_diffunion_test,
                                random_open_set, thinned_delayed)
from randlab.staged import StagedOpenSet


def staged(events, horizon=4):
    return StagedOpenSet.from_events(events, horizon)


def test_versioned_set_reads_latest_declaration():
    v0 = staged([(0, ["0"])])
    v1 = staged([(1, ["11"])])
    level = VersionedOpenSet([(0, v0), (2, v1)])
    assert level.open_at(-1) == EMPTY_SET
    assert level.open_at(0) == CylinderSet.cylinder("0")
    assert level.open_at(1) == CylinderSet.cylinder("0")
    assert level.open_at(2) == CylinderSet.cylinder("11")
    assert level.final_at(4) == CylinderSet.cylinder("11")
    assert level.version_count() == 2


def test_versioned_set_empty_and_ordering():
    assert VersionedOpenSet([]).final_at(9) == EMPTY_SET
    with pytest.raises(RandlabError):
        VersionedOpenSet([(1, staged([])), (1, staged([]))])


def test_verify_demuth_checks_both_bounds():
    fat = VersionedOpenSet([(0, staged([(0, ["0"])]))])  # measure 1/2
    none = VersionedOpenSet([])
    # At level 1 the cap is exactly 1/2: equality passes.
    report = verify_demuth(DemuthTest((none, fat), (1, 1), horizon=4))
    assert report.ok
    assert report.rows[1].measure == Dyadic(1, 1)
    assert report.rows[1].measure_bound == Dyadic(1, 1)
    # At level 2 the cap drops to 1/4 and the same set breaks it.
    report = verify_demuth(DemuthTest((none, none, fat), (1, 1, 1), horizon=4))
    assert not report.ok
    assert not report.rows[2].ok
    # Version counting is the other half of the audit.
    over = DemuthTest((VersionedOpenSet([(0, staged([])), (1, staged([]))]),),
                      (1,), horizon=4)
    assert not verify_demuth(over).ok


def test_forward_conversion_cancels_superseded_versions():
    v0 = staged([(0, ["0"])])
    v1 = staged([(1, ["10"]), (3, ["111"])])
    test = DemuthTest((VersionedOpenSet([(0, v0), (2, v1)]),), (3,), horizon=4)
    out = demuth_to_diffunion(test)
    assert isinstance(out, DiffUnionTest)
    # Padded to the declared bound.
    assert len(out.levels[0]) == 3
    assert out.pair_bounds == (3,)
    assert out.level_final(0) == v1.final()


def test_forward_conversion_identity_seeded():
    for i in range(25):
        rng = random.Random(f"fwd:{i}")
        test = random_demuth_test(rng, levels=1 + rng.randrange(5),
                                  version_bound=1 + rng.randrange(6),
                                  horizon=1 + rng.randrange(10))
        out = demuth_to_diffunion(test)
        for n, level in enumerate(test.levels):
            assert out.level_final(n) == level.final_at(test.horizon)


def test_converse_tracks_a_growing_subtrahend():
    u = staged([(0, ["0"]), (1, ["10"]), (2, ["110"])])
    v = staged([(1, ["0"]), (2, ["10"])])
    ignored = DiffPair(staged([]), staged([]))
    test = DiffUnionTest(((ignored,), (DiffPair(u, v),)), (1, 1), horizon=4)
    out = diffunion_to_demuth(test)
    level = out.levels[0]
    # V's measure crosses 1/2 (one pair, watched level 1) only at stage 2.
    assert level.version_count() == 2
    assert [s for s, _ in level.versions] == [0, 2]
    assert level.final_at(4) == CylinderSet.cylinder("110")
    assert out.version_bounds == (2,)
    assert verify_demuth(out).ok


def test_converse_bounds_seeded():
    for i in range(25):
        rng = random.Random(f"cnv:{i}")
        test = random_diffunion_test(rng, levels=2 + rng.randrange(3),
                                     pair_bound=1 + rng.randrange(3),
                                     horizon=1 + rng.randrange(8))
        out = diffunion_to_demuth(test)
        assert len(out.levels) == len(test.levels) - 1
        for n, level in enumerate(out.levels):
            c = max(1, len(test.levels[n + 1]))
            assert level.version_count() <= c * c * (1 << (n + 1))
            assert level.final_at(test.horizon).measure() <= Dyadic.half_pow(n)
            tracked = test.level_final(n + 1)
            for _, version in level.versions:
                assert tracked.is_subset(version.open_at(test.horizon))


def test_converse_refuses_overweight_input():
    heavy = DiffPair(staged([(0, ["0", "10"])]), staged([]))
    test = DiffUnionTest(((heavy,), (heavy,)), (1, 1), horizon=4)
    with pytest.raises(RandlabError):
        diffunion_to_demuth(test)
    with pytest.raises(RandlabError):
        diffunion_to_demuth(DiffUnionTest((), (), horizon=4))


def test_random_tests_verify_by_construction():
    for i in range(10):
        rng = random.Random(f"gen:{i}")
        d = random_demuth_test(rng, levels=4, version_bound=4, horizon=6)
        assert verify_demuth(d).ok
        u = random_diffunion_test(rng, levels=4, pair_bound=3, horizon=6)
        assert verify_diffunion(u).ok


def test_thinned_delayed_is_a_stagewise_subset():
    for i in range(20):
        rng = random.Random(f"thin:{i}")
        src = random_open_set(rng, horizon=6, count=8, max_len=5)
        sub = thinned_delayed(rng, src, horizon=6)
        for stage in range(-1, 7):
            assert sub.open_at(stage).is_subset(src.open_at(stage))


def test_membership_profile():
    level0 = VersionedOpenSet([(0, staged([(0, ["^"])]))])
    level1 = VersionedOpenSet([(0, staged([(0, ["01"])]))])
    test = DemuthTest((level0, level1), (1, 1), horizon=4)
    assert solovay_membership_profile(BitString("0110"), test) == {0, 1}
    assert solovay_membership_profile(BitString("0010"), test) == {0}
    out = demuth_to_diffunion(test)
    assert solovay_membership_profile(BitString("0110"), out) == {0, 1}
    with pytest.raises(RandlabError):
        solovay_membership_profile(BitString("0"), object())
