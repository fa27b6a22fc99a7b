import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cogspectrum.topology import (
    ConfigurationError,
    Point,
    PrimaryUser,
    Scenario,
    ScenarioConfig,
    SecondaryUser,
    build_model,
    coverage_radius,
    generate_scenario,
)


def make_scenario(su_xy, pu_specs, side=10.0, channels=1, d_min=1.0, d_max=4.0):
    """pu_specs: list of (x, y, channel, dp)."""
    primaries = tuple(
        PrimaryUser(id=x, position=Point(px, py), channel=ch, protection_radius=dp)
        for x, (px, py, ch, dp) in enumerate(pu_specs)
    )
    secondaries = tuple(
        SecondaryUser(id=n, nan_id=0, position=Point(sx, sy))
        for n, (sx, sy) in enumerate(su_xy)
    )
    return Scenario(side=side, channels=channels, d_min=d_min, d_max=d_max,
                    primaries=primaries, secondaries=secondaries, seed=0)


class TestScenarioConfig:
    def test_defaults_match_reference_scale(self):
        cfg = ScenarioConfig()
        assert (cfg.channels, cfg.n_nans, cfg.sus_per_nan, cfg.n_pus) == (10, 5, 20, 10)
        assert (cfg.d_min, cfg.d_max, cfg.dp) == (1.0, 4.0, 2.0)

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(side=0.0),
            dict(channels=0),
            dict(n_nans=0),
            dict(sus_per_nan=0),
            dict(n_pus=-1),
            dict(d_min=4.0, d_max=4.0),
            dict(d_min=5.0, d_max=4.0),
            dict(d_min=0.0),
            dict(dp=0.0),
            dict(side=math.inf),
        ],
    )
    def test_invalid_configs_rejected(self, kwargs):
        with pytest.raises(ConfigurationError):
            ScenarioConfig(**kwargs)


class TestGenerateScenario:
    def test_degenerate_population(self):
        cfg = ScenarioConfig(side=10, channels=1, n_nans=1, sus_per_nan=1, n_pus=0)
        scn = generate_scenario(cfg, seed=7)
        assert scn.n_users == 1
        assert len(scn.primaries) == 0
        assert scn.channels == 1

    def test_reference_scale(self):
        cfg = ScenarioConfig(channels=10, n_pus=10, n_nans=5, sus_per_nan=20,
                             d_min=1, d_max=4, dp=2)
        scn = generate_scenario(cfg, seed=3)
        assert scn.n_users == 100
        assert len(scn.primaries) == 10
        assert scn.n_nans == 5
        assert all(0 <= pu.channel < 10 for pu in scn.primaries)

    def test_identical_seed_bit_identical(self):
        cfg = ScenarioConfig(n_nans=2, sus_per_nan=3, n_pus=4)
        assert generate_scenario(cfg, 5) == generate_scenario(cfg, 5)

    def test_different_seeds_differ(self):
        cfg = ScenarioConfig(n_nans=2, sus_per_nan=3, n_pus=4)
        a = generate_scenario(cfg, 1)
        b = generate_scenario(cfg, 2)
        assert any(
            sa.position != sb.position for sa, sb in zip(a.secondaries, b.secondaries)
        ) or any(pa.position != pb.position for pa, pb in zip(a.primaries, b.primaries))

    def test_nan_ids_are_dense_blocks(self):
        scn = generate_scenario(ScenarioConfig(n_nans=3, sus_per_nan=4), 0)
        assert scn.nan_of() == (0, 0, 0, 0, 1, 1, 1, 1, 2, 2, 2, 2)

    def test_positions_inside_area(self):
        scn = generate_scenario(ScenarioConfig(side=5.0), 11)
        for su in scn.secondaries:
            assert 0 <= su.position.x <= 5 and 0 <= su.position.y <= 5


class TestCoverageRadius:
    def test_no_primary_on_channel_gives_d_max(self):
        scn = make_scenario([(5.0, 5.0)], [], channels=1, d_max=4.0)
        assert coverage_radius(scn, 0, 0) == 4.0

    def test_backoff_from_primary(self):
        # primary 5 away with protection 2: radius min(4, 3) = 3
        scn = make_scenario([(5.0, 5.0)], [(0.0, 5.0, 0, 2.0)], channels=1)
        assert coverage_radius(scn, 0, 0) == pytest.approx(3.0, rel=1e-12)

    def test_clamped_to_zero_inside_protection(self):
        scn = make_scenario([(2.0, 5.0)], [(0.0, 5.0, 0, 2.0)], channels=1)
        assert coverage_radius(scn, 0, 0) == 0.0

    def test_nearest_primary_wins(self):
        scn = make_scenario(
            [(5.0, 5.0)],
            [(0.0, 5.0, 0, 2.0), (8.0, 5.0, 0, 1.0)],
            channels=1,
        )
        assert coverage_radius(scn, 0, 0) == pytest.approx(2.0, rel=1e-12)


class TestBuildModel:
    def test_single_user_no_primaries_coverage(self):
        scn = make_scenario([(5.0, 5.0)], [], channels=1)
        model = build_model(scn, "coverage")
        assert model.availability.tolist() == [[True]]
        assert not model.interference.any()
        assert model.reward.tolist() == [[16.0]]
        assert model.b_max == 16.0

    def test_capacity_reward_is_log(self):
        scn = make_scenario([(5.0, 5.0)], [(0.0, 5.0, 0, 2.0)], channels=1)
        model = build_model(scn, "capacity")
        assert model.ds[0, 0] == pytest.approx(3.0)
        assert model.reward[0, 0] == pytest.approx(math.log(10.0), rel=1e-12)

    def test_disc_overlap_marks_interference(self):
        # distance 5 with radii 3 + 3 = 6 > 5: conflict
        scn = make_scenario(
            [(2.5, 5.0), (7.5, 5.0)],
            [(2.5, 0.0, 0, 2.0), (7.5, 0.0, 0, 2.0)],
            channels=1, d_max=3.0,
        )
        model = build_model(scn)
        assert model.ds[0, 0] == pytest.approx(3.0)
        assert model.interference[0, 1, 0]
        assert model.interference[1, 0, 0]

    def test_unavailable_channel_cannot_conflict(self):
        scn = make_scenario(
            [(1.0, 5.0), (1.5, 5.0)],
            [(0.0, 5.0, 0, 2.0)],
            channels=1,
        )
        model = build_model(scn)
        assert not model.availability[0, 0]
        assert not model.interference[0, 1, 0]

    def test_unknown_reward_mode_rejected(self):
        scn = make_scenario([(5.0, 5.0)], [], channels=1)
        with pytest.raises(ConfigurationError):
            build_model(scn, "throughput")

    def test_deterministic(self):
        scn = generate_scenario(ScenarioConfig(n_nans=2, sus_per_nan=5, n_pus=6), 9)
        a, b = build_model(scn), build_model(scn)
        assert np.array_equal(a.ds, b.ds)
        assert np.array_equal(a.interference, b.interference)
        assert np.array_equal(a.reward, b.reward)

    def test_matches_scalar_coverage_radius(self):
        scn = generate_scenario(ScenarioConfig(channels=4, n_nans=2, sus_per_nan=4, n_pus=5), 21)
        model = build_model(scn)
        for n in range(scn.n_users):
            for m in range(scn.channels):
                assert model.ds[n, m] == pytest.approx(coverage_radius(scn, n, m), abs=1e-12)


def check_model_invariants(scn, model):
    ds, avail, conflicts, reward = model.ds, model.availability, model.interference, model.reward
    assert np.array_equal(avail, ds >= scn.d_min)
    # availability window
    assert (ds[avail] <= scn.d_max + 1e-12).all()
    # symmetry, empty diagonal, conflicts only between mutually available users
    assert np.array_equal(conflicts, conflicts.transpose(1, 0, 2))
    assert not conflicts[np.arange(scn.n_users), np.arange(scn.n_users), :].any()
    pair_avail = avail[:, None, :] & avail[None, :, :]
    assert not (conflicts & ~pair_avail).any()
    # rewards vanish exactly off the availability support
    assert (reward[~avail] == 0).all()
    assert (reward[avail] > 0).all()
    if avail.any():
        assert model.b_max > 0
    # conflicting users are within twice the maximum range
    xy = scn.su_positions()
    dist = np.hypot(xy[:, 0:1] - xy[None, :, 0], xy[:, 1:2] - xy[None, :, 1])
    for m in range(scn.channels):
        assert (dist[conflicts[:, :, m]] < 2 * scn.d_max).all()


def test_invariants_over_many_seeds():
    import random

    rng = random.Random(12345)
    for seed in range(1000):
        cfg = ScenarioConfig(
            channels=rng.randint(1, 6),
            n_nans=rng.randint(1, 3),
            sus_per_nan=rng.randint(1, 4),
            n_pus=rng.randint(0, 6),
        )
        scn = generate_scenario(cfg, seed)
        check_model_invariants(scn, build_model(scn))


@settings(max_examples=60, deadline=None)
@given(
    channels=st.integers(1, 8),
    n_nans=st.integers(1, 4),
    sus_per_nan=st.integers(1, 6),
    n_pus=st.integers(0, 10),
    dp=st.floats(0.5, 3.0),
    seed=st.integers(0, 2**31),
)
def test_invariants_property(channels, n_nans, sus_per_nan, n_pus, dp, seed):
    cfg = ScenarioConfig(channels=channels, n_nans=n_nans, sus_per_nan=sus_per_nan,
                         n_pus=n_pus, dp=dp)
    scn = generate_scenario(cfg, seed)
    check_model_invariants(scn, build_model(scn))


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**31), channel=st.integers(0, 3))
def test_adding_primary_never_grows_coverage(seed, channel):
    cfg = ScenarioConfig(channels=4, n_nans=2, sus_per_nan=3, n_pus=3)
    scn = generate_scenario(cfg, seed)
    before = build_model(scn).ds

    extra = PrimaryUser(id=len(scn.primaries), position=Point(5.0, 5.0),
                        channel=channel, protection_radius=cfg.dp)
    grown = dataclasses.replace(scn, primaries=scn.primaries + (extra,))
    after = build_model(grown).ds
    assert (after <= before + 1e-12).all()


def test_scenario_validation():
    with pytest.raises(ConfigurationError):
        make_scenario([(11.0, 5.0)], [])  # outside the area
    with pytest.raises(ConfigurationError):
        make_scenario([(5.0, 5.0)], [(1.0, 1.0, 3, 2.0)], channels=1)  # channel range
    with pytest.raises(ConfigurationError):
        Scenario(side=10, channels=1, d_min=1, d_max=4, primaries=(),
                 secondaries=(), seed=0)  # no users
