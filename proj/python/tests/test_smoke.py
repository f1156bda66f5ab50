import math
import os

import pytest

import mmcov


def test_presets_listed():
    assert mmcov.preset_names() == ["mmwave-28ghz", "mmwave-73ghz", "uwave-2.5ghz"]


def test_coverage_curve_is_probability_and_decreasing():
    scn = mmcov.preset_scenario("mmwave-28ghz", 100.0)
    vals = mmcov.coverage(scn, [-10.0, 0.0, 10.0, 20.0])
    assert all(0.0 <= v <= 1.0 for v in vals)
    assert all(a >= b for a, b in zip(vals, vals[1:]))


def test_low_threshold_limit_is_one_minus_blockage():
    scn = mmcov.preset_scenario("mmwave-28ghz", 200.0)
    (low,) = mmcov.coverage(scn, [-90.0])
    assert low == pytest.approx(1.0 - mmcov.blockage_probability(scn), abs=1e-6)


def test_power_association_dominates():
    pl = mmcov.preset_scenario("mmwave-73ghz", 150.0, "pathloss")
    pw = mmcov.preset_scenario("mmwave-73ghz", 150.0, "power")
    t = [-5.0, 5.0, 15.0]
    for a, b in zip(mmcov.coverage(pl, t), mmcov.coverage(pw, t)):
        assert b >= a - 1e-12


def test_rate_modes_agree():
    scn = mmcov.preset_scenario("mmwave-28ghz", 100.0)
    gcq = mmcov.rate(scn, "gcq")
    ada = mmcov.rate(scn, "adaptive")
    assert gcq["bps"] == pytest.approx(ada["bps"], rel=1e-2)
    assert ada["bps"] == pytest.approx(scn.bandwidth_hz / math.log(2) * ada["nats_per_hz"])


def test_simulation_is_reproducible_and_matches_analysis():
    scn = mmcov.preset_scenario("mmwave-28ghz", 100.0)
    t = [0.0, 10.0]
    a = mmcov.simulate(scn, t, realizations=20000, seed=5)
    b = mmcov.simulate(scn, t, realizations=20000, seed=5)
    assert a == b
    for (mean, _), exact in zip(a["pathloss"]["snr_coverage"], mmcov.coverage(scn, t)):
        assert mean == pytest.approx(exact, abs=0.02)


def test_beam_error_zero_recovers_clean_curve():
    scn = mmcov.preset_scenario("mmwave-28ghz", 150.0)
    t = [0.0, 10.0]
    assert mmcov.coverage(scn.with_beam_error(0.0, 0.0), t) == mmcov.coverage(scn, t)


def test_published_two_ball_parameters():
    tb = mmcov.preset_two_ball("mmwave-28ghz")
    assert tb["d1"] < tb["d2"]
    for row in tb["q"][:2]:
        assert all(0.0 <= x <= 1.0 for x in row)


def test_scenario_files_load():
    root = os.environ.get("MMCOV_SCENARIO_DIR")
    if not root:
        pytest.skip("MMCOV_SCENARIO_DIR not set")
    multi = mmcov.load_scenario(os.path.join(root, "multitier-28ghz.json"))
    assert multi.tier_count == 3
    assert multi.association == "power"


def test_schema_error_is_value_error():
    with pytest.raises(ValueError):
        mmcov.parse_scenario('{"preset": "mmwave-28ghz", "bogus": 1}')
    with pytest.raises(ValueError):
        mmcov.preset_scenario("nope", 100.0)
