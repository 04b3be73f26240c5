import json
import math
import os
import subprocess

import pytest

import srmc

BASELINE = srmc.ChainParams(p=0.5, q=0.5, v=2.0, V=4.0, m=500)
HAND = srmc.ChainParams(p=1.0, q=1.0, v=1.0, V=2.0, m=1)


def test_hand_instance():
    x = srmc.NoiseLevel.from_x(0.5)
    pi = srmc.stationary_distribution(HAND, x)
    assert pi[0] == pytest.approx((0.4, 0.6), abs=1e-15)
    assert pi[1] == pytest.approx((0.6, 0.4), abs=1e-15)
    assert srmc.spa(HAND, x) == pytest.approx(0.16, abs=1e-15)
    assert srmc.spa_from_distribution(HAND, x) == pytest.approx(0.16, abs=1e-15)
    oracle = srmc.stationary_oracle(HAND, x)
    flat = [v for row in pi for v in row]
    assert [v for row in oracle for v in row] == pytest.approx(flat, abs=1e-15)


def test_noise_level_round_trip():
    assert srmc.x_from_eps(srmc.eps_from_x(0.3)) == pytest.approx(0.3, rel=1e-15)
    assert math.isinf(srmc.NoiseLevel.from_x(1.0).eps)


def test_tuning_baseline():
    res = srmc.find_resonance(BASELINE)
    assert 0.60 <= res["eps_hat"] <= 0.70
    assert res["eta_max"] <= srmc.max_amplification(2.0, 4.0)
    assert srmc.eps_from_x(srmc.asymptotic_resonance(BASELINE)) == pytest.approx(0.635, abs=1e-3)
    report = srmc.tune(BASELINE)
    assert report["region"] == "U2"
    assert report["x_star"] == 1.0


def test_regions():
    assert srmc.classify(srmc.ChainParams(0.0, 0.5, 1.0, 2.0, 3)) == "U0"
    assert srmc.classify_numeric(srmc.ChainParams(0.8, 0.2, 1.0, 3.0, 5)) == "U2"
    value, disc = srmc.region_boundary(0.5, 0.5, 2)
    assert value == pytest.approx(1.5 - math.sqrt(1.5), abs=1e-15)
    assert disc == pytest.approx(1.5)
    assert srmc.find_zero(srmc.ChainParams(0.8, 0.2, 1.0, 3.0, 5)) == pytest.approx(0.5)
    assert srmc.find_zero(srmc.ChainParams(0.2, 0.8, 1.0, 3.0, 5)) is None


def test_errors_map_to_exceptions():
    with pytest.raises(srmc.InvalidParameter):
        srmc.ChainParams(0.5, 0.5, 3.0, 2.0, 1)
    with pytest.raises(srmc.DegenerateChain):
        srmc.stationary_distribution(srmc.ChainParams(0.5, 0.5, 1.0, 2.0, 3),
                                     srmc.NoiseLevel.from_x(0.0))
    with pytest.raises(srmc.ZeroPrefactor):
        srmc.asymptotic_resonance(srmc.ChainParams(0.0, 0.5, 1.0, 2.0, 3))
    with pytest.raises(srmc.Error):
        srmc.NoiseLevel.from_x(2.0)


def test_monte_carlo_is_seeded():
    x = srmc.NoiseLevel.from_x(0.5)
    a = srmc.estimate_spa(HAND, x, seed=3, periods=20000, replicas=8)
    b = srmc.estimate_spa(HAND, x, seed=3, periods=20000, replicas=8)
    assert a == b
    assert abs(a["eta_hat"] - 0.16) < 3 * a["std_error"] + 1e-12
    assert srmc.estimate_spa(HAND, x, periods=10)["std_error"] is None
    states = srmc.simulate_chain(BASELINE, srmc.NoiseLevel.from_eps(0.65), seed=1, periods=2)
    assert len(states) == 2000 and set(states) <= {-1, 1}


def test_diffusion():
    calm = srmc.deviation_measure(eps=0.0, horizon=50.0, reference="sign")
    assert calm < 0.02
    assert srmc.deviation_measure(seed=4) == srmc.deviation_measure(seed=4)
    res = srmc.mean_exit_time(1.0, 2.0, 2.0, paths=50, seed=1)
    assert res["timeouts"] == 0 and 0.3 < res["mean"] < 5.0
    with pytest.raises(srmc.IntegratorBlowUp):
        srmc.deviation_measure(x0=-9.0, dt=0.009)


@pytest.mark.skipif(not os.environ.get("SRMC_CLI"), reason="CLI executable not provided")
def test_cli_envelope():
    out = subprocess.run([os.environ["SRMC_CLI"], "tune"], check=True, capture_output=True,
                         text=True).stdout
    doc = json.loads(out)
    assert doc["schema_version"] == "1"
    assert doc["command"] == "tune"
    assert set(doc) == {"schema_version", "command", "parameters", "results"}
