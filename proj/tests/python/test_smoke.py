import math

import numpy as np
import pytest

import gansmooth as gs


def two_point(wa, wb):
    return gs.Measure(np.array([[0.0], [1.0]]), np.array([wa, wb]))


def test_divergences():
    mu, mu0 = two_point(0.25, 0.75), two_point(0.5, 0.5)
    assert gs.ns_kl(mu, mu0) == pytest.approx(0.0315839424019633, rel=1e-12)
    assert gs.w1(mu, mu0) == pytest.approx(0.25)
    dirac0 = gs.Measure(np.zeros((1, 1)), np.ones(1))
    dirac1 = gs.Measure(np.ones((1, 1)), np.ones(1))
    assert gs.mmd_sq(dirac0, dirac1) == pytest.approx(2 - 2 * math.exp(-math.pi), rel=1e-12)


def test_measure_validation():
    with pytest.raises(gs.GansmoothError):
        gs.Measure(np.zeros((2, 1)), np.array([0.5, -0.6]))


def test_moreau_of_abs_is_huber():
    x = np.linspace(-3, 3, 6001)
    m = gs.moreau(np.abs(x), -3.0, 1e-3, 1.0)
    huber = np.where(np.abs(x) <= 1, 0.5 * x * x, np.abs(x) - 0.5)
    assert np.max(np.abs(m - huber)) <= 2e-3


def test_series_norm_converges():
    s = gs.truncated_series_norm(np.zeros(1), np.ones(1), 20)
    assert len(s) == 21
    assert abs(s[-1] - 1.0) <= 1e-6


def test_particle_training_descends():
    target = gs.sample_target("ring", 16, seed=3)
    tr = gs.train_particles(target, n=16, steps=100, seed=4)
    assert tr["final_loss"] <= tr["loss"][0]
    assert np.all(np.diff(tr["loss"]) <= 1e-12)
    assert tr["lipschitz_l"] == pytest.approx(6 * math.pi / 16)


def test_smoothness_report_within_bounds():
    r = gs.smoothness_report("mmd", dim=1, trials=20, seed=5)
    assert r["beta2"]["value"] <= 2 * math.pi * 1.01
    assert r["alpha"]["value"] <= 2 * math.sqrt(2 * math.pi) * math.exp(-0.5)


def test_verify_envelopes():
    checks = gs.verify("envelopes")
    assert checks and all(c["pass"] for c in checks)
