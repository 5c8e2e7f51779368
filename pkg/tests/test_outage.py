import numpy as np
import pytest

from ocbf.outage import (LinkPowers, epsilon_rate, instantaneous_rate,
                         mc_outage, outage_probability)
from ocbf.scenario import Scenario, generate_scenario


def test_instantaneous_rate_plugin():
    h = np.zeros((1, 1, 1), dtype=complex)
    h[0, 0, 0] = 1.0
    assert instantaneous_rate(h, [np.array([1.0 + 0j])], 1.0, 0) == pytest.approx(1.0)


def test_instantaneous_rate_with_interference():
    h = np.ones((2, 2, 1), dtype=complex)
    w = [np.array([1.0 + 0j]), np.array([1.0 + 0j])]
    # sig 1, interference 1, sigma2 1 -> log2(1.5)
    assert instantaneous_rate(h, w, 1.0, 0) == pytest.approx(np.log2(1.5))


def test_instantaneous_rate_zero_beamformer():
    h = np.ones((1, 1, 2), dtype=complex)
    assert instantaneous_rate(h, [np.zeros(2, dtype=complex)], 1.0, 0) == 0.0


def test_outage_single_link():
    lp = LinkPowers(signal=1.0, interference=[], sigma2=1.0)
    assert outage_probability(lp, 1.0) == pytest.approx(1.0 - np.exp(-1.0), abs=1e-15)


def test_outage_with_interference():
    lp = LinkPowers(signal=1.0, interference=[0.5], sigma2=1.0)
    # 1 - e^{-1} / (1 + 0.5), cross-checked by Monte Carlo below
    assert outage_probability(lp, 1.0) == pytest.approx(0.7547470392190385, abs=1e-15)


def test_outage_zero_rate():
    lp = LinkPowers(signal=3.0, interference=[1.0, 2.0], sigma2=0.5)
    assert outage_probability(lp, 0.0) == 0.0


def test_outage_zero_signal():
    lp = LinkPowers(signal=0.0, interference=[], sigma2=1.0)
    assert outage_probability(lp, 0.5) == 1.0
    assert outage_probability(lp, 0.0) == 0.0


def test_outage_monotonicity():
    rng = np.random.default_rng(17)
    for _ in range(50):
        sig = rng.uniform(0.1, 10.0)
        interf = rng.uniform(0.0, 2.0, size=rng.integers(0, 4))
        s2 = rng.uniform(0.01, 2.0)
        R = rng.uniform(0.01, 4.0)
        base = outage_probability(LinkPowers(sig, interf, s2), R)
        assert outage_probability(LinkPowers(sig, interf, s2), R * 1.1) >= base
        assert outage_probability(LinkPowers(sig, interf, s2 * 1.1), R) >= base
        assert outage_probability(LinkPowers(sig * 1.1, interf, s2), R) <= base
        if len(interf):
            worse = interf.copy()
            worse[0] *= 1.5
            assert outage_probability(LinkPowers(sig, worse, s2), R) >= base


def test_epsilon_rate_analytic():
    lp = LinkPowers(signal=1.0, interference=[], sigma2=1.0)
    assert epsilon_rate(lp, 0.1) == pytest.approx(np.log2(1.0 - np.log(0.9)), abs=1e-8)


def test_epsilon_rate_rejects_degenerate_budget():
    lp = LinkPowers(signal=1.0, interference=[], sigma2=1.0)
    with pytest.raises(ValueError):
        epsilon_rate(lp, 1.0)
    with pytest.raises(ValueError):
        epsilon_rate(lp, 0.0)


def test_epsilon_rate_monotone_in_signal():
    lp1 = LinkPowers(signal=1.0, interference=[], sigma2=1.0)
    lp2 = LinkPowers(signal=2.0, interference=[], sigma2=1.0)
    assert epsilon_rate(lp2, 0.1) > epsilon_rate(lp1, 0.1)


def test_epsilon_rate_roundtrip():
    rng = np.random.default_rng(23)
    for eps in (0.01, 0.1, 0.5):
        for _ in range(10):
            lp = LinkPowers(signal=rng.uniform(0.5, 20.0),
                            interference=rng.uniform(0.0, 1.0, size=2),
                            sigma2=rng.uniform(0.05, 1.0))
            R = epsilon_rate(lp, eps)
            assert outage_probability(lp, R) == pytest.approx(eps, abs=1e-9)


def test_epsilon_rate_high_snr_no_underflow():
    lp = LinkPowers(signal=1.0, interference=[1e-6], sigma2=1e-8)
    R = epsilon_rate(lp, 0.1)
    assert np.isfinite(R) and R > 10.0
    assert outage_probability(lp, R) == pytest.approx(0.1, abs=1e-9)


def _single_link_scenario(sigma2=1.0):
    Q = np.array([[[[1.0 + 0j]]]])
    return Scenario(K=1, Nt=1, Q=Q, sigma2=[sigma2], P=[1.0],
                    eps=[0.1], alpha=[1.0], eta=0.0)


def test_mc_outage_zero_rate():
    s = _single_link_scenario()
    est, err = mc_outage(s, [np.array([1.0 + 0j])], [0.0], 0, 1000, np.random.default_rng(0))
    assert est == 0.0


def test_mc_outage_zero_beamformer():
    s = _single_link_scenario()
    est, _ = mc_outage(s, [np.zeros(1, dtype=complex)], [0.5], 0, 1000, np.random.default_rng(0))
    assert est == 1.0


def test_mc_outage_matches_closed_form_single_link():
    s = _single_link_scenario()
    lp = LinkPowers(signal=1.0, interference=[], sigma2=1.0)
    R = epsilon_rate(lp, 0.1)
    est, err = mc_outage(s, [np.array([1.0 + 0j])], [R], 0, 10 ** 5, np.random.default_rng(1))
    assert abs(est - 0.1) <= 3.0 * err


def test_mc_outage_matches_closed_form_with_interference():
    # the frozen 0.7547470392190385 value above, validated by simulation
    s = generate_scenario(K=2, Nt=1, eta=0.5, snr_db=0, eps=0.1, ranks=1, seed=3)
    w = [np.array([1.0 + 0j]), np.array([1.0 + 0j])]
    sig = float(np.real(w[0].conj() @ s.Q[0, 0] @ w[0]))
    interf = float(np.real(w[1].conj() @ s.Q[1, 0] @ w[1]))
    lp = LinkPowers(signal=sig, interference=[interf], sigma2=float(s.sigma2[0]))
    R = 1.0
    p = outage_probability(lp, R)
    est, err = mc_outage(s, w, [R, R], 0, 10 ** 5, np.random.default_rng(2))
    assert abs(est - p) <= 3.0 * err
