import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import brentq

from trustcoop.channel import ChannelConfig, sample
from trustcoop.miso import MisoDerived, approx_rate, regime_beta, crossing_eta, choose_eta, boost_gain, solve_miso
from trustcoop.oracles import miso_eta_oracle
from trustcoop.rates import SystemParams

CFG = ChannelConfig(n1=2, n2=1, rho1_dB=50.0, rho2_dB=50.0)


def derived(trial, seed=31):
    ch = sample(CFG, seed, trial)
    return ch, MisoDerived.from_channels(ch, SystemParams(0.5, 0.0, CFG.P1, CFG.P2))


@settings(max_examples=200, deadline=None)
@given(trial=st.integers(0, 10_000), mfrac=st.floats(0.0, 1.0))
def test_crossing_point_solves_its_equation(trial, mfrac):
    _, d = derived(trial)
    # f(eta) - g(eta) - m changes sign on the arc only for m below f(1) - g(1)
    top = d.g0t - d.v1
    if top <= 0:
        return
    m = mfrac * top
    f = lambda e: e * d.g0t - (np.sqrt(e * d.v1) + np.sqrt(max(1 - e, 0) * d.v2)) ** 2 - m  # noqa: E731
    lo = d.mrt_eta
    if f(lo) >= 0:
        assert float(crossing_eta(d, m)) == pytest.approx(lo)
        return
    root = brentq(f, lo, 1.0, xtol=1e-15, rtol=1e-15)
    assert float(crossing_eta(d, m)) == pytest.approx(root, abs=1e-9)


@settings(max_examples=150, deadline=None)
@given(trial=st.integers(0, 10_000), alpha=st.floats(0.0, 1.0), beta=st.floats(0.0, 1.0))
def test_chosen_beam_not_beaten_by_eta_grid(trial, alpha, beta):
    _, d = derived(trial)
    choice = choose_eta(d, alpha, beta)
    assert d.mrt_eta - 1e-12 <= choice.eta <= 1.0
    _, best = miso_eta_oracle(d, alpha, beta, step=1e-4)
    assert float(approx_rate(d, alpha, beta, choice.eta)) >= best - 1e-9
    assert np.linalg.norm(choice.w1) == pytest.approx(1.0)


def test_relay_boost_has_a_pole():
    _, d = derived(0)
    pole = d.phi1 / d.rho1
    assert boost_gain(d, 0.0) == 0.0
    if pole <= 1:
        assert boost_gain(d, pole) == np.inf


@pytest.mark.parametrize("trial", range(40))
def test_proposed_beats_baselines_and_meets_qos(trial):
    ch, _ = derived(trial, seed=32)
    Q = min(1.0, 0.9 * ch.q_max(CFG.P2))
    p = SystemParams(0.6, Q, CFG.P1, CFG.P2)
    out = {s: solve_miso(ch, p, s) for s in ("proposed", "no_sic", "mrt_baseline", "no_cooperation")}
    for st_, rep in out.values():
        assert rep.ru2 >= Q - 1e-9
        assert np.vdot(st_.w1, st_.w1).real == pytest.approx(CFG.P1)
    r = {k: v[1].expected_ru1 for k, v in out.items()}
    assert r["proposed"] >= r["mrt_baseline"] - 1e-12
    assert r["proposed"] >= r["no_sic"] - 1e-12
    # no ordering against no_cooperation: once Tu2 relays, the Tu1 -> Tu2
    # link caps the helped rate and can sit below the direct MRT rate


def test_alpha_zero_is_no_cooperation():
    for t in range(20):
        ch, _ = derived(t, seed=33)
        p = SystemParams(0.0, 0.5, CFG.P1, CFG.P2)
        a = solve_miso(ch, p)[1].expected_ru1
        b = solve_miso(ch, p, "no_cooperation")[1].expected_ru1
        assert a == pytest.approx(b, abs=1e-12)


def test_regime_shortcut_needs_equal_snrs():
    ch = sample(ChannelConfig(n1=2, n2=1, rho1_dB=40.0, rho2_dB=30.0), 0, 0)
    cfg = ChannelConfig(n1=2, n2=1, rho1_dB=40.0, rho2_dB=30.0)
    d = MisoDerived.from_channels(ch, SystemParams(0.5, 0.1, cfg.P1, cfg.P2))
    assert regime_beta(d, 0.5, 0.1) is None


def test_strong_relay_shortcut_matches_search():
    # H0 much stronger than h1: the MRT beam and a QoS-limited split are optimal
    cfg = ChannelConfig(n1=2, n2=1, var_H0=-10.0, rho1_dB=40.0, rho2_dB=40.0)
    hits = 0
    for t in range(40):
        ch = sample(cfg, 34, t)
        p = SystemParams(0.5, min(0.5, ch.q_max(cfg.P2)), cfg.P1, cfg.P2)
        d = MisoDerived.from_channels(ch, p)
        cb = regime_beta(d, 0.5, p.Q)
        if cb is None or d.g0t < d.g1t * (d.g1t + d.g21) / d.v1:
            continue
        hits += 1
        st_, rep = solve_miso(ch, p)
        assert st_.beta >= cb[0] - 1e-3
    assert hits > 0
