import numpy as np
import pytest

from trustcoop.channel import ChannelConfig, sample
from trustcoop.errors import InvalidInputError
from trustcoop.oracles import simo_rate_oracle, simo_ratio_oracle
from trustcoop.rates import SystemParams
from trustcoop.simo import (
    KIND_ORDER, SubproblemKind, bcu_runs, initial_state, mrt_baseline_beamformers, pick_best, run_bcu,
    scan_candidates, simo_candidates, solve_simo,
)

CFG = ChannelConfig(n1=1, n2=2, rho1_dB=50.0, rho2_dB=50.0)


def instance(trial, seed=41, alpha=0.6, qcap=1.0):
    ch = sample(CFG, seed, trial)
    Q = min(qcap, 0.9 * ch.q_max(CFG.P2))
    return ch, SystemParams(alpha, Q, CFG.P1, CFG.P2)


def ru2_sinr(ch, w21, w22, sic):
    s = abs(np.vdot(ch.h2, w22)) ** 2
    return s if sic else s / (abs(np.vdot(ch.h2, w21)) ** 2 + 1.0)


@pytest.mark.parametrize("sic", [True, False])
def test_initial_state_is_feasible(sic):
    for t in range(20):
        ch, p = instance(t)
        st = initial_state(ch, p, sic)
        assert np.vdot(st.w21, st.w21).real + np.vdot(st.w22, st.w22).real <= p.P2 * (1 + 1e-12)
        assert ru2_sinr(ch, st.w21, st.w22, sic) >= p.qos_snr * (1 - 1e-9)


@pytest.mark.parametrize("sic", [True, False])
def test_bcu_keeps_qos_and_power_and_climbs(sic):
    for t in range(20):
        ch, p = instance(t, seed=42)
        st, conv = run_bcu(ch, p, sic)
        assert conv
        assert np.all(np.diff(st.history) >= 0)
        assert np.vdot(st.w21, st.w21).real + np.vdot(st.w22, st.w22).real <= p.P2 * (1 + 1e-9)
        assert ru2_sinr(ch, st.w21, st.w22, sic) >= p.qos_snr * (1 - 1e-9)


@pytest.mark.parametrize("sic", [True, False])
def test_bcu_matches_direction_grid(sic):
    for t in range(6):
        ch, p = instance(t, seed=43)
        st, _ = run_bcu(ch, p, sic)
        best = simo_ratio_oracle(ch, p, sic, n_theta=24, n_phi=24, polish=2)
        assert st.s >= best * (1 - 1e-4)


def test_solver_not_beaten_by_helper_grid():
    for t in range(5):
        ch, p = instance(t, seed=44)
        _, rep = solve_simo(ch, p)
        best = simo_rate_oracle(ch, p, n_theta=12, n_phi=12, n_scale=15)
        assert rep.expected_ru1 >= best - 1e-4


def test_subproblem_kinds():
    assert [k.label for k in KIND_ORDER] == ["sic-ratio", "sic-relay_cap", "nsic-ratio", "nsic-relay_cap"]
    assert SubproblemKind.SIC_CAP.sic and not SubproblemKind.NSIC_RATIO.sic


def test_pick_best_returns_fallback_at_alpha_zero():
    ch, p = instance(0, alpha=0.0)
    runs = bcu_runs(ch, p)
    cands = simo_candidates(ch, p, runs, np.array([np.sqrt(p.P1)], complex))
    assert cands[0].kind is None
    assert pick_best(cands, 0.0).kind is None


def test_array_scan_matches_candidates():
    for t in range(15):
        ch, p = instance(t, seed=45)
        runs = bcu_runs(ch, p)
        w1 = np.array([np.sqrt(p.P1)], complex)
        rates, valid = scan_candidates(ch, p, runs, w1[None, :])
        cands = simo_candidates(ch, p, runs, w1)
        assert np.allclose(rates[0], [c.report.expected_ru1 for c in cands], rtol=1e-12, atol=1e-12)
        assert list(valid[0]) == [c.valid for c in cands]


def test_scheme_ordering():
    for t in range(15):
        ch, p = instance(t, seed=46)
        r = {s: solve_simo(ch, p, s)[1] for s in ("proposed", "no_sic", "mrt_baseline", "no_cooperation")}
        for rep in r.values():
            assert rep.ru2 >= p.Q - 1e-9
        assert r["proposed"].expected_ru1 >= r["no_sic"].expected_ru1 - 1e-12
        assert r["proposed"].expected_ru1 >= r["no_cooperation"].expected_ru1 - 1e-12
        assert r["mrt_baseline"].expected_ru1 >= r["no_cooperation"].expected_ru1 - 1e-12


def test_mrt_baseline_meets_qos_with_equality():
    ch, p = instance(3)
    w21, w22 = mrt_baseline_beamformers(ch, p)
    assert ru2_sinr(ch, w21, w22, False) == pytest.approx(p.qos_snr, rel=1e-9)
    assert np.vdot(w21, w21).real + np.vdot(w22, w22).real == pytest.approx(p.P2)


def test_rejects_multi_antenna_tu1():
    ch = sample(ChannelConfig(n1=2, n2=2), 0, 0)
    with pytest.raises(InvalidInputError):
        solve_simo(ch, SystemParams(0.5, 0.1, 1e4, 1e4))


def test_bcu_argument_checks():
    ch, p = instance(0)
    with pytest.raises(InvalidInputError):
        run_bcu(ch, p, True, eps=0.0)
    with pytest.raises(InvalidInputError):
        run_bcu(ch, p, True, max_iter=0)
