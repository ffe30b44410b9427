"""Single-antenna pairs: how much of Tu2's power goes to relaying.

Run with ``python3 demos/siso_power_split.py``.
"""

# %%
# One random draw at 40 dB. The closed-form split is compared against a
# brute-force scan over the split with step 1e-4.
import numpy as np

from trustcoop import ChannelConfig, SisoGains, SystemParams, sample, solve_siso
from trustcoop.oracles import siso_beta_oracle
from trustcoop.siso import breakpoints

cfg = ChannelConfig(n1=1, n2=1, rho1_dB=40.0, rho2_dB=40.0)
ch = sample(cfg, seed=0, trial_index=3)
params = SystemParams.from_config(cfg, alpha=0.5, Q=0.5)
gains = SisoGains.from_channels(ch, params)
print(f"Q_max = {gains.q_max:.3f} bit/s/Hz, relaying useful: {gains.useful}")

# %%
# The split lands on one of a few breakpoints, depending on which of them
# the QoS target crosses first.
bp = breakpoints(gains, params.Q)
print(f"QoS limits: with SIC {bp.beta_q1:.4f}, without {bp.beta_q2:.4f}; relay cap at {bp.beta0:.4f}")

strategy, report = solve_siso(gains, params)
beta_grid, rate_grid = siso_beta_oracle(gains, params.alpha, params.Q)
print(f"closed form: beta = {strategy.beta:.4f}, rate = {report.expected_ru1:.6f}, SIC = {report.sic_used}")
print(f"grid scan:   beta = {beta_grid:.4f}, rate = {rate_grid:.6f}")
# Past the relay cap the rate is flat in beta, so the scan may stop at a
# smaller split with the same rate. The closed form spends the spare power
# where it also keeps SIC at Ru2 possible.

# %%
# Sweeping the QoS target: a stricter target leaves less power to relay.
for Q in np.linspace(0.1, 0.9 * gains.q_max, 5):
    st, rep = solve_siso(gains, SystemParams.from_config(cfg, alpha=0.5, Q=float(Q)))
    print(f"Q = {Q:.2f}: beta = {st.beta:.3f}, rate at Ru1 = {rep.expected_ru1:.4f}, Ru2 = {rep.ru2:.3f}")
