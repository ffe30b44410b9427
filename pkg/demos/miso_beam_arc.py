"""Two antennas at Tu1: trading the direct beam against the relay link.

Run with ``python3 demos/miso_beam_arc.py``.
"""

# %%
import numpy as np

from trustcoop import ChannelConfig, SystemParams, sample, solve_miso
from trustcoop.miso import MisoDerived, approx_rate, choose_eta

cfg = ChannelConfig(n1=2, n2=1, rho1_dB=50.0, rho2_dB=50.0)
ch = sample(cfg, seed=0, trial_index=2)
params = SystemParams.from_config(cfg, alpha=0.6, Q=1.0)
d = MisoDerived.from_channels(ch, params)

# %%
# The beam moves along an arc from MRT toward Ru1 (smallest eta) to the
# direction of the Tu1 -> Tu2 channel (eta = 1). Higher trust pulls it
# toward the relay. Shown for a fixed relay share of 0.95.
for alpha in (0.0, 0.3, 0.6, 1.0):
    c = choose_eta(d, alpha, beta=0.95)
    print(f"alpha = {alpha:.1f}: eta = {c.eta:.4f} ({c.branch}), proxy rate {float(approx_rate(d, alpha, 0.95, c.eta)):.4f}")

# %%
# Full solve against the MRT baseline and no cooperation.
for scheme in ("proposed", "mrt_baseline", "no_cooperation"):
    st, rep = solve_miso(ch, params, scheme)
    print(f"{scheme:15s} beta = {st.beta:.3f}  eta = {st.eta:.3f}  rate = {rep.expected_ru1:.4f}  Ru2 = {rep.ru2:.3f}")
print("beamformer power:", np.vdot(st.w1, st.w1).real, "of", params.P1)
