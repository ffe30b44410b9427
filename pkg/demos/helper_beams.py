"""Two antennas at Tu2: shaping the relayed stream around Ru2.

Run with ``python3 demos/helper_beams.py``.
"""

# %%
# Block updates alternate between the relay beam and Ru2's own beam. The
# relay-to-leakage ratio never drops from one sweep to the next.
import numpy as np

from trustcoop import ChannelConfig, SystemParams, run_bcu, sample, solve_mimo, solve_simo
from trustcoop.oracles import simo_ratio_oracle

cfg = ChannelConfig(n1=1, n2=2, rho1_dB=50.0, rho2_dB=50.0)
ch = sample(cfg, seed=0, trial_index=5)
params = SystemParams.from_config(cfg, alpha=0.7, Q=1.0)

for sic in (True, False):
    state, converged = run_bcu(ch, params, sic)
    grid = simo_ratio_oracle(ch, params, sic)
    print(f"SIC={sic!s:5}: s = {state.s:.6g} after {state.iteration} sweeps (grid search {grid:.6g})")
    print("   history:", np.round(state.history[:6], 3))

# %%
st, rep = solve_simo(ch, params)
print(f"picked {st.subproblem}: rate {rep.expected_ru1:.4f}, Ru2 {rep.ru2:.3f}, relay share {st.beta:.3f}")

# %%
# With two antennas at Tu1 as well, Tu1's beam is chosen on a grid
# between MRT and the strongest Tu1 -> Tu2 eigenbeam.
cfg2 = ChannelConfig(n1=2, n2=2, rho1_dB=50.0, rho2_dB=50.0)
ch2 = sample(cfg2, seed=0, trial_index=5)
p2 = SystemParams.from_config(cfg2, alpha=0.7, Q=1.0)
for scheme in ("proposed", "mrt_baseline", "no_cooperation"):
    st, rep = solve_mimo(ch2, p2, scheme=scheme)
    print(f"{scheme:15s} lambda = {st.lam:.2f}  rate = {rep.expected_ru1:.4f}")
