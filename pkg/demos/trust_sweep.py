"""A small Monte Carlo sweep over the trust degree, written to CSV.

Run with ``python3 demos/trust_sweep.py [out.csv]``. The same data comes
from ``trustcoop reproduce fig4 --trials 200``.
"""

# %%
import sys

from trustcoop import emit_csv, preset
from trustcoop.experiments import run_many

configs = preset("fig4", trials=200, seed=1)
result = run_many(configs)

# %%
# Paired draws: every curve sees the same channels, so the gaps between
# schemes are not blurred by sampling noise.
by_scheme = {}
for row in result.rows:
    by_scheme.setdefault(row.scheme, []).append(row.mean_rate_ru1)
print("alpha  " + "  ".join(f"{s:>15s}" for s in by_scheme))
for i, row in enumerate(result.rows[: len(configs[0].sweep.values)]):
    print(f"{row.alpha:5.1f}  " + "  ".join(f"{v[i]:15.4f}" for v in by_scheme.values()))

if len(sys.argv) > 1:
    emit_csv(result, sys.argv[1])
    print("wrote", sys.argv[1])
