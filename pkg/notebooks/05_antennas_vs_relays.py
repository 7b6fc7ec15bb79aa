# %% [markdown]
# # Fewer relays with two antennas or more relays with one?
#
# The total power is shared equally by source and relay at every point.

# %%
from scdf.experiments import run_antenna_comparison

res = run_antenna_comparison(p_tot=2.0, snr_grid_db=range(0, 21, 2))
for r in res.rows:
    print(f"{r['snr_db']:>3} dB  (4,2) {r['K4_ant2']:.3e}  (5,1) {r['K5_ant1']:.3e}")
print("(4, 2) ahead on:", res.beats_ranges)
