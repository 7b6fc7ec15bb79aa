# %% [markdown]
# # Branch and selection-combined SNR statistics
#
# Each relay branch delivers min(max(g1, g2), g3): the better of two
# source-to-relay antennas, capped by the relay-to-destination hop. The
# destination picks the strongest branch.

# %%
import numpy as np

from scdf import branch_cdf, branch_distribution, branch_pdf, outage_probability, symmetric_preset

cfg = symmetric_preset(K=3, m=2, omega=3.0)
dist = branch_distribution(cfg, 0)
g = np.linspace(0, 10, 6)
print("branch CDF:", np.round(branch_cdf(dist, g), 4))
print("branch PDF:", np.round(branch_pdf(dist, g), 4))

# %% [markdown]
# Outage is the probability that every branch falls below the threshold.

# %%
for snr_db in (0, 5, 10, 15, 20):
    print(f"{snr_db:>3} dB  outage = {outage_probability(cfg.at_snr_db(snr_db)):.3e}")
