# %% [markdown]
# # Checking the closed forms by simulation
#
# Estimates are reproducible from (seed, n_samples) alone, whatever the
# thread count. Heterogeneous relays, where only the outage has a closed
# form, can still be simulated for SEP and capacity.

# %%
from scdf import asymmetric_preset, outage_probability, simulate_outage, simulate_sep, symmetric_preset
from scdf.analytic import sc_mixture_for_config, sep_mpsk

cfg = symmetric_preset().at_snr_db(6.0)
est = simulate_outage(cfg, 10**6, seed=1)
print(f"outage: analytic {outage_probability(cfg):.5f}, simulated {est.mean:.5f} +- {est.std_error:.5f}")

rb = simulate_sep(cfg, 10**5, seed=2)
sym = simulate_sep(cfg, 10**5, seed=2, mode="symbol")
print(f"SEP: analytic {sep_mpsk(sc_mixture_for_config(cfg), 16):.5f}")
print(f"     conditional-mean estimator {rb.mean:.5f} +- {rb.std_error:.5f}")
print(f"     hard-decision estimator    {sym.mean:.5f} +- {sym.std_error:.5f}")

# %%
het = asymmetric_preset().at_snr_db(6.0)
print("asymmetric SEP (simulation only):", simulate_sep(het, 10**5, seed=3, workers=2).mean)
