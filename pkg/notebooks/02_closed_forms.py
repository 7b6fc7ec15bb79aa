# %% [markdown]
# # Closed-form density, MGF, SEP and capacity
#
# For identical relays the combined SNR density is a finite sum of
# gamma-like terms c * x**n * exp(-r x). The MGF, the M-PSK error rate and the
# ergodic capacity all follow term by term.

# %%
from scdf import avg_capacity, mgf, sc_mixture_for_config, sep_mpsk, symmetric_preset

cfg = symmetric_preset(K=3).at_snr_db(10.0)
mix = sc_mixture_for_config(cfg)
print(f"{len(mix)} terms, normalization {mix.normalization():.15f}, mean SNR {mix.mean():.4f}")
print(f"MGF at s = 1: {mgf(mix, 1.0):.6f}")
print(f"16-PSK SEP: {sep_mpsk(mix, 16):.4e}")
print(f"capacity (bit/s/Hz): {avg_capacity(mix, 1.0):.4f}")

# %% [markdown]
# More relays raise capacity at every SNR.

# %%
for K in (1, 2, 3, 4):
    caps = [avg_capacity(sc_mixture_for_config(symmetric_preset(K=K).at_snr_db(x))) for x in (0, 10, 20)]
    print(K, [round(c, 4) for c in caps])
