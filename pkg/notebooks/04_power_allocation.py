# %% [markdown]
# # Splitting a power budget between source and relays
#
# Equal and adaptive splits are fixed rules. The numeric split minimizes the
# exact outage. For Rayleigh links a KKT stationary point of a small-threshold
# surrogate gives a closed-form split.

# %%
from scdf import asymmetric_preset
from scdf.experiments import run_power_comparison

cfg = asymmetric_preset(rayleigh=True)
res = run_power_comparison(cfg, [10.0, 15.0, 20.0, 25.0, 30.0])
for r in res.rows:
    print(f"{r['p_tot_db']:>4} dB  equal {r['equal']:.2e}  adaptive {r['adaptive']:.2e}  "
          f"numeric {r['numeric']:.2e}  cubic {r['cubic']:.2e}  P_s/P_tot {r['ps_numeric'] / r['p_tot']:.3f}")
print(f"largest saving of numeric over equal: {res.max_saving_db:.2f} dB")

# %% [markdown]
# The cubic itself, solved by Cardano's formulas:

# %%
from scdf.power import solve_cubic

sol = solve_cubic((-6.0, 11.0, -6.0))
print("discriminant", sol.D, "roots", sorted(sol.roots))
