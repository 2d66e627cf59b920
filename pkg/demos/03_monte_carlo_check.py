# %% [markdown]
# # Checking the densities against simulation
#
# Each density computed by quadrature is compared with a histogram of
# simulated trajectories.  A bin agrees when the two heights differ by at
# most four standard errors.

# %%
import numpy as np

from bhrvt import McConfig, preset
from bhrvt.mc import simulate_paths
from bhrvt.validate import compare_density, format_report, run_validation

d = preset("example1")
mc = McConfig(n_samples=10**6, seed=2024)

# %% [markdown]
# One density by hand: X_5 under uniform inputs.

# %%
x5 = simulate_paths(d, 5, mc, periods=[5]).at(5)
frac, zmax, hist = compare_density(x5, 5, d)
print(f"{100 * frac:.0f}% of {hist.heights.size} bins agree, largest z-score {zmax:.2f}")

# %% [markdown]
# The full report covers n = 1, 5, 20 and the steady state, densities and
# moments, for both built-in input distributions.

# %%
for name in ("example1", "example2"):
    print(format_report(run_validation(preset(name), mc=mc), name))
    print()
