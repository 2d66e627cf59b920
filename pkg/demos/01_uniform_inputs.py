# %% [markdown]
# # Uniform inputs: from the initial condition to the steady state
#
# C, A and B are independent with C ~ U[0, 1], A ~ U[1.1, 2], B ~ U[0.1, 1].
# We follow the density of X_n as n grows and watch it settle onto the
# density of the steady state (A - 1)/B.

# %%
import numpy as np

from bhrvt import preset, rvt, stats

d = preset("example1")
x = np.linspace(0.0, 4.0, 9)

# %% [markdown]
# At n = 0 the density is just that of C: flat on [0, 1].

# %%
f0, _ = rvt.pdf1_values(x, 0, d)
print("n=0 :", np.round(f0, 4))

# %% [markdown]
# A few periods later the mass has moved right and spread out.

# %%
for n in (1, 3, 10, 20):
    f, _ = rvt.pdf1_values(x, n, d)
    print(f"n={n:<2}:", np.round(f, 4))
fs, _ = rvt.pdf_steady_values(x, d)
print("inf :", np.round(fs, 4))

# %% [markdown]
# The steady-state density has a closed form here, piecewise in x with a
# kink at x = 1.  The quadrature reproduces it to rounding.

# %%
for xi in (0.5, 1.0, 2.0, 8.0):
    exact = (1 - 0.01 / xi**2) / 1.62 if xi <= 1 else (1 / xi**2 - 0.01) / 1.62
    print(f"x={xi:<4} quadrature {rvt.pdf_steady_at(xi, d):.12f}  closed form {exact:.12f}")

# %% [markdown]
# How fast does X_n approach X_inf?  The L1 distance between the two
# densities shrinks steadily.

# %%
for n in (1, 2, 3, 5, 10, 20):
    print(f"n={n:<2} L1 = {rvt.l1_to_steady(n, d).value:.4f}")

# %% [markdown]
# Means and standard deviations approach their steady values too.  Slow
# paths (a close to 1.1) take tens of periods to settle.

# %%
series = stats.moment_series(50, d, periods=[0, 5, 10, 20, 50])
for n, m, s in series.entries:
    print(f"n={n:<2} mean {m:.5f}  std {s:.5f}")
print(f"inf  mean {series.steady_mean:.5f}  std {series.steady_std:.5f}")
print("E[A-1] E[1/B] =", 0.55 * np.log(10) / 0.9)
