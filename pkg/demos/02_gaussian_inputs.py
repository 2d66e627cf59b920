# %% [markdown]
# # Correlated Gaussian inputs
#
# (C, A, B) is a trivariate Gaussian truncated to [0,1] x [1.1,2] x [0,1].
# The inputs are concentrated, so the solution is too, and the covariance
# between periods is small and smooth.

# %%
import numpy as np

from bhrvt import preset, rvt, stats

d = preset("example2")
print("mean", d.mu, "box mass before truncation", round(d.z, 12))

# %% [markdown]
# The density of X_n for a few periods, on a grid chosen from a quick
# Monte Carlo run.

# %%
for n in (1, 4, 16):
    curve = rvt.pdf1_curve(n, d)
    peak = curve.x[np.argmax(curve.f)]
    print(f"n={n:<2} grid [{curve.x[0]:.3f}, {curve.x[-1]:.3f}]  peak at {peak:.3f}  "
          f"trapezoid mass {curve.mass:.5f}")

# %% [markdown]
# Joint density of (X_1, X_2): it lives near the curve traced by the
# recurrence, x2 = a x1 / (1 + b x1), smeared by the spread of A and B.

# %%
surf = rvt.pdf2_surface(1, 2, d, num=60)
i, j = np.unravel_index(np.argmax(surf.values), surf.values.shape)
print(f"mode near x1={surf.x1[i]:.3f}, x2={surf.x2[j]:.3f}; trapezoid mass {surf.mass:.4f}")
print("mass by quadrature:", rvt.pdf2_mass(1, 2, d).value)

# %% [markdown]
# Covariance over the first few periods.  The diagonal holds variances;
# off-diagonal entries never exceed the Cauchy-Schwarz bound.

# %%
cs = stats.covariance_surface(range(0, 9, 2), d)
np.set_printoptions(precision=6, suppress=True)
print(cs.cov)
print("max |C| / (sd sd):", np.max(np.abs(cs.cov) / np.outer(cs.std, cs.std)))
