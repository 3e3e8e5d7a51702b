# %% [markdown]
# # A randomized network with reproducible hidden weights
#
# Hidden weights come from a fixed linear congruential sequence, so the same
# `(Q, p)` always gives the same layer. Only the output weights are learned,
# by a ridge-regularized least-squares solve.

# %%
import numpy as np

from cnrnn.rnn import hidden_weights, lcg_sequence, output_weights, project, zscore_rows

print("LCG E=2 :", lcg_sequence(2))
print("LCG E=20:", lcg_sequence(20)[:6])

# %%
W = hidden_weights(4, 4)
print(W.weights.round(3))
print("mean", W.weights.mean(), "std", W.weights.std())

# %% [markdown]
# Train on a toy problem: four features per sample, intensity-like targets.

# %%
rng = np.random.default_rng(0)
X = rng.normal(size=(4, 300))
D = 128 + 40 * np.tanh(X[0] - X[2]) + rng.normal(0, 2, 300)
Z = project(W, zscore_rows(X))
for lam in (1e-6, 1e-3, 1.0):
    f = output_weights(Z, D, lam)
    rms = np.sqrt(np.mean((f @ Z - D) ** 2))
    print(f"lambda={lam:g}: |f|={np.linalg.norm(f):9.2f}  fit rms={rms:.3f}")
