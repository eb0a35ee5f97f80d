"""
Removing corrupted columns
==========================

Column sparse robust PCA splits the data into a low-rank part and a part
that is nonzero only on corrupted samples. LRR can denoise too, with the
corrected data taken as ``X @ Z``.
"""

import numpy as np

from subseg import AlmConfig, denoise, solve_csrpca

rng = np.random.default_rng(1)
m, n, rank = 60, 50, 3
basis = rng.standard_normal((m, rank))
D0 = basis @ rng.standard_normal((rank, n)) / np.sqrt(rank)

# corrupt five columns with noise orthogonal to the clean column space
bad = np.sort(rng.choice(n, 5, replace=False))
Q, _ = np.linalg.qr(basis)
noise = rng.standard_normal((m, bad.size))
noise -= Q @ (Q.T @ noise)
X = D0.copy()
X[:, bad] = 1.5 * noise / np.linalg.norm(noise, axis=0) * np.linalg.norm(D0, axis=0).mean()
D0[:, bad] = 0.0

res = solve_csrpca(X, AlmConfig(lam=0.6))
print("converged in", res.iterations, "iterations, residual %.1e" % res.residual)
print("corrupted columns:", bad)
print("columns flagged  :", np.flatnonzero(np.any(res.E != 0, axis=0)))
print("relative error of the low-rank part: %.1e" % (np.linalg.norm(res.D - D0) / np.linalg.norm(D0)))
for rec in res.history[::4]:
    print("  iter %3d  residual %.2e  mu %.3g  rank %d  noisy columns %d"
          % (rec.iteration, rec.residual, rec.mu, rec.rank, rec.nonzero_columns))

# LRR needs a much smaller lam here: above about 0.3 every column simply
# represents itself and nothing is flagged
D_lrr, E_lrr = denoise(X, AlmConfig(lam=0.1), method="lrr")
top = np.sort(np.argsort(np.linalg.norm(E_lrr, axis=0))[-5:])
print("LRR: five largest noise columns:", top)
