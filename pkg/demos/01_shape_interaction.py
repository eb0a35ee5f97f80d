"""
Shape interaction matrix and the noiseless LRR solution
=======================================================

Clean samples from independent subspaces give a block diagonal shape
interaction matrix, one block per subspace, and the block ranks equal the
subspace dimensions. Solving noiseless LRR iteratively lands on the same
matrix, with nuclear norm equal to the rank of the data.
"""

import numpy as np

from subseg import AlmConfig, SyntheticSpec, generate, sim, solve_lrr_noiseless
from subseg.linalg import nuclear_norm, numerical_rank
from subseg.pipeline import block_structure

# three subspaces of dimension 4 in R^40, 10 points each, no noise
spec = SyntheticSpec(k=3, subspace_dim=4, ambient_dim=40, points_per_subspace=10,
                     noise_variance_factor=0.0, seed=0)
X, gt = generate(spec)
print("data", X.shape, "rank", numerical_rank(X))

S = sim(X)
blocks = block_structure(S, gt.labels)
print("largest entry linking different subspaces: %.2e" % blocks.max_off_block)
print("rank of each diagonal block:", blocks.block_ranks)

res = solve_lrr_noiseless(X, AlmConfig(eps=1e-8))
print("ALM iterations:", res.iterations)
print("||Z - SIM(X)||_F / ||SIM(X)||_F = %.2e" % (np.linalg.norm(res.Z - S) / np.linalg.norm(S)))
print("||Z||_* = %.8f" % nuclear_norm(res.Z))

# crude text rendering of |SIM(X)|
for row in np.abs(S)[::3, ::3]:
    print("".join("#" if v > 0.05 else ("+" if v > 1e-8 else ".") for v in row))
