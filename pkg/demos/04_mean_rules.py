"""The three mean rules and the feature selection they induce.

Blending pulls group means toward the pooled mean; soft thresholding
shrinks small coordinates to zero; hard thresholding zeroes them outright.
Coordinates zeroed in every group drop out of the classifier.
"""

import numpy as np

from rlda import (
    MeanRegularizer,
    SimulationConfig,
    group_means,
    regularize_means,
    simulate,
    sparse_shift,
)

# Two groups, 30 variables, only the first 3 truly differ.
cfg = SimulationConfig(n=25, m=25, p=30, sigma=1.0, c=0.2, shift=sparse_shift(30, 3, 2.5), seed=5)
means = group_means(simulate(cfg))

print("raw group-2 mean, first 6 coordinates:", np.round(means.per_group[1, :6], 2))

blend = regularize_means(means, MeanRegularizer("l2", 0.5))
print("blend (delta=0.5)                    :", np.round(blend.per_group[1, :6], 2))

soft = regularize_means(means, MeanRegularizer("l1", 0.5))
print("soft threshold (delta=0.5)           :", np.round(soft.per_group[1, :6], 2))

hard = regularize_means(means, MeanRegularizer("hard", 0.5))
print("hard threshold (delta=0.5)           :", np.round(hard.per_group[1, :6], 2))
print()

print("active variables as the threshold grows (30 total, 3 informative):")
print(f"{'delta':>8}{'soft':>8}{'hard':>8}")
for delta in (0.0, 0.2, 0.4, 0.8, 1.6):
    n_soft = regularize_means(means, MeanRegularizer("l1", delta)).n_active
    n_hard = regularize_means(means, MeanRegularizer("hard", delta)).n_active
    print(f"{delta:>8.1f}{n_soft:>8d}{n_hard:>8d}")
print("-> the sparsity path walks down to the informative coordinates")
