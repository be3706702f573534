"""
Factorization quality across sampling variants
==============================================

Shows the three properties that make the sampled factorization work, and
how split/merge parameters trade time for preconditioner quality:

1. every clique sample is a spanning tree of the eliminated vertex's
   neighbors (connectivity is never lost);
2. the factorization is unbiased: E[L L^T] equals the input;
3. heavier sampling (ac -> ac2 -> ac-s3m3) lowers the relative condition
   number, dramatically so on the adversarial star family.
"""

import numpy as np

import treechol as tc
from treechol import bench

# -- 1. tree structure -------------------------------------------------------

g = tc.MultiGraph.from_sparse(tc.sachdeva_star(tc.StarSpec(8, 2)))
v = 1  # a clique vertex
edges = tc.clique_tree_sample(v, g, tc.SampleStream(seed=0))
print(f"eliminating a degree-{g.degree(v)} vertex sampled "
      f"{len(edges)} edges (always degree-1, a spanning tree)")

# -- 2. unbiasedness ---------------------------------------------------------

iu, ju = np.triu_indices(5, 1)
k5 = tc.laplacian_from_edges(5, iu, ju, np.ones(10))
mean, se = tc.monte_carlo_llt(k5, tc.SamplerConfig(1, 1), 50_000)
dev = np.abs(mean - k5.to_dense()) / np.maximum(se, 1e-30)
print(f"K5, 5e4 seeds: max |E[LL^T] - L| = "
      f"{np.abs(mean - k5.to_dense()).max():.4f} "
      f"({dev.max():.1f} standard errors)")

# -- 3. conditioning vs variant ----------------------------------------------

# The star-of-cliques family is built to break single-tree sampling: the
# hub is eliminated early with a huge degree, and one sampled tree cannot
# capture its clique.  Pre-splitting edges fixes it.
star = tc.sachdeva_star(tc.StarSpec(60))
rows = bench.variant_study([("star k=60", star)],
                           ["ac", "ac-s1", "ac-s2", "ac-s2m2", "ac-s3m3"],
                           seed=1, cond_iters=150)
print(f"\n{'variant':9s} {'iters':>6s} {'size ratio':>11s} {'condition':>10s}")
for r in rows:
    print(f"{r['variant']:9s} {r['n_iter']:6d} {r['size_ratio']:11.2f} "
          f"{r['condition']:10.1f}")
print("(pre-splitting is what rescues the conditioning here; capping the "
      "multiplicity at 2 keeps essentially all of ac-s2's quality)")
