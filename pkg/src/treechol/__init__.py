"""treechol: SDDM and graph-Laplacian solver via tree-sampled approximate
Cholesky preconditioning, with benchmark generators and a measurement
harness."""

from .factorization import (LowerTriFactorization, RowOpFactorization,
                            SamplerConfig, VARIANTS, apply_precond_inverse,
                            approximate_cholesky,
                            approximate_edgewise_cholesky, exact_cholesky,
                            load_factorization, monte_carlo_llt,
                            parse_variant, reference_factorize,
                            save_factorization, to_row_ops)
from .mmio import (MatrixMarketFormatError, read_matrix_market,
                   write_matrix_market)
from .multigraph import IsolatedVertexError, MultiGraph, laplacian_of
from .ordering import MinDegreeQueue, elimination_order
from .pcg import (BreakdownIndefinite, PcgConfig, SolveReport, SolveStatus,
                  pcg_solve, relative_residual, residual_band)
from .reduction import GrembanLift, lift, lift_rhs, project_onto_image, recover
from .rng import SampleStream, counter_u01, random_permutation
from .sampling import (EliminationStar, clique_tree_sample,
                       clique_tree_sample_multiedge_merge, elimination_stars,
                       exact_clique, star_order)
from .generators import (AnisotropicStretch, AnisotropicWeight, Checkerboard,
                         ChimeraSpec, GridSpec, StarSpec, Uniform, chimera,
                         gaussian_rhs, poisson_grid, sachdeva_star)
from .solve import build_preconditioner, solve, solve_factored
from .sparsesym import (DEFAULT_CLASS_EPS, MatrixClass, MatrixKind,
                        NotLaplacianError, NotSDDMError, SparseSym, classify,
                        connected_components, laplacian_from_edges)

__version__ = "0.1.0"
