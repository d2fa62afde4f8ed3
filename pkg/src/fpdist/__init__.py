"""Exact distributions of the friendship-paradox difference on random graphs.

Library layout:

* graph: edge lists, per-node paradox statistics, empirical summaries
* degree: degree distributions, edge-end laws, moment fitting
* poisson: closed forms for the sparse Poisson random graph
* transform: two-sided Laplace transforms of Delta for the model families
* density: kernel-smoothed densities and tail probabilities by inversion
* maxent: degree-correlated maximum-entropy ensembles at fixed assortativity
* gfp: generalized (attribute) paradox differences
* samplers: seeded Monte Carlo graph generators
* cli: `fpdist` command line front end
"""

__version__ = "0.1.0"

from .degree import (DegreeDistribution, EdgeEndDistribution, JointDegree,
                     degree_histogram, edge_end, fit_mean_var, make_poisson,
                     make_power_law_cutoff, moments)
from .density import (DensityGrid, GridSpec, Kernel, delta_sign_masses,
                      invert_with_kernel, prob_delta_positive, smooth_atoms)
from .errors import (ConsistencyError, ConvergenceError, FpdistError,
                     ParameterError, ParseError, UnachievableTargetError)
from .gfp import AttributeModel, gfp_delta_transform, sample_attributes
from .graph import (Graph, NodeStats, ParadoxSummary, assortativity,
                    empirical_joint, from_edges, load_edge_list, node_stats,
                    paradox_summary, remove_isolates)
from .maxent import MaxEntModel, gamma_for_r, joint_from_gamma, solve_partition
from .poisson import (DeltaAtomDistribution, mean_inverse_degree,
                      poisson_delta_moments, poisson_delta_negative_fraction,
                      poisson_delta_pmf, poisson_delta_sign_masses,
                      poisson_delta_transform)
from .samplers import (sample_configuration, sample_degree_correlated,
                       sample_poisson_rg)
from .transform import (TransformFn, config_delta_transform,
                        correlated_delta_transform, mean_var_from_transform)

__all__ = [name for name in dir() if not name.startswith("_")]
