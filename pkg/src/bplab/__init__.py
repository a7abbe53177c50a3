"""bplab: a simulation and exact-numerics laboratory for Galton-Watson
branching processes, their size-biased (spine) companions, and the classical
L log L limit theorems they obey."""

__version__ = "0.1.0"

from .offspring import (Family, OffspringDistribution, SizeBiasedDistribution,
                        make_finite, make_geometric, make_truncated_poisson,
                        make_heavy_tail, moments, sample, size_biased,
                        law_from_dict, law_to_dict)
from .pgf import (TruncatedLaw, SurvivalSequence, pgf_eval, extinction_prob,
                  survival_seq, zn_law, zn_law_sequence, zn_law_captured,
                  conditioned_law, size_bias_law, tv_distance,
                  stochastically_dominates, law_mean, law_to_csv)
from .simulate import (PopulationPath, TreeRealization, SpineRealization,
                       ImmigrationPath, simulate_path, simulate_paths,
                       simulate_tree, gw_probability, enumerate_trees,
                       simulate_spine, simulate_spines, spine_as_immigration,
                       simulate_immigration, simulate_immigrations,
                       sample_conditioned, sample_conditioned_batch,
                       heavy_immigration_sampler, simulate_bpre,
                       simulate_bpre_batch)
from .stats import (EmpiricalSample, GofReport, ks_statistic, ks_two_sample,
                    exponential_cdf, gamma2_cdf, size_biased_resample,
                    pakes_khattree_test, classify_growth, mean_ci)
from .experiments import (ExperimentConfig, ExperimentReport, parse_config,
                          run, list_experiments, REGISTRY)
