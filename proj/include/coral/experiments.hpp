#pragma once

#include "coral/instances.hpp"
#include "coral/report.hpp"
#include "coral/solvers.hpp"

#include <string>
#include <vector>

namespace coral {

enum class AlgorithmId { pro_mab, alm_mab, pro_cb, alm_cb, coral_mb, coral_mf };

const char* algorithm_name(AlgorithmId id);
AlgorithmId algorithm_from_name(const std::string& name);

/// One full offline run on an instance: draw datasets, solve the empirical
/// saddle, return the chosen member index and the induced policy.
struct TrialResult {
    int w_index = -1;
    double objective = 0.0;
    double subopt = 0.0;
};
TrialResult run_trial(AlgorithmId algo, const Instance& inst, std::size_t n,
                      double alpha, std::uint64_t seed);

/// Counterexample reproduction: exact conditioned dataset plus a
/// sampled-failure frequency estimate.
ExperimentReport run_prop1(std::size_t n, int trials, std::uint64_t seed);

/// Unregularized solver restricted to population-feasible weights.
ExperimentReport run_prop2_feasible(const std::vector<std::size_t>& n_grid,
                                    int trials, std::uint64_t seed);

enum class Prop3Regime { large_alpha, small_alpha };

struct Prop3Params {
    double alpha = 0.3;              // large-alpha regime
    bool alpha_one_over_n = true;    // small-alpha regime: alpha = 1/N
    std::vector<std::size_t> n_grid; // small-alpha grid
    std::size_t n_large = 10000;     // large-alpha dataset size
};

ExperimentReport run_prop3(Prop3Regime regime, const Prop3Params& params,
                           int trials, std::uint64_t seed);

/// Population-level comparison on the uncovered-state example: the
/// unregularized tie, the behavior-regularized flip, and the penalty fix.
ExperimentReport run_figure1(double gamma = 0.9, double alpha = 0.01);

ExperimentReport run_rate(AlgorithmId algo, const std::string& instance_name,
                          const std::vector<std::size_t>& n_grid, int trials,
                          std::uint64_t seed);

}  // namespace coral
