#pragma once

#include "coral/classes.hpp"
#include "coral/data.hpp"
#include "coral/env.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace coral {

/// A model, a data distribution, and realizable function classes bundled for
/// the solvers and the experiment harness.
struct Instance {
    std::string name;
    TabularModel model;
    DataDistribution mu;
    FiniteClass<WeightFn> W;
    FiniteClass<DualFn> V;
    FiniteClass<AuxFn> U;        // empty unless the algorithm needs it
    FiniteClass<SlopeFn> Z;      // empty unless the algorithm needs it
    std::vector<Mat> P_class;    // finite transition class; empty -> tabular MLE
    RegularizerSpec spec;
    double default_alpha = 0.0;
    double j_star = 0.0;
    Policy pi_star;
};

// Two-armed instance where the unregularized solver latches onto a lucky
// sparsely-sampled arm: r = (1/2 deterministic, Bernoulli(1/3)),
// mu = (1-2/N, 2/N), W = {(C*,0),(0,B_w)}, V = {1/2}.
Instance prop1(std::size_t n);

// Single-state two-arm instance with a value gap tied to alpha:
// r = (1, max{0,1-alpha}), mu = (M_f/100, 1-M_f/100).
Instance prop3_large(double alpha);

// Two-state two-arm instance with a thin state: rho(1) = N^{-1/4},
// mu(2|s) = 2/N, W = {w*_alpha, w~} with w~ zeroed on the thin state.
Instance prop3_small(std::size_t n, double alpha);

// Three-state diamond with an uncovered state C; terminals are encoded as an
// absorbing zero-reward state and mu is extended to cover it so the good
// weight member stays exactly feasible.
Instance figure1(double gamma = 0.9);

// Rate-study families. Gaps scale as 1/sqrt(N) so the solver keeps erring at
// a constant probability and the error magnitude itself carries the rate.
Instance rate_mab5(std::size_t n);
Instance rate_cb33(std::size_t n);
// Fixed 4-state 2-action restart MDP (gamma = 0.8); the n-indexed classes mix
// w* toward one-state deviations at weight ~ 1/sqrt(n).
Instance rate_mdp42(std::size_t n);

// Random generators for the invariant suites.
TabularModel random_mdp(int n_states, int n_actions, double gamma, std::uint64_t seed);
DataDistribution random_mu(int n_states, int n_actions, std::uint64_t seed,
                           double floor = 0.01);
TabularModel random_mab(int n_arms, std::uint64_t seed);

Instance build_instance(const std::string& name, std::size_t n, double alpha,
                        double gamma, std::uint64_t seed);

}  // namespace coral
