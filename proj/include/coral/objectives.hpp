#pragma once

#include "coral/classes.hpp"
#include "coral/data.hpp"
#include "coral/env.hpp"

namespace coral {

struct InducedOccupancy {
    Mat joint;        // d_w(s,a) = w(s,a) mu(s,a)
    Vec marginal;     // d_w(s)
    double normalizer;  // sum of all entries
};

InducedOccupancy induced_occupancy(const WeightFn& w, const DataDistribution& mu);

/// pi_w(a|s) = w(s,a)mu(a|s) / sum_a w(s,a)mu(a|s); uniform where the
/// denominator vanishes.
Policy policy_from_weights(const WeightFn& w, const DataDistribution& mu);

/// e_v(s,a) = r(s,a) + gamma sum_s' P(s'|s,a) v(s') - v(s).
Mat bellman_residual_term(const TabularModel& model, const DualFn& v);

/// Conjugate toolkit for f(x) = (x-1)^2:
///   f*(x) = ((x+2)/2)^2 - 1,  f*^{-1}(x) = 2 sqrt(x+1) - 2  (x >= -1),
///   g*(x) = x + 2 + 1/x      (x < 0).
struct FenchelPair {
    double b_x;  // clip bound for x*, default (1-gamma)/4

    static double f_star(double x) { return (x + 2.0) * (x + 2.0) / 4.0 - 1.0; }
    static double f_star_inv(double x);
    static double g_star(double x);
};

// ---- empirical objectives (sample averages over datasets) ----

double emp_pro_mab(const OfflineDataset& data, const WeightFn& w, const DualFn& v,
                   double alpha, const RegularizerSpec& spec);

double emp_alm_mab(const OfflineDataset& data, const WeightFn& w, const DualFn& v);

double emp_pro_cb(const OfflineDataset& data, const WeightFn& w, const DualFn& v,
                  double alpha, const RegularizerSpec& spec);

double emp_alm_cb(const OfflineDataset& data, const WeightFn& w, const DualFn& v,
                  const DataDistribution& mu);

/// Model-based objective; p_hat has one row per (s,a) like
/// TabularModel::transitions. mu supplies the known conditional for pi_w.
double emp_coral_mb(const OfflineDataset& data, const InitialDataset& init,
                    const Mat& p_hat, const WeightFn& w, const DualFn& v,
                    const AuxFn& u, const FenchelPair& fen,
                    const DataDistribution& mu, double gamma);

double emp_coral_mf(const OfflineDataset& data, const InitialDataset& init,
                    const WeightFn& w, const DualFn& v, const AuxFn& u,
                    const SlopeFn& zeta, const FenchelPair& fen,
                    const DataDistribution& mu, double gamma);

// ---- population objectives (exact finite sums) ----

double pop_pro_mab(const TabularModel& model, const DataDistribution& mu,
                   const WeightFn& w, const DualFn& v, double alpha,
                   const RegularizerSpec& spec);
double pop_alm_mab(const TabularModel& model, const DataDistribution& mu,
                   const WeightFn& w, const DualFn& v);
double pop_pro_cb(const TabularModel& model, const DataDistribution& mu,
                  const WeightFn& w, const DualFn& v, double alpha,
                  const RegularizerSpec& spec);
double pop_alm_cb(const TabularModel& model, const DataDistribution& mu,
                  const WeightFn& w, const DualFn& v);

/// Lagrange dual without any penalty: (1-gamma)E_rho[v] + E_mu[w e_v].
double pop_mdp_dual(const TabularModel& model, const DataDistribution& mu,
                    const WeightFn& w, const DualFn& v);

/// Exact quadratic occupancy-validity penalty
/// E_{d^{pi_w}}[(d_w(s)/d^{pi_w}(s) - 1)^2]; never-visited states contribute 0.
double pop_alm_penalty(const TabularModel& model, const DataDistribution& mu,
                       const WeightFn& w);

/// Dual with an extra behavior-regularization term -alpha E_mu[f(w)].
double pop_mdp_regularized(const TabularModel& model, const DataDistribution& mu,
                           const WeightFn& w, const DualFn& v, double alpha,
                           const RegularizerSpec& spec);

/// pop_mdp_dual minus pop_alm_penalty.
double pop_mdp_alm(const TabularModel& model, const DataDistribution& mu,
                   const WeightFn& w, const DualFn& v);

double pop_coral_mb(const TabularModel& model, const DataDistribution& mu,
                    const WeightFn& w, const DualFn& v, const AuxFn& u,
                    const FenchelPair& fen);
double pop_coral_mf(const TabularModel& model, const DataDistribution& mu,
                    const WeightFn& w, const DualFn& v, const AuxFn& u,
                    const SlopeFn& zeta, const FenchelPair& fen);

}  // namespace coral
