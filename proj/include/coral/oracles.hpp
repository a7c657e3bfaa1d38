#pragma once

#include "coral/objectives.hpp"

#include <utility>
#include <vector>

namespace coral {

/// w*(s,a) = d^{pi*}(s,a)/mu(s,a) on the support of d^{pi*}, zero elsewhere.
/// Errors when some visited pair is uncovered by mu.
WeightFn optimal_weights(const TabularModel& model, const DataDistribution& mu);

struct RegularizedOptimum {
    WeightFn w;     // w*_alpha
    double v;       // v*_alpha
    double band_lo; // r* - alpha f'(C*)
    double band_hi; // r*
};

/// Stationarity solution of the regularized single-state problem:
/// w*_a(a) = max{0, (f')^{-1}((r(a)-v)/alpha)} with v pinned by the
/// normalization constraint (bisection to 1e-12).
RegularizedOptimum regularized_optimum_mab(const TabularModel& mab,
                                           const DataDistribution& mu,
                                           const RegularizerSpec& spec, double alpha);

/// x*_w = 2 d_w(s)/d^{pi_w}(s) - 2 (zero at never-visited states) and its
/// clip to [-B_x, B_x].
std::pair<Mat, Mat> x_star_and_clip(const TabularModel& model, const DataDistribution& mu,
                                    const WeightFn& w, double b_x);

/// Fixed point of u = f*(x~_w) + gamma P^{pi_w} u, solved directly.
AuxFn u_star(const TabularModel& model, const DataDistribution& mu, const WeightFn& w,
             const FenchelPair& fen);

/// zeta* = -(u - gamma P^{pi_w} u + 1)^{-1/2}; errors on a nonpositive radicand.
SlopeFn zeta_star(const AuxFn& u, const Mat& transitions, const WeightFn& w,
                  const DataDistribution& mu, double gamma);

double suboptimality(const TabularModel& model, const Policy& policy);
double suboptimality(double j_star, const TabularModel& model, const Policy& policy);

struct InvarianceReport {
    std::vector<int> argmax_plain;  // population argmax set without the penalty
    std::vector<int> argmax_alm;    // with the penalty
    bool holds = false;             // alm set == feasible subset of plain set
};

/// Checks that adding the quadratic occupancy-validity penalty leaves the
/// population argmax over W at the feasible optimizers (and only prunes
/// infeasible ties).
InvarianceReport alm_invariance_check(const TabularModel& model, const DataDistribution& mu,
                                      const FiniteClass<WeightFn>& W,
                                      const FiniteClass<DualFn>& V);

}  // namespace coral
