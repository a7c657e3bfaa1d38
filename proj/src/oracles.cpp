#include "coral/oracles.hpp"

#include <algorithm>
#include <cmath>

namespace coral {

WeightFn optimal_weights(const TabularModel& model, const DataDistribution& mu) {
    const PlanningSolution plan = plan_optimal(model);
    const OccupancyMeasure occ = occupancy_of(model, plan.optimal_policy);
    const int S = model.n_states(), A = model.n_actions();
    Mat w = Mat::Zero(S, A);
    for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a) {
            const double d = occ.joint(s, a);
            if (d <= 1e-15) continue;
            if (mu(s, a) <= 0.0)
                throw DataError("optimal occupancy uncovered by mu at (s=" +
                                std::to_string(s) + ",a=" + std::to_string(a) + ")");
            w(s, a) = d / mu(s, a);
        }
    return {w};
}

RegularizedOptimum regularized_optimum_mab(const TabularModel& mab,
                                           const DataDistribution& mu,
                                           const RegularizerSpec& spec, double alpha) {
    if (mab.n_states() != 1) throw std::invalid_argument("expected a single-state model");
    if (alpha <= 0.0) throw std::invalid_argument("alpha must be positive");
    const int A = mab.n_actions();
    const auto weight_at = [&](double v, int a) {
        return std::max(0.0, spec.fprime_inv((mab.reward_mean()(0, a) - v) / alpha));
    };
    const auto constraint = [&](double v) {
        double acc = 0.0;
        for (int a = 0; a < A; ++a) acc += mu(0, a) * weight_at(v, a);
        return acc - 1.0;  // decreasing in v
    };
    double lo = mab.reward_mean().row(0).minCoeff() - alpha * spec.b_fprime;
    double hi = mab.reward_mean().row(0).maxCoeff();
    if (constraint(lo) < 0.0 || constraint(hi) > kProbTol)
        throw SolverError("regularized optimum: bisection bracket failure");
    for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
        const double mid = 0.5 * (lo + hi);
        (constraint(mid) >= 0.0 ? lo : hi) = mid;
    }
    const double v = 0.5 * (lo + hi);
    Mat w(1, A);
    for (int a = 0; a < A; ++a) w(0, a) = weight_at(v, a);
    const double r_star = mab.reward_mean().row(0).maxCoeff();
    // concentrability of the unregularized optimum
    const double c_star = concentrability(mab, plan_optimal(mab).optimal_policy, mu);
    return {{w}, v, r_star - alpha * spec.fprime(c_star), r_star};
}

std::pair<Mat, Mat> x_star_and_clip(const TabularModel& model, const DataDistribution& mu,
                                    const WeightFn& w, double b_x) {
    const Policy pi_w = policy_from_weights(w, mu);
    const OccupancyMeasure occ = occupancy_of(model, pi_w);
    const InducedOccupancy ind = induced_occupancy(w, mu);
    const int S = model.n_states(), A = model.n_actions();
    Mat x = Mat::Zero(S, A), x_clip = Mat::Zero(S, A);
    for (int s = 0; s < S; ++s) {
        double val = 0.0;  // never-visited states keep x* = 0
        if (occ.marginal[s] > 0.0) val = 2.0 * ind.marginal[s] / occ.marginal[s] - 2.0;
        for (int a = 0; a < A; ++a) {
            x(s, a) = val;
            x_clip(s, a) = std::clamp(val, -b_x, b_x);
        }
    }
    return {x, x_clip};
}

AuxFn u_star(const TabularModel& model, const DataDistribution& mu, const WeightFn& w,
             const FenchelPair& fen) {
    const auto [x, x_clip] = x_star_and_clip(model, mu, w, fen.b_x);
    const Policy pi_w = policy_from_weights(w, mu);
    const int S = model.n_states(), A = model.n_actions();
    const int n = S * A;
    // u = f*(x~) + gamma P^{pi_w} u, solved as a dense linear system over (s,a)
    Mat lhs = Mat::Identity(n, n);
    Vec rhs(n);
    for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a) {
            const int row = s * A + a;
            rhs[row] = FenchelPair::f_star(x_clip(s, a));
            for (int t = 0; t < S; ++t) {
                const double p = model.next_dist(s, a)[t];
                if (p == 0.0) continue;
                for (int b = 0; b < A; ++b)
                    lhs(row, t * A + b) -= model.discount() * p * pi_w(t, b);
            }
        }
    const Vec u_flat = lhs.partialPivLu().solve(rhs);
    Mat u(S, A);
    for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a) u(s, a) = u_flat[s * A + a];
    return {u};
}

SlopeFn zeta_star(const AuxFn& u, const Mat& transitions, const WeightFn& w,
                  const DataDistribution& mu, double gamma) {
    const Policy pi_w = policy_from_weights(w, mu);
    const int S = static_cast<int>(u.table.rows()), A = static_cast<int>(u.table.cols());
    Vec u_bar(S);
    for (int s = 0; s < S; ++s) u_bar[s] = pi_w.probs().row(s).dot(u.table.row(s));
    Mat z(S, A);
    for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a) {
            const double radicand = u.table(s, a) - gamma * transitions.row(s * A + a).dot(u_bar) + 1.0;
            if (radicand <= 0.0)
                throw SolverError("zeta_star: nonpositive radicand at (s=" + std::to_string(s) +
                                  ",a=" + std::to_string(a) + ")");
            z(s, a) = -1.0 / std::sqrt(radicand);
        }
    return {z};
}

double suboptimality(const TabularModel& model, const Policy& policy) {
    return suboptimality(plan_optimal(model).j_star, model, policy);
}

double suboptimality(double j_star, const TabularModel& model, const Policy& policy) {
    return j_star - j_value(model, policy);
}

InvarianceReport alm_invariance_check(const TabularModel& model, const DataDistribution& mu,
                                      const FiniteClass<WeightFn>& W,
                                      const FiniteClass<DualFn>& V) {
    if (W.empty() || V.empty()) throw std::invalid_argument("empty class");
    const auto outer_value = [&](const WeightFn& w, bool with_penalty) {
        double best = kInfinity;
        for (const auto& v : V.members)
            best = std::min(best, pop_mdp_dual(model, mu, w, v));
        if (with_penalty) best -= pop_alm_penalty(model, mu, w);
        return best;
    };
    InvarianceReport rep;
    constexpr double tol = 1e-10;
    for (int pass = 0; pass < 2; ++pass) {
        const bool with_penalty = pass == 1;
        std::vector<double> vals;
        vals.reserve(W.size());
        double best = -kInfinity;
        for (const auto& w : W.members) {
            vals.push_back(outer_value(w, with_penalty));
            best = std::max(best, vals.back());
        }
        auto& set = with_penalty ? rep.argmax_alm : rep.argmax_plain;
        for (std::size_t k = 0; k < vals.size(); ++k)
            if (vals[k] >= best - tol) set.push_back(static_cast<int>(k));
    }
    // the penalty must keep exactly the feasible members of the plain argmax
    std::vector<int> feasible_plain;
    for (int k : rep.argmax_plain)
        if (pop_alm_penalty(model, mu, W.members[k]) <= tol) feasible_plain.push_back(k);
    rep.holds = !feasible_plain.empty() && feasible_plain == rep.argmax_alm;
    return rep;
}

}  // namespace coral
