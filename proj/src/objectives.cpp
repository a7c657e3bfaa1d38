#include "coral/objectives.hpp"

#include <cmath>

namespace coral {

InducedOccupancy induced_occupancy(const WeightFn& w, const DataDistribution& mu) {
    if (w.table.rows() != mu.n_states() || w.table.cols() != mu.n_actions())
        throw std::invalid_argument("weights/mu dimension mismatch");
    InducedOccupancy out;
    out.joint = w.table.cwiseProduct(mu.joint());
    out.marginal = out.joint.rowwise().sum();
    out.normalizer = out.joint.sum();
    return out;
}

Policy policy_from_weights(const WeightFn& w, const DataDistribution& mu) {
    const int S = mu.n_states(), A = mu.n_actions();
    if (w.table.rows() != S || w.table.cols() != A)
        throw std::invalid_argument("weights/mu dimension mismatch");
    Mat probs(S, A);
    for (int s = 0; s < S; ++s) {
        Vec row(A);
        for (int a = 0; a < A; ++a) row[a] = w.table(s, a) * mu.conditional()(s, a);
        const double z = row.sum();
        if (z > 0.0)
            probs.row(s) = row.transpose() / z;
        else
            probs.row(s).setConstant(1.0 / A);
    }
    return Policy(probs);
}

Mat bellman_residual_term(const TabularModel& model, const DualFn& v) {
    const int S = model.n_states(), A = model.n_actions();
    if (v.table.size() != S) throw std::invalid_argument("dual/model dimension mismatch");
    Mat e(S, A);
    for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a)
            e(s, a) = model.reward_mean()(s, a) +
                      model.discount() * model.next_dist(s, a).dot(v.table) - v.table[s];
    return e;
}

double FenchelPair::f_star_inv(double x) {
    if (x < -1.0) throw std::invalid_argument("f_star_inv domain: need x >= -1");
    return 2.0 * std::sqrt(x + 1.0) - 2.0;
}

double FenchelPair::g_star(double x) {
    if (x >= 0.0) throw std::invalid_argument("g_star domain: need x < 0");
    return x + 2.0 + 1.0 / x;
}

namespace {

void check_mab(const OfflineDataset& data, const WeightFn& w) {
    if (data.records.empty()) throw std::invalid_argument("empty dataset");
    if (w.table.rows() != 1) throw std::invalid_argument("expected single-state weights");
}

}  // namespace

double emp_pro_mab(const OfflineDataset& data, const WeightFn& w, const DualFn& v,
                   double alpha, const RegularizerSpec& spec) {
    check_mab(data, w);
    const double vv = v.table[0];
    double acc = 0.0;
    for (const auto& rec : data.records) {
        const double wa = w.table(0, rec.a);
        acc += wa * rec.r - vv * (wa - 1.0) - alpha * spec.f(wa);
    }
    return acc / static_cast<double>(data.size());
}

double emp_alm_mab(const OfflineDataset& data, const WeightFn& w, const DualFn& v) {
    check_mab(data, w);
    const double vv = v.table[0];
    double acc = 0.0, mean_w = 0.0;
    for (const auto& rec : data.records) {
        const double wa = w.table(0, rec.a);
        acc += wa * rec.r - vv * (wa - 1.0);
        mean_w += wa;
    }
    const double n = static_cast<double>(data.size());
    const double viol = mean_w / n - 1.0;
    return acc / n - viol * viol;
}

double emp_pro_cb(const OfflineDataset& data, const WeightFn& w, const DualFn& v,
                  double alpha, const RegularizerSpec& spec) {
    if (data.records.empty()) throw std::invalid_argument("empty dataset");
    double acc = 0.0;
    for (const auto& rec : data.records) {
        const double wa = w.table(rec.s, rec.a);
        acc += wa * rec.r - alpha * spec.f(wa) - v.table[rec.s] * (wa - 1.0);
    }
    return acc / static_cast<double>(data.size());
}

double emp_alm_cb(const OfflineDataset& data, const WeightFn& w, const DualFn& v,
                  const DataDistribution& mu) {
    if (data.records.empty()) throw std::invalid_argument("empty dataset");
    // the per-record penalty depends on the state only
    Vec pen(mu.n_states());
    for (int s = 0; s < mu.n_states(); ++s) {
        const double m = w.table.row(s).dot(mu.conditional().row(s));
        pen[s] = (m - 1.0) * (m - 1.0);
    }
    double acc = 0.0;
    for (const auto& rec : data.records) {
        const double wa = w.table(rec.s, rec.a);
        acc += wa * (rec.r - v.table[rec.s]) + v.table[rec.s] - pen[rec.s];
    }
    return acc / static_cast<double>(data.size());
}

namespace {

// (P^pi u)(s,a) for a transition table with one row per (s,a).
Mat apply_transition_policy(const Mat& trans, const Policy& pi, const Mat& u) {
    const int S = static_cast<int>(u.rows()), A = static_cast<int>(u.cols());
    Vec u_bar(S);  // sum_a' pi(a'|s') u(s',a')
    for (int s = 0; s < S; ++s) u_bar[s] = pi.probs().row(s).dot(u.row(s));
    Mat out(S, A);
    for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a) out(s, a) = trans.row(s * A + a).dot(u_bar);
    return out;
}

}  // namespace

double emp_coral_mb(const OfflineDataset& data, const InitialDataset& init,
                    const Mat& p_hat, const WeightFn& w, const DualFn& v,
                    const AuxFn& u, const FenchelPair& fen,
                    const DataDistribution& mu, double gamma) {
    (void)fen;
    if (data.records.empty() || init.states.empty())
        throw std::invalid_argument("empty dataset");
    const Policy pi_w = policy_from_weights(w, mu);
    const Mat pu = apply_transition_policy(p_hat, pi_w, u.table);
    const Mat arg = u.table - gamma * pu;  // argument of f*^{-1}
    // validate the domain before averaging, naming the first offending record
    for (std::size_t i = 0; i < data.records.size(); ++i) {
        const auto& rec = data.records[i];
        if (arg(rec.s, rec.a) < -1.0)
            throw DataError("f_star_inv domain violation at record " + std::to_string(i) +
                            " (s=" + std::to_string(rec.s) + ",a=" + std::to_string(rec.a) + ")");
    }
    Vec head(mu.n_states());  // v(s) + sum_a u(s,a) pi_w(a|s)
    for (int s = 0; s < mu.n_states(); ++s)
        head[s] = v.table[s] + pi_w.probs().row(s).dot(u.table.row(s));
    double first = 0.0;
    for (auto s : init.states) first += head[s];
    first *= (1.0 - gamma) / static_cast<double>(init.states.size());
    double second = 0.0;
    for (const auto& rec : data.records) {
        const double wa = w.table(rec.s, rec.a);
        second += wa * (rec.r + gamma * v.table[rec.s_next] - v.table[rec.s] -
                        FenchelPair::f_star_inv(arg(rec.s, rec.a)));
    }
    return first + second / static_cast<double>(data.size());
}

double emp_coral_mf(const OfflineDataset& data, const InitialDataset& init,
                    const WeightFn& w, const DualFn& v, const AuxFn& u,
                    const SlopeFn& zeta, const FenchelPair& fen,
                    const DataDistribution& mu, double gamma) {
    (void)fen;
    if (data.records.empty() || init.states.empty())
        throw std::invalid_argument("empty dataset");
    if (zeta.table.maxCoeff() >= 0.0)
        throw std::invalid_argument("slope function must be strictly negative");
    const Policy pi_w = policy_from_weights(w, mu);
    const int S = mu.n_states();
    Vec u_bar(S);  // sum_a' u(s',a') pi_w(a'|s')
    for (int s = 0; s < S; ++s) u_bar[s] = pi_w.probs().row(s).dot(u.table.row(s));
    Vec head(S);
    for (int s = 0; s < S; ++s)
        head[s] = v.table[s] + pi_w.probs().row(s).dot(u.table.row(s));
    double first = 0.0;
    for (auto s : init.states) first += head[s];
    first *= (1.0 - gamma) / static_cast<double>(init.states.size());
    double second = 0.0;
    for (const auto& rec : data.records) {
        const double wa = w.table(rec.s, rec.a);
        const double z = zeta.table(rec.s, rec.a);
        second += wa * (rec.r + gamma * v.table[rec.s_next] - v.table[rec.s] +
                        z * (u.table(rec.s, rec.a) - gamma * u_bar[rec.s_next]) +
                        FenchelPair::g_star(z));
    }
    return first + second / static_cast<double>(data.size());
}

// ---- population forms ----

double pop_pro_mab(const TabularModel& model, const DataDistribution& mu,
                   const WeightFn& w, const DualFn& v, double alpha,
                   const RegularizerSpec& spec) {
    const double vv = v.table[0];
    double acc = 0.0;
    for (int a = 0; a < model.n_actions(); ++a) {
        const double wa = w.table(0, a);
        acc += mu(0, a) * (wa * model.reward_mean()(0, a) - vv * (wa - 1.0) -
                           alpha * spec.f(wa));
    }
    return acc;
}

double pop_alm_mab(const TabularModel& model, const DataDistribution& mu,
                   const WeightFn& w, const DualFn& v) {
    const double vv = v.table[0];
    double acc = 0.0, mean_w = 0.0;
    for (int a = 0; a < model.n_actions(); ++a) {
        const double wa = w.table(0, a);
        acc += mu(0, a) * (wa * model.reward_mean()(0, a) - vv * (wa - 1.0));
        mean_w += mu(0, a) * wa;
    }
    return acc - (mean_w - 1.0) * (mean_w - 1.0);
}

double pop_pro_cb(const TabularModel& model, const DataDistribution& mu,
                  const WeightFn& w, const DualFn& v, double alpha,
                  const RegularizerSpec& spec) {
    double acc = 0.0;
    for (int s = 0; s < model.n_states(); ++s)
        for (int a = 0; a < model.n_actions(); ++a) {
            const double wa = w.table(s, a);
            acc += mu(s, a) * (wa * model.reward_mean()(s, a) - alpha * spec.f(wa) -
                               v.table[s] * (wa - 1.0));
        }
    return acc;
}

double pop_alm_cb(const TabularModel& model, const DataDistribution& mu,
                  const WeightFn& w, const DualFn& v) {
    double acc = 0.0;
    for (int s = 0; s < model.n_states(); ++s) {
        const double m = w.table.row(s).dot(mu.conditional().row(s));
        const double pen = (m - 1.0) * (m - 1.0);
        for (int a = 0; a < model.n_actions(); ++a) {
            const double wa = w.table(s, a);
            acc += mu(s, a) * (wa * (model.reward_mean()(s, a) - v.table[s]) +
                               v.table[s] - pen);
        }
    }
    return acc;
}

double pop_mdp_dual(const TabularModel& model, const DataDistribution& mu,
                    const WeightFn& w, const DualFn& v) {
    const Mat e = bellman_residual_term(model, v);
    double acc = (1.0 - model.discount()) * model.initial().dot(v.table);
    for (int s = 0; s < model.n_states(); ++s)
        for (int a = 0; a < model.n_actions(); ++a)
            acc += mu(s, a) * w.table(s, a) * e(s, a);
    return acc;
}

double pop_alm_penalty(const TabularModel& model, const DataDistribution& mu,
                       const WeightFn& w) {
    const Policy pi_w = policy_from_weights(w, mu);
    const OccupancyMeasure occ = occupancy_of(model, pi_w);
    const InducedOccupancy ind = induced_occupancy(w, mu);
    double acc = 0.0;
    for (int s = 0; s < model.n_states(); ++s) {
        if (occ.marginal[s] <= 0.0) continue;  // zero weight under d^{pi_w}
        const double ratio = ind.marginal[s] / occ.marginal[s];
        acc += occ.marginal[s] * (ratio - 1.0) * (ratio - 1.0);
    }
    return acc;
}

double pop_mdp_regularized(const TabularModel& model, const DataDistribution& mu,
                           const WeightFn& w, const DualFn& v, double alpha,
                           const RegularizerSpec& spec) {
    double reg = 0.0;
    for (int s = 0; s < model.n_states(); ++s)
        for (int a = 0; a < model.n_actions(); ++a)
            reg += mu(s, a) * spec.f(w.table(s, a));
    return pop_mdp_dual(model, mu, w, v) - alpha * reg;
}

double pop_mdp_alm(const TabularModel& model, const DataDistribution& mu,
                   const WeightFn& w, const DualFn& v) {
    return pop_mdp_dual(model, mu, w, v) - pop_alm_penalty(model, mu, w);
}

double pop_coral_mb(const TabularModel& model, const DataDistribution& mu,
                    const WeightFn& w, const DualFn& v, const AuxFn& u,
                    const FenchelPair& fen) {
    (void)fen;
    const double gamma = model.discount();
    const Policy pi_w = policy_from_weights(w, mu);
    const Mat pu = apply_transition_policy(model.transitions(), pi_w, u.table);
    const Mat e = bellman_residual_term(model, v);
    double acc = 0.0;
    for (int s = 0; s < model.n_states(); ++s) {
        acc += (1.0 - gamma) * model.initial()[s] *
               (v.table[s] + pi_w.probs().row(s).dot(u.table.row(s)));
        for (int a = 0; a < model.n_actions(); ++a) {
            const double arg = u.table(s, a) - gamma * pu(s, a);
            acc += mu(s, a) * w.table(s, a) * (e(s, a) - FenchelPair::f_star_inv(arg));
        }
    }
    return acc;
}

double pop_coral_mf(const TabularModel& model, const DataDistribution& mu,
                    const WeightFn& w, const DualFn& v, const AuxFn& u,
                    const SlopeFn& zeta, const FenchelPair& fen) {
    (void)fen;
    if (zeta.table.maxCoeff() >= 0.0)
        throw std::invalid_argument("slope function must be strictly negative");
    const double gamma = model.discount();
    const Policy pi_w = policy_from_weights(w, mu);
    const Mat pu = apply_transition_policy(model.transitions(), pi_w, u.table);
    const Mat e = bellman_residual_term(model, v);
    double acc = 0.0;
    for (int s = 0; s < model.n_states(); ++s) {
        acc += (1.0 - gamma) * model.initial()[s] *
               (v.table[s] + pi_w.probs().row(s).dot(u.table.row(s)));
        for (int a = 0; a < model.n_actions(); ++a) {
            const double z = zeta.table(s, a);
            acc += mu(s, a) * w.table(s, a) *
                   (e(s, a) + z * (u.table(s, a) - gamma * pu(s, a)) +
                    FenchelPair::g_star(z));
        }
    }
    return acc;
}

}  // namespace coral
