#include "coral/solvers.hpp"

#include <cmath>
#include <limits>

namespace coral {

SaddleSolution solve_finite(
    std::size_t n_w, std::size_t n_v, std::size_t n_u, std::size_t n_z,
    const std::function<double(int, int, int, int)>& eval) {
    if (n_w == 0 || n_v == 0) throw SolverError("solve_finite: empty class");
    const bool has_u = n_u > 0, has_z = n_z > 0;
    if (has_z && !has_u) throw SolverError("solve_finite: Z requires U");

    SaddleSolution sol;
    sol.outer_values.reserve(n_w);
    for (std::size_t iw = 0; iw < n_w; ++iw) {
        double best_v = std::numeric_limits<double>::infinity();
        int arg_v = -1, arg_u = -1, arg_z = -1;
        for (std::size_t iv = 0; iv < n_v; ++iv) {
            double val_v;
            int cand_u = -1, cand_z = -1;
            if (!has_u) {
                val_v = eval(static_cast<int>(iw), static_cast<int>(iv), -1, -1);
            } else {
                double best_u = std::numeric_limits<double>::infinity();
                for (std::size_t iu = 0; iu < n_u; ++iu) {
                    double val_u;
                    int cand_z_inner = -1;
                    if (!has_z) {
                        val_u = eval(static_cast<int>(iw), static_cast<int>(iv),
                                     static_cast<int>(iu), -1);
                    } else {
                        double best_z = -std::numeric_limits<double>::infinity();
                        for (std::size_t iz = 0; iz < n_z; ++iz) {
                            const double val = eval(static_cast<int>(iw), static_cast<int>(iv),
                                                    static_cast<int>(iu), static_cast<int>(iz));
                            if (val > best_z) {  // strict: ties keep the lowest index
                                best_z = val;
                                cand_z_inner = static_cast<int>(iz);
                            }
                        }
                        val_u = best_z;
                    }
                    if (val_u < best_u) {
                        best_u = val_u;
                        cand_u = static_cast<int>(iu);
                        cand_z = cand_z_inner;
                    }
                }
                val_v = best_u;
            }
            if (val_v < best_v) {
                best_v = val_v;
                arg_v = static_cast<int>(iv);
                arg_u = cand_u;
                arg_z = cand_z;
            }
        }
        sol.outer_values.push_back(best_v);
        if (iw == 0 || best_v > sol.objective) {
            sol.objective = best_v;
            sol.w_index = static_cast<int>(iw);
            sol.v_index = arg_v;
            sol.u_index = arg_u;
            sol.zeta_index = arg_z;
        }
    }
    return sol;
}

namespace {

double eval_bandit(BanditAlgorithm algo, const OfflineDataset& data,
                   const DataDistribution& mu, double alpha,
                   const RegularizerSpec& spec, const Mat& w, const Vec& v) {
    const WeightFn wf{w};
    const DualFn vf{v};
    switch (algo) {
        case BanditAlgorithm::pro_mab: return emp_pro_mab(data, wf, vf, alpha, spec);
        case BanditAlgorithm::alm_mab: return emp_alm_mab(data, wf, vf);
        case BanditAlgorithm::pro_cb: return emp_pro_cb(data, wf, vf, alpha, spec);
        case BanditAlgorithm::alm_cb: return emp_alm_cb(data, wf, vf, mu);
    }
    throw SolverError("unknown bandit algorithm");
}

}  // namespace

void gda_gradients(BanditAlgorithm algo, const OfflineDataset& data,
                   const DataDistribution& mu, double alpha,
                   const RegularizerSpec& spec, const Mat& w, const Vec& v,
                   Mat& grad_w, Vec& grad_v) {
    const int S = static_cast<int>(w.rows()), A = static_cast<int>(w.cols());
    const double n = static_cast<double>(data.size());
    grad_w = Mat::Zero(S, A);
    grad_v = Vec::Zero(S);

    // per-(s,a) record statistics
    Mat count = Mat::Zero(S, A), rsum = Mat::Zero(S, A);
    for (const auto& rec : data.records) {
        count(rec.s, rec.a) += 1.0;
        rsum(rec.s, rec.a) += rec.r;
    }

    const bool is_alm = algo == BanditAlgorithm::alm_mab || algo == BanditAlgorithm::alm_cb;
    const bool is_mab = algo == BanditAlgorithm::pro_mab || algo == BanditAlgorithm::alm_mab;

    if (is_mab && S != 1) throw SolverError("MAB objective expects one state");

    if (!is_alm) {
        // d/dw(s,a): (1/N) sum_{i in (s,a)} [r_i - v(s) - alpha f'(w(s,a))]
        for (int s = 0; s < S; ++s)
            for (int a = 0; a < A; ++a)
                grad_w(s, a) = (rsum(s, a) - count(s, a) * (v[s] + alpha * spec.fprime(w(s, a)))) / n;
        for (int s = 0; s < S; ++s) {
            double acc = 0.0;
            for (int a = 0; a < A; ++a) acc += count(s, a) * (w(s, a) - 1.0);
            grad_v[s] = -acc / n;
        }
        return;
    }

    if (algo == BanditAlgorithm::alm_mab) {
        double mean_w = 0.0;
        for (int a = 0; a < A; ++a) mean_w += count(0, a) * w(0, a);
        mean_w /= n;
        for (int a = 0; a < A; ++a)
            grad_w(0, a) = (rsum(0, a) - count(0, a) * v[0]) / n -
                           2.0 * (mean_w - 1.0) * count(0, a) / n;
        double acc = 0.0;
        for (int a = 0; a < A; ++a) acc += count(0, a) * (w(0, a) - 1.0);
        grad_v[0] = -acc / n;
        return;
    }

    // alm_cb: per-record penalty (sum_a w(s_i,a) mu(a|s_i) - 1)^2
    Vec state_count = count.rowwise().sum();
    for (int s = 0; s < S; ++s) {
        const double m = w.row(s).dot(mu.conditional().row(s));
        for (int a = 0; a < A; ++a) {
            grad_w(s, a) = (rsum(s, a) - count(s, a) * v[s]) / n -
                           state_count[s] * 2.0 * (m - 1.0) * mu.conditional()(s, a) / n;
        }
        double acc = 0.0;
        for (int a = 0; a < A; ++a) acc += count(s, a) * (w(s, a) - 1.0);
        grad_v[s] = -acc / n;
    }
}

SaddleSolution solve_gda(BanditAlgorithm algo, const OfflineDataset& data,
                         const DataDistribution& mu, double alpha,
                         const RegularizerSpec& spec, const ClassBounds& bounds,
                         const GdaConfig& config) {
    const int S = mu.n_states(), A = mu.n_actions();
    Mat w = Mat::Constant(S, A, 1.0).cwiseMin(bounds.w_max);
    Vec v = Vec::Zero(S);
    Mat w_avg = Mat::Zero(S, A);
    Vec v_avg = Vec::Zero(S);
    int avg_count = 0;
    Mat gw;
    Vec gv;
    const int half = config.steps / 2;
    for (int t = 0; t < config.steps; ++t) {
        gda_gradients(algo, data, mu, alpha, spec, w, v, gw, gv);
        if (!gw.allFinite() || !gv.allFinite())
            throw SolverError("non-finite gradient at iterate " + std::to_string(t));
        const double scale = 1.0 / std::sqrt(1.0 + t);
        w += config.step_w * scale * gw;
        v -= config.step_v * scale * gv;
        w = w.cwiseMax(0.0).cwiseMin(bounds.w_max);
        v = v.cwiseMax(-bounds.v_abs).cwiseMin(bounds.v_abs);
        if (config.average && t >= half) {
            w_avg += w;
            v_avg += v;
            ++avg_count;
        }
    }
    if (config.average && avg_count > 0) {
        w = w_avg / avg_count;
        v = v_avg / avg_count;
    }

    SaddleSolution sol;
    sol.steps = config.steps;
    sol.w_table = w;
    sol.v_table = v;
    sol.objective = eval_bandit(algo, data, mu, alpha, spec, w, v);

    // duality-gap probe: one enumeration sweep over a uniform grid
    const int L = std::max(config.probe_levels, 2);
    double best_w = -std::numeric_limits<double>::infinity();
    {
        std::vector<int> odo(S * A, 0);
        while (true) {
            Mat cand(S, A);
            for (int c = 0; c < S * A; ++c)
                cand(c / A, c % A) = bounds.w_max * odo[c] / (L - 1);
            best_w = std::max(best_w, eval_bandit(algo, data, mu, alpha, spec, cand, v));
            int c = S * A - 1;
            while (c >= 0 && ++odo[c] == L) odo[c--] = 0;
            if (c < 0) break;
        }
    }
    double best_v = std::numeric_limits<double>::infinity();
    {
        std::vector<int> odo(S, 0);
        while (true) {
            Vec cand(S);
            for (int s = 0; s < S; ++s)
                cand[s] = -bounds.v_abs + 2.0 * bounds.v_abs * odo[s] / (L - 1);
            best_v = std::min(best_v, eval_bandit(algo, data, mu, alpha, spec, w, cand));
            int s = S - 1;
            while (s >= 0 && ++odo[s] == L) odo[s--] = 0;
            if (s < 0) break;
        }
    }
    sol.gap_estimate = best_w - best_v;
    sol.converged = sol.gap_estimate < config.tol;
    return sol;
}

Mat mle_transitions_tabular(const ModelDataset& data, int n_states, int n_actions,
                            double lambda) {
    Mat counts = Mat::Zero(n_states * n_actions, n_states);
    for (const auto& t : data.records) counts(t.s * n_actions + t.a, t.s_next) += 1.0;
    Mat out(n_states * n_actions, n_states);
    for (int row = 0; row < counts.rows(); ++row) {
        const double total = counts.row(row).sum();
        if (total == 0.0) {
            out.row(row).setConstant(1.0 / n_states);  // unseen pair
        } else {
            out.row(row) = (counts.row(row).array() + lambda) / (total + lambda * n_states);
        }
    }
    return out;
}

int mle_transitions_finite(const ModelDataset& data, const std::vector<Mat>& members) {
    if (members.empty()) throw SolverError("mle: empty transition class");
    if (data.records.empty()) throw SolverError("mle: empty dataset");
    int best = -1;
    double best_ll = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < members.size(); ++k) {
        const Mat& p = members[k];
        const int A = static_cast<int>(p.cols() > 0 ? p.rows() / p.cols() : 0);
        double ll = 0.0;
        bool dead = false;
        for (const auto& t : data.records) {
            const double prob = p(t.s * A + t.a, t.s_next);
            if (prob <= 0.0) {
                dead = true;  // assigns probability zero to an observed move
                break;
            }
            ll += std::log(prob);
        }
        if (dead) continue;
        if (ll > best_ll) {
            best_ll = ll;
            best = static_cast<int>(k);
        }
    }
    if (best < 0) throw SolverError("mle: every class member scores -inf");
    return best;
}

}  // namespace coral
