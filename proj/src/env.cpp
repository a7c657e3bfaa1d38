#include "coral/env.hpp"

#include "coral/data.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>

namespace coral {

namespace {

void check_distribution(const Eigen::Ref<const Vec>& p, const std::string& what) {
    if (p.minCoeff() < 0.0)
        throw std::invalid_argument(what + " has a negative entry");
    if (std::abs(p.sum() - 1.0) > kProbTol)
        throw std::invalid_argument(what + " does not sum to 1");
}

}  // namespace

TabularModel::TabularModel(int n_states, int n_actions, Mat transitions, Mat reward_mean,
                           std::vector<RewardKind> reward_kind, Vec initial, double discount)
    : n_states_(n_states),
      n_actions_(n_actions),
      transitions_(std::move(transitions)),
      reward_mean_(std::move(reward_mean)),
      reward_kind_(std::move(reward_kind)),
      initial_(std::move(initial)),
      discount_(discount) {
    if (n_states_ <= 0 || n_actions_ <= 0)
        throw std::invalid_argument("model dimensions must be positive");
    if (transitions_.rows() != n_states_ * n_actions_ || transitions_.cols() != n_states_)
        throw std::invalid_argument("transitions shape mismatch");
    if (reward_mean_.rows() != n_states_ || reward_mean_.cols() != n_actions_)
        throw std::invalid_argument("reward_mean shape mismatch");
    if (static_cast<int>(reward_kind_.size()) != n_states_ * n_actions_)
        throw std::invalid_argument("reward_kind length mismatch");
    if (initial_.size() != n_states_)
        throw std::invalid_argument("initial distribution length mismatch");
    if (discount_ < 0.0 || discount_ >= 1.0)
        throw std::invalid_argument("discount must lie in [0,1)");
    for (int r = 0; r < transitions_.rows(); ++r)
        check_distribution(transitions_.row(r), "transition row " + std::to_string(r));
    check_distribution(initial_, "initial distribution");
    if (reward_mean_.minCoeff() < 0.0 || reward_mean_.maxCoeff() > 1.0)
        throw std::invalid_argument("reward means must lie in [0,1]");
}

Policy::Policy(Mat probs) : probs_(std::move(probs)) {
    for (int s = 0; s < probs_.rows(); ++s) {
        if (probs_.row(s).minCoeff() < 0.0)
            throw std::invalid_argument("policy row " + std::to_string(s) + " negative");
        if (std::abs(probs_.row(s).sum() - 1.0) > kProbTol)
            throw std::invalid_argument("policy row " + std::to_string(s) + " not normalized");
    }
}

Policy Policy::deterministic(int n_states, int n_actions, const std::vector<int>& actions) {
    Mat p = Mat::Zero(n_states, n_actions);
    for (int s = 0; s < n_states; ++s) p(s, actions.at(s)) = 1.0;
    return Policy(p);
}

namespace {

// P_pi(s,s') and r_pi(s) for a fixed policy.
void policy_kernel(const TabularModel& m, const Policy& pi, Mat& p_pi, Vec& r_pi) {
    const int S = m.n_states(), A = m.n_actions();
    if (pi.n_states() != S || pi.n_actions() != A)
        throw std::invalid_argument("policy does not match model dimensions");
    p_pi = Mat::Zero(S, S);
    r_pi = Vec::Zero(S);
    for (int s = 0; s < S; ++s) {
        for (int a = 0; a < A; ++a) {
            const double w = pi(s, a);
            if (w == 0.0) continue;
            p_pi.row(s) += w * m.next_dist(s, a);
            r_pi[s] += w * m.reward_mean()(s, a);
        }
    }
}

}  // namespace

Vec policy_value(const TabularModel& model, const Policy& policy) {
    Mat p_pi;
    Vec r_pi;
    policy_kernel(model, policy, p_pi, r_pi);
    const int S = model.n_states();
    Mat lhs = Mat::Identity(S, S) - model.discount() * p_pi;
    return lhs.partialPivLu().solve(r_pi);
}

double j_value(const TabularModel& model, const Policy& policy) {
    const Vec v = policy_value(model, policy);
    return (1.0 - model.discount()) * model.initial().dot(v);
}

OccupancyMeasure occupancy_of(const TabularModel& model, const Policy& policy) {
    Mat p_pi;
    Vec r_pi;
    policy_kernel(model, policy, p_pi, r_pi);
    const int S = model.n_states(), A = model.n_actions();
    Mat lhs = Mat::Identity(S, S) - model.discount() * p_pi.transpose();
    Vec marginal = lhs.partialPivLu().solve(
        Vec((1.0 - model.discount()) * model.initial()));
    // direct solves can leave -1e-17 style dust on unreachable states
    marginal = marginal.cwiseMax(0.0);
    Mat joint(S, A);
    for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a) joint(s, a) = marginal[s] * policy(s, a);
    return {joint, marginal};
}

PlanningSolution plan_optimal(const TabularModel& model) {
    const int S = model.n_states(), A = model.n_actions();
    std::vector<int> greedy(S, 0);
    Vec v = Vec::Zero(S);
    // policy iteration; finite termination with exact evaluation
    for (int iter = 0; iter < 1000; ++iter) {
        Policy pi = Policy::deterministic(S, A, greedy);
        v = policy_value(model, pi);
        bool stable = true;
        for (int s = 0; s < S; ++s) {
            int best = 0;
            double best_q = -kInfinity;
            for (int a = 0; a < A; ++a) {
                const double q = model.reward_mean()(s, a) +
                                 model.discount() * model.next_dist(s, a).dot(v);
                if (q > best_q + 1e-13) {
                    best_q = q;
                    best = a;
                }
            }
            if (best != greedy[s]) {
                greedy[s] = best;
                stable = false;
            }
        }
        if (stable) break;
    }
    Policy pi_star = Policy::deterministic(S, A, greedy);
    Vec v_star = policy_value(model, pi_star);
    Mat q_star(S, A), a_star(S, A);
    for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a) {
            q_star(s, a) = model.reward_mean()(s, a) +
                           model.discount() * model.next_dist(s, a).dot(v_star);
            a_star(s, a) = q_star(s, a) - v_star[s];
        }
    const double j_star = (1.0 - model.discount()) * model.initial().dot(v_star);
    return {pi_star, v_star, q_star, a_star, j_star};
}

double concentrability(const TabularModel& model, const Policy& policy,
                       const DataDistribution& mu) {
    const OccupancyMeasure occ = occupancy_of(model, policy);
    double c = 0.0;
    for (int s = 0; s < model.n_states(); ++s)
        for (int a = 0; a < model.n_actions(); ++a) {
            const double d = occ.joint(s, a);
            if (d <= 1e-15) continue;
            if (mu(s, a) <= 0.0) return kInfinity;
            c = std::max(c, d / mu(s, a));
        }
    return c;
}

std::string TabularModel::to_json() const {
    nlohmann::json j;
    j["n_states"] = n_states_;
    j["n_actions"] = n_actions_;
    auto& trans = j["transitions"] = nlohmann::json::array();
    for (int s = 0; s < n_states_; ++s) {
        nlohmann::json per_state = nlohmann::json::array();
        for (int a = 0; a < n_actions_; ++a) {
            nlohmann::json row = nlohmann::json::array();
            for (int t = 0; t < n_states_; ++t) row.push_back(transitions_(sa(s, a), t));
            per_state.push_back(row);
        }
        trans.push_back(per_state);
    }
    auto& rm = j["reward_mean"] = nlohmann::json::array();
    auto& rk = j["reward_kind"] = nlohmann::json::array();
    for (int s = 0; s < n_states_; ++s) {
        nlohmann::json row = nlohmann::json::array(), krow = nlohmann::json::array();
        for (int a = 0; a < n_actions_; ++a) {
            row.push_back(reward_mean_(s, a));
            krow.push_back(reward_kind_[sa(s, a)] == RewardKind::deterministic
                               ? "deterministic" : "bernoulli");
        }
        rm.push_back(row);
        rk.push_back(krow);
    }
    auto& init = j["initial"] = nlohmann::json::array();
    for (int s = 0; s < n_states_; ++s) init.push_back(initial_[s]);
    j["discount"] = discount_;
    return j.dump(2);
}

TabularModel TabularModel::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("model json parse failure: ") + e.what());
    }
    try {
        const int S = j.at("n_states").get<int>();
        const int A = j.at("n_actions").get<int>();
        Mat trans(S * A, S), rm(S, A);
        std::vector<RewardKind> rk(S * A, RewardKind::deterministic);
        for (int s = 0; s < S; ++s)
            for (int a = 0; a < A; ++a) {
                const auto& row = j.at("transitions").at(s).at(a);
                for (int t = 0; t < S; ++t) trans(s * A + a, t) = row.at(t).get<double>();
                rm(s, a) = j.at("reward_mean").at(s).at(a).get<double>();
                const std::string kind = j.at("reward_kind").at(s).at(a).get<std::string>();
                if (kind != "deterministic" && kind != "bernoulli")
                    throw DataError("unknown reward kind '" + kind + "'");
                rk[s * A + a] = kind == "deterministic" ? RewardKind::deterministic
                                                        : RewardKind::bernoulli;
            }
        Vec init(S);
        for (int s = 0; s < S; ++s) init[s] = j.at("initial").at(s).get<double>();
        return TabularModel(S, A, std::move(trans), std::move(rm), std::move(rk),
                            std::move(init), j.at("discount").get<double>());
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("model json field error: ") + e.what());
    }
}

}  // namespace coral
