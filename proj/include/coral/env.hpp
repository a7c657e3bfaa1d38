#pragma once

#include "coral/types.hpp"

#include <string>
#include <vector>

namespace coral {

enum class RewardKind : std::uint8_t { deterministic = 0, bernoulli = 1 };

/// Finite discounted MDP. Multi-armed bandits are the gamma = 0, single-state
/// case; contextual bandits are gamma = 0 with the initial distribution as the
/// context distribution. All quantities are validated on construction.
class TabularModel {
public:
    /// transitions has one row per (s,a) pair, laid out s*n_actions + a;
    /// each row is a distribution over successor states.
    TabularModel(int n_states, int n_actions, Mat transitions, Mat reward_mean,
                 std::vector<RewardKind> reward_kind, Vec initial, double discount);

    int n_states() const { return n_states_; }
    int n_actions() const { return n_actions_; }
    double discount() const { return discount_; }
    const Mat& transitions() const { return transitions_; }
    const Mat& reward_mean() const { return reward_mean_; }
    const Vec& initial() const { return initial_; }
    RewardKind reward_kind(int s, int a) const { return reward_kind_[sa(s, a)]; }

    int sa(int s, int a) const { return s * n_actions_ + a; }
    /// P(.|s,a) as a row view.
    auto next_dist(int s, int a) const { return transitions_.row(sa(s, a)); }

    std::string to_json() const;
    static TabularModel from_json(const std::string& text);

private:
    int n_states_;
    int n_actions_;
    Mat transitions_;   // (S*A) x S
    Mat reward_mean_;   // S x A
    std::vector<RewardKind> reward_kind_;  // length S*A
    Vec initial_;       // S
    double discount_;
};

class Policy {
public:
    explicit Policy(Mat probs);
    const Mat& probs() const { return probs_; }
    double operator()(int s, int a) const { return probs_(s, a); }
    int n_states() const { return static_cast<int>(probs_.rows()); }
    int n_actions() const { return static_cast<int>(probs_.cols()); }

    static Policy deterministic(int n_states, int n_actions, const std::vector<int>& actions);

private:
    Mat probs_;  // rows sum to 1
};

struct OccupancyMeasure {
    Mat joint;      // S x A, sums to 1
    Vec marginal;   // row sums
};

struct PlanningSolution {
    Policy optimal_policy;
    Vec v_star;
    Mat q_star;
    Mat a_star;  // q_star - v_star per state, <= 0
    double j_star;
};

/// Exact policy evaluation: solves V = r_pi + gamma P_pi V by dense LU.
Vec policy_value(const TabularModel& model, const Policy& policy);

/// J(pi) = (1-gamma) E_rho[V^pi] = E_{d^pi}[r].
double j_value(const TabularModel& model, const Policy& policy);

/// Discounted state-action occupancy, normalized to sum to 1.
OccupancyMeasure occupancy_of(const TabularModel& model, const Policy& policy);

/// Policy iteration with greedy ties broken toward the lowest action index.
PlanningSolution plan_optimal(const TabularModel& model);

class DataDistribution;  // data.hpp

/// Smallest C with d^pi(s,a) <= C mu(s,a); +infinity when the support of
/// d^pi escapes mu.
double concentrability(const TabularModel& model, const Policy& policy,
                       const DataDistribution& mu);

}  // namespace coral
