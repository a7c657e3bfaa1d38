#include "coral/env.hpp"
#include "coral/instances.hpp"
#include "coral/objectives.hpp"
#include "coral/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace coral;

namespace {

// Test-side Monte-Carlo rollout oracle, independent of the linear-solve path.
struct McEstimate {
    double mean;
    double stderr_;
};

McEstimate mc_value(const TabularModel& m, const Policy& pi, int start, int episodes,
                    int cap, std::uint64_t seed) {
    Rng rng(seed);
    double sum = 0.0, sumsq = 0.0;
    for (int e = 0; e < episodes; ++e) {
        int s = start >= 0 ? start : rng.categorical(m.initial());
        double ret = 0.0, disc = 1.0;
        for (int t = 0; t < cap; ++t) {
            const int a = rng.categorical(pi.probs().row(s).transpose());
            double r = m.reward_mean()(s, a);
            if (m.reward_kind(s, a) == RewardKind::bernoulli) r = rng.bernoulli(r) ? 1.0 : 0.0;
            ret += disc * r;
            disc *= m.discount();
            s = rng.categorical(m.next_dist(s, a).transpose());
            if (disc < 1e-14) break;
        }
        sum += ret;
        sumsq += ret * ret;
    }
    const double mean = sum / episodes;
    const double var = std::max(0.0, sumsq / episodes - mean * mean);
    return {mean, std::sqrt(var / episodes)};
}

// Truncated power-series occupancy oracle.
Mat occupancy_series(const TabularModel& m, const Policy& pi, int horizon) {
    const int S = m.n_states(), A = m.n_actions();
    Vec dist = m.initial();
    Mat occ = Mat::Zero(S, A);
    double disc = 1.0 - m.discount();
    for (int t = 0; t < horizon; ++t) {
        for (int s = 0; s < S; ++s)
            for (int a = 0; a < A; ++a) occ(s, a) += disc * dist[s] * pi(s, a);
        Vec next = Vec::Zero(S);
        for (int s = 0; s < S; ++s)
            for (int a = 0; a < A; ++a) next += dist[s] * pi(s, a) * m.next_dist(s, a).transpose();
        dist = next;
        disc *= m.discount();
    }
    return occ;
}

Policy random_policy(int S, int A, std::uint64_t seed) {
    Rng rng(seed);
    Mat p(S, A);
    for (int s = 0; s < S; ++s) {
        for (int a = 0; a < A; ++a) p(s, a) = 0.05 + rng.uniform01();
        p.row(s) /= p.row(s).sum();
    }
    return Policy(p);
}

}  // namespace

TEST_CASE("policy_value on the two-arm instance") {
    Instance inst = prop1(100);
    const Policy arm1 = Policy::deterministic(1, 2, {0});
    const Vec v = policy_value(inst.model, arm1);
    CHECK(v[0] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("policy_value is zero for zero rewards") {
    Mat trans(4, 2);
    trans << 1, 0, 0, 1, 0.5, 0.5, 0.3, 0.7;
    TabularModel m(2, 2, trans, Mat::Zero(2, 2),
                   std::vector<RewardKind>(4, RewardKind::deterministic),
                   Vec::Constant(2, 0.5), 0.7);
    const Vec v = policy_value(m, random_policy(2, 2, 7));
    CHECK(v.cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("figure1 value and occupancy against rollout/series oracles") {
    Instance inst = figure1(0.9);
    const Policy& pi1 = inst.pi_star;  // always-left policy
    const Vec v = policy_value(inst.model, pi1);
    CHECK(v[0] == doctest::Approx(0.9).epsilon(1e-12));

    const McEstimate mc = mc_value(inst.model, pi1, 0, 100000, 300, 42);
    CHECK(std::abs(mc.mean - v[0]) < 3.0 * std::max(mc.stderr_, 1e-4));

    const OccupancyMeasure occ = occupancy_of(inst.model, pi1);
    CHECK(occ.marginal[0] == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(occ.marginal[1] == doctest::Approx(0.09).epsilon(1e-12));
    const Mat series = occupancy_series(inst.model, pi1, 800);
    CHECK((series - occ.joint).cwiseAbs().maxCoeff() < 1e-9);

    // J equals the occupancy-weighted reward
    double j_occ = 0.0;
    for (int s = 0; s < 4; ++s)
        for (int a = 0; a < 2; ++a) j_occ += occ.joint(s, a) * inst.model.reward_mean()(s, a);
    CHECK(j_value(inst.model, pi1) == doctest::Approx(j_occ).epsilon(1e-12));
    CHECK(j_value(inst.model, pi1) == doctest::Approx(0.09).epsilon(1e-12));
}

TEST_CASE("j_value collapses to one step at gamma = 0") {
    const TabularModel m = random_mdp(3, 2, 0.0, 11);
    const DataDistribution mu = random_mu(3, 2, 12);
    const Policy pi = random_policy(3, 2, 13);
    double expect = 0.0;
    for (int s = 0; s < 3; ++s)
        for (int a = 0; a < 2; ++a)
            expect += m.initial()[s] * pi(s, a) * m.reward_mean()(s, a);
    CHECK(j_value(m, pi) == doctest::Approx(expect).epsilon(1e-12));
    const OccupancyMeasure occ = occupancy_of(m, pi);
    for (int s = 0; s < 3; ++s)
        for (int a = 0; a < 2; ++a)
            CHECK(occ.joint(s, a) == doctest::Approx(m.initial()[s] * pi(s, a)).epsilon(1e-12));
    (void)mu;
}

TEST_CASE("occupancy of an absorbing single state") {
    Mat trans(2, 1);
    trans << 1, 1;
    Mat rewards(1, 2);
    rewards << 0.2, 0.8;
    TabularModel m(1, 2, trans, rewards,
                   std::vector<RewardKind>(2, RewardKind::deterministic), Vec::Ones(1), 0.6);
    const Policy pi = random_policy(1, 2, 5);
    const OccupancyMeasure occ = occupancy_of(m, pi);
    CHECK(occ.joint(0, 0) == doctest::Approx(pi(0, 0)).epsilon(1e-12));
    CHECK(occ.joint(0, 1) == doctest::Approx(pi(0, 1)).epsilon(1e-12));
}

TEST_CASE("plan_optimal on bandits and the thin-state instance") {
    const TabularModel mab = random_mab(4, 77);
    const PlanningSolution plan = plan_optimal(mab);
    int best = 0;
    for (int a = 1; a < 4; ++a)
        if (mab.reward_mean()(0, a) > mab.reward_mean()(0, best)) best = a;
    CHECK(plan.optimal_policy(0, best) == 1.0);
    CHECK(plan.v_star[0] == doctest::Approx(mab.reward_mean()(0, best)).epsilon(1e-12));

    Instance small = prop3_small(4096, 1.0 / 4096);
    const PlanningSolution ps = plan_optimal(small.model);
    CHECK(ps.v_star[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(ps.v_star[1] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("plan_optimal matches an independent value iteration") {
    const TabularModel m = random_mdp(5, 3, 0.9, 123);
    const PlanningSolution plan = plan_optimal(m);
    Vec v = Vec::Zero(5);
    for (int it = 0; it < 10000; ++it) {
        Vec next(5);
        for (int s = 0; s < 5; ++s) {
            double best = -kInfinity;
            for (int a = 0; a < 3; ++a)
                best = std::max(best, m.reward_mean()(s, a) + 0.9 * m.next_dist(s, a).dot(v));
            next[s] = best;
        }
        v = next;
    }
    CHECK((v - plan.v_star).cwiseAbs().maxCoeff() < 1e-8);
    // Bellman optimality residual
    for (int s = 0; s < 5; ++s) {
        double best = -kInfinity;
        for (int a = 0; a < 3; ++a)
            best = std::max(best,
                            m.reward_mean()(s, a) + 0.9 * m.next_dist(s, a).dot(plan.v_star));
        CHECK(std::abs(best - plan.v_star[s]) < 1e-10);
    }
    CHECK(plan.a_star.maxCoeff() <= 1e-12);
    for (int s = 0; s < 5; ++s) CHECK(std::abs(plan.a_star.row(s).maxCoeff()) < 1e-9);
}

TEST_CASE("concentrability") {
    const TabularModel m = random_mdp(4, 2, 0.8, 31);
    const Policy pi = random_policy(4, 2, 32);
    const OccupancyMeasure occ = occupancy_of(m, pi);
    CHECK(concentrability(m, pi, DataDistribution(occ.joint)) == doctest::Approx(1.0));

    Instance p1 = prop1(100);
    CHECK(concentrability(p1.model, p1.pi_star, p1.mu) ==
          doctest::Approx(1.0 / (1.0 - 2.0 / 100.0)).epsilon(1e-12));

    Instance f1 = figure1(0.9);
    const Policy pi2 = policy_from_weights(f1.W.members[1], f1.mu);
    CHECK(std::isinf(concentrability(f1.model, pi2, f1.mu)));
}

TEST_CASE("flow conservation and value identity on random pairs") {
    for (int k = 0; k < 200; ++k) {
        const TabularModel m = random_mdp(3 + k % 4, 2 + k % 3, (k % 10) / 10.0 * 0.95, 9000 + k);
        const Policy pi = random_policy(m.n_states(), m.n_actions(), 9500 + k);
        const OccupancyMeasure occ = occupancy_of(m, pi);
        REQUIRE(std::abs(occ.joint.sum() - 1.0) < 1e-9);
        double j_occ = 0.0;
        for (int s = 0; s < m.n_states(); ++s)
            for (int a = 0; a < m.n_actions(); ++a)
                j_occ += occ.joint(s, a) * m.reward_mean()(s, a);
        REQUIRE(std::abs(j_occ - j_value(m, pi)) < 1e-9);
    }
}

TEST_CASE("optimal plan dominates random policies") {
    const TabularModel m = random_mdp(4, 3, 0.85, 555);
    const PlanningSolution plan = plan_optimal(m);
    for (int k = 0; k < 100; ++k) {
        const Policy pi = random_policy(4, 3, 600 + k);
        CHECK(plan.j_star >= j_value(m, pi) - 1e-12);
    }
}

TEST_CASE("Monte-Carlo consistency of policy_value") {
    for (int k = 0; k < 10; ++k) {
        const TabularModel m = random_mdp(3 + k % 3, 2, 0.5 + 0.04 * k, 7000 + k);
        const Policy pi = random_policy(m.n_states(), 2, 7100 + k);
        const Vec v = policy_value(m, pi);
        const McEstimate mc = mc_value(m, pi, 0, 100000, 200, 7200 + k);
        CHECK(std::abs(mc.mean - v[0]) < 3.0 * std::max(mc.stderr_, 1e-4));
    }
}

TEST_CASE("model validation rejects bad inputs") {
    Mat trans(2, 1);
    trans << 1, 1;
    Mat rewards(1, 2);
    rewards << 0.5, 0.5;
    std::vector<RewardKind> rk(2, RewardKind::deterministic);
    CHECK_THROWS_AS(TabularModel(1, 2, trans, rewards, rk, Vec::Ones(1), 1.0),
                    std::invalid_argument);
    Mat bad_trans(2, 1);
    bad_trans << 0.8, 1.0;
    CHECK_THROWS_AS(TabularModel(1, 2, bad_trans, rewards, rk, Vec::Ones(1), 0.5),
                    std::invalid_argument);
    Mat bad_reward(1, 2);
    bad_reward << 0.5, 1.5;
    CHECK_THROWS_AS(TabularModel(1, 2, trans, bad_reward, rk, Vec::Ones(1), 0.5),
                    std::invalid_argument);
    const TabularModel m(1, 2, trans, rewards, rk, Vec::Ones(1), 0.0);
    CHECK_THROWS_AS(policy_value(m, Policy::deterministic(2, 2, {0, 0})),
                    std::invalid_argument);
}

TEST_CASE("model json round trip") {
    Instance inst = figure1(0.9);
    const TabularModel copy = TabularModel::from_json(inst.model.to_json());
    CHECK((copy.transitions() - inst.model.transitions()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((copy.reward_mean() - inst.model.reward_mean()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(copy.discount() == inst.model.discount());
    CHECK_THROWS_AS(TabularModel::from_json("{\"n_states\": 2}"), DataError);
}
