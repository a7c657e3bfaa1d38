#include "coral/instances.hpp"

#include "coral/objectives.hpp"
#include "coral/oracles.hpp"
#include "coral/rng.hpp"

#include <cmath>

namespace coral {

namespace {

std::vector<RewardKind> kinds(std::initializer_list<RewardKind> list) { return list; }

Mat single_state_transitions(int n_actions) {
    return Mat::Ones(n_actions, 1);
}

// restart transitions: every (s,a) row equals `next`
Mat restart_transitions(int n_states, int n_actions, const Vec& next) {
    Mat t(n_states * n_actions, n_states);
    for (int r = 0; r < t.rows(); ++r) t.row(r) = next.transpose();
    return t;
}

}  // namespace

Instance prop1(std::size_t n) {
    if (n < 4) throw std::invalid_argument("prop1 needs N >= 4");
    const double nn = static_cast<double>(n);
    Mat rewards(1, 2);
    rewards << 0.5, 1.0 / 3.0;
    TabularModel model(1, 2, single_state_transitions(2), rewards,
                       kinds({RewardKind::deterministic, RewardKind::bernoulli}),
                       Vec::Ones(1), 0.0);
    Mat mu_joint(1, 2);
    mu_joint << 1.0 - 2.0 / nn, 2.0 / nn;
    DataDistribution mu(mu_joint);

    const double b_w = 2.0;
    const double c_star = 1.0 / mu_joint(0, 0);
    FiniteClass<WeightFn> W;
    W.bounds = {b_w, 1.0, 0.0, 0.0, 0.0};
    Mat w1(1, 2), w2(1, 2);
    w1 << c_star, 0.0;
    w2 << 0.0, b_w;
    W.members = {{w1}, {w2}};
    FiniteClass<DualFn> V;
    V.bounds = W.bounds;
    V.members = {{Vec::Constant(1, 0.5)}};

    const PlanningSolution plan = plan_optimal(model);
    return {"prop1", model, mu, W, V, {}, {}, {},
            RegularizerSpec::make(RegularizerKind::shifted_square, b_w),
            0.0, plan.j_star, plan.optimal_policy};
}

Instance prop3_large(double alpha) {
    if (alpha <= 0.0) throw std::invalid_argument("prop3_large needs alpha > 0");
    Mat rewards(1, 2);
    rewards << 1.0, std::max(0.0, 1.0 - alpha);
    TabularModel model(1, 2, single_state_transitions(2), rewards,
                       kinds({RewardKind::deterministic, RewardKind::deterministic}),
                       Vec::Ones(1), 0.0);
    Mat mu_joint(1, 2);
    mu_joint << 0.02, 0.98;  // M_f/100 with the quadratic regularizer
    DataDistribution mu(mu_joint);

    const double b_w = 1.0 / mu_joint(0, 0);
    RegularizerSpec spec = RegularizerSpec::make(RegularizerKind::plain_square, b_w);
    const RegularizedOptimum opt = regularized_optimum_mab(model, mu, spec, alpha);
    const WeightFn w_star = optimal_weights(model, mu);

    FiniteClass<WeightFn> W;
    W.bounds = {b_w, 1.0, 0.0, 0.0, 0.0};
    W.members = {opt.w, w_star};
    FiniteClass<DualFn> V;
    V.bounds = W.bounds;
    V.members = {{Vec::Constant(1, opt.v)}, {Vec::Constant(1, 1.0)}};

    const PlanningSolution plan = plan_optimal(model);
    return {"prop3_large", model, mu, W, V, {}, {}, {}, spec,
            alpha, plan.j_star, plan.optimal_policy};
}

Instance prop3_small(std::size_t n, double alpha) {
    if (n < 16) throw std::invalid_argument("prop3_small needs N >= 16");
    if (alpha <= 0.0) throw std::invalid_argument("prop3_small needs alpha > 0");
    const double nn = static_cast<double>(n);
    const double rho1 = std::pow(nn, -0.25);
    Vec rho(2);
    rho << rho1, 1.0 - rho1;
    Mat rewards(2, 2);
    rewards << 0.5, 1.0 / 3.0, 0.5, 1.0 / 3.0;
    TabularModel model(2, 2, restart_transitions(2, 2, rho), rewards,
                       kinds({RewardKind::bernoulli, RewardKind::deterministic,
                              RewardKind::deterministic, RewardKind::deterministic}),
                       rho, 0.0);
    const double cond1 = 1.0 - 2.0 / nn;
    Mat mu_joint(2, 2);
    mu_joint << rho[0] * cond1, rho[0] * (1.0 - cond1),
                rho[1] * cond1, rho[1] * (1.0 - cond1);
    DataDistribution mu(mu_joint);

    const double b_w = 2.0;
    RegularizerSpec spec = RegularizerSpec::make(RegularizerKind::plain_square, b_w);

    // the population problem decouples across states; solve each as a bandit
    Mat w_alpha(2, 2);
    Vec v_alpha(2);
    for (int s = 0; s < 2; ++s) {
        TabularModel sub(1, 2, single_state_transitions(2), rewards.row(s),
                         kinds({RewardKind::deterministic, RewardKind::deterministic}),
                         Vec::Ones(1), 0.0);
        Mat sub_mu(1, 2);
        sub_mu << cond1, 1.0 - cond1;
        const RegularizedOptimum opt =
            regularized_optimum_mab(sub, DataDistribution(sub_mu), spec, alpha);
        w_alpha.row(s) = opt.w.table.row(0);
        v_alpha[s] = opt.v;
    }
    Mat w_tilde = w_alpha;
    w_tilde.row(0).setZero();  // drop the thin state entirely

    FiniteClass<WeightFn> W;
    W.bounds = {b_w, 1.0, 0.0, 0.0, 0.0};
    W.members = {{w_alpha}, {w_tilde}};
    FiniteClass<DualFn> V;
    V.bounds = W.bounds;
    V.members = {{v_alpha}, {Vec::Constant(2, 0.5)}};

    const PlanningSolution plan = plan_optimal(model);
    return {"prop3_small", model, mu, W, V, {}, {}, {}, spec,
            alpha, plan.j_star, plan.optimal_policy};
}

Instance figure1(double gamma) {
    if (gamma <= 0.0 || gamma >= 1.0) throw std::invalid_argument("figure1 needs 0 < gamma < 1");
    // states A,B,C,T; actions L,R; T absorbs; entering actions carry the rewards
    const int S = 4, A = 2;
    Mat trans = Mat::Zero(S * A, S);
    trans.row(0 * A + 0) << 0, 1, 0, 0;  // A,L -> B
    trans.row(0 * A + 1) << 0, 0, 1, 0;  // A,R -> C
    for (int a = 0; a < A; ++a) {
        trans.row(1 * A + a) << 0, 0, 0, 1;  // B -> T
        trans.row(2 * A + a) << 0, 0, 0, 1;  // C -> T
        trans.row(3 * A + a) << 0, 0, 0, 1;  // T absorbing
    }
    Mat rewards = Mat::Zero(S, A);
    rewards(1, 0) = rewards(1, 1) = 1.0;  // from B: +1 either way
    rewards(2, 1) = 1.0;                  // from C only the right action pays
    Vec rho = Vec::Zero(S);
    rho[0] = 1.0;
    TabularModel model(S, A, trans, rewards,
                       std::vector<RewardKind>(S * A, RewardKind::deterministic), rho, gamma);

    // original masses halved; the remaining half covers the absorbing state so
    // the good member stays exactly feasible
    Mat mu_joint = Mat::Zero(S, A);
    mu_joint(0, 0) = 1.0 / 8.0;
    mu_joint(0, 1) = 1.0 / 4.0;
    mu_joint(1, 0) = 1.0 / 8.0;
    mu_joint(3, 0) = 1.0 / 2.0;
    DataDistribution mu(mu_joint);

    const WeightFn w1 = optimal_weights(model, mu);
    // the competing weights always pick R from A; C stays uncovered
    Mat pi2 = Mat::Zero(S, A);
    pi2(0, 1) = 1.0;
    pi2(1, 0) = 1.0;
    pi2.row(2).setConstant(0.5);
    pi2(3, 0) = 1.0;
    const OccupancyMeasure occ2 = occupancy_of(model, Policy(pi2));
    Mat w2 = Mat::Zero(S, A);
    for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a)
            if (occ2.joint(s, a) > 1e-15 && mu(s, a) > 0.0)
                w2(s, a) = occ2.joint(s, a) / mu(s, a);

    const PlanningSolution plan = plan_optimal(model);
    FiniteClass<WeightFn> W;
    W.bounds = {4.0, 1.0, 0.0, 0.0, 0.0};
    W.members = {w1, {w2}};
    FiniteClass<DualFn> V;
    V.bounds = W.bounds;
    V.members = {{plan.v_star}};

    return {"figure1", model, mu, W, V, {}, {}, {},
            RegularizerSpec::make(RegularizerKind::plain_square, 4.0),
            0.0, plan.j_star, plan.optimal_policy};
}

Instance rate_mab5(std::size_t n) {
    const double gap = 0.5 / std::sqrt(static_cast<double>(n));
    const int A = 5;
    Mat rewards(1, A);
    std::vector<RewardKind> rk(A, RewardKind::bernoulli);
    rewards(0, 0) = 0.5;
    rk[0] = RewardKind::deterministic;
    for (int a = 1; a < A; ++a) rewards(0, a) = 0.5 - gap;
    TabularModel model(1, A, single_state_transitions(A), rewards, rk, Vec::Ones(1), 0.0);
    DataDistribution mu(Mat::Constant(1, A, 1.0 / A));

    FiniteClass<WeightFn> W;
    W.bounds = {static_cast<double>(A), 1.0, 0.0, 0.0, 0.0};
    for (int a = 0; a < A; ++a) {
        Mat w = Mat::Zero(1, A);
        w(0, a) = A;  // point occupancy on arm a; always population-feasible
        W.members.push_back({w});
    }
    FiniteClass<DualFn> V;
    V.bounds = W.bounds;
    V.members = {{Vec::Constant(1, 0.5)}};

    const PlanningSolution plan = plan_optimal(model);
    return {"rate_mab5", model, mu, W, V, {}, {}, {},
            RegularizerSpec::make(RegularizerKind::shifted_square, W.bounds.w_max),
            0.0, plan.j_star, plan.optimal_policy};
}

Instance rate_cb33(std::size_t n) {
    const double gap = 1.0 / std::sqrt(static_cast<double>(n));
    const int S = 3, A = 3;
    Mat rewards(S, A);
    std::vector<RewardKind> rk(S * A, RewardKind::bernoulli);
    for (int s = 0; s < S; ++s) {
        rewards(s, 0) = 0.8;
        rk[s * A] = RewardKind::deterministic;
        for (int a = 1; a < A; ++a) rewards(s, a) = 0.8 - gap;
    }
    Vec rho = Vec::Constant(S, 1.0 / S);
    TabularModel model(S, A, restart_transitions(S, A, rho), rewards, rk, rho, 0.0);
    Mat mu_joint(S, A);
    for (int s = 0; s < S; ++s) {
        mu_joint(s, 0) = rho[s] * 0.5;
        mu_joint(s, 1) = rho[s] * 0.25;
        mu_joint(s, 2) = rho[s] * 0.25;
    }
    DataDistribution mu(mu_joint);

    FiniteClass<WeightFn> W;
    W.bounds = {4.0, 1.0, 0.0, 0.0, 0.0};
    Mat w_star = Mat::Zero(S, A);
    for (int s = 0; s < S; ++s) w_star(s, 0) = 2.0;  // 1/mu(a0|s)
    W.members.push_back({w_star});
    for (int s = 0; s < S; ++s)
        for (int a = 1; a < A; ++a) {
            Mat w = w_star;
            w(s, 0) = 0.0;
            w(s, a) = 4.0;  // 1/mu(a|s); still feasible in every state
            W.members.push_back({w});
        }
    FiniteClass<DualFn> V;
    V.bounds = W.bounds;
    V.members = {{Vec::Constant(S, 0.8)}};

    const PlanningSolution plan = plan_optimal(model);
    return {"rate_cb33", model, mu, W, V, {}, {}, {},
            RegularizerSpec::make(RegularizerKind::shifted_square, W.bounds.w_max),
            0.0, plan.j_star, plan.optimal_policy};
}

Instance rate_mdp42(std::size_t n) {
    const int S = 4, A = 2;
    const double gamma = 0.8, gap = 0.004, s0 = 0.01;
    Vec restart = Vec::Constant(S, 0.25);
    Vec rho(S);
    rho << 0.5, 0.5, 0.0, 0.0;
    Mat rewards(S, A);
    Vec r_good(S);
    r_good << 0.55, 0.5, 0.5, 0.45;
    std::vector<RewardKind> rk(S * A, RewardKind::bernoulli);
    for (int s = 0; s < S; ++s) {
        rewards(s, 0) = r_good[s];
        rk[s * A] = RewardKind::deterministic;
        rewards(s, 1) = r_good[s] - gap;
    }
    TabularModel model(S, A, restart_transitions(S, A, restart), rewards, rk, rho, gamma);

    // d(s) = (1-gamma) rho + gamma * restart is policy-independent here
    Vec d = (1.0 - gamma) * rho + gamma * restart;
    Mat mu_joint(S, A);
    for (int s = 0; s < S; ++s) {
        mu_joint(s, 0) = d[s] * 0.55;
        mu_joint(s, 1) = d[s] * 0.45;
    }
    DataDistribution mu(mu_joint);

    Mat w_star = Mat::Zero(S, A);
    for (int s = 0; s < S; ++s) w_star(s, 0) = 1.0 / 0.55;
    FiniteClass<WeightFn> W;
    W.bounds = {3.0, 3.0, 0.26, 0.9, 1.1};
    W.members.push_back({w_star});
    const double sqrt_n = std::sqrt(static_cast<double>(n));
    for (int k = 0; k < S; ++k) {
        const double edge_gap = d[k] * gap;  // value drop of the full deviation
        const double t = std::min(1.0, s0 / (sqrt_n * edge_gap));
        Mat w = w_star;
        w(k, 0) = (1.0 - t) * w_star(k, 0);
        w(k, 1) = t / 0.45;
        W.members.push_back({w});
    }
    const WeightFn decoy{0.7 * w_star};  // same policy, invalid occupancy scale
    W.members.push_back(decoy);

    const PlanningSolution plan = plan_optimal(model);
    FiniteClass<DualFn> V;
    V.bounds = W.bounds;
    V.members = {{plan.v_star}};

    const FenchelPair fen{(1.0 - gamma) / 4.0};
    FiniteClass<AuxFn> U;
    U.bounds = W.bounds;
    U.members = {{Mat::Zero(S, A)}, u_star(model, mu, decoy, fen)};
    FiniteClass<SlopeFn> Z;
    Z.bounds = W.bounds;
    Z.members = {{Mat::Constant(S, A, -1.0)},
                 zeta_star(U.members[1], model.transitions(), decoy, mu, gamma)};

    return {"rate_mdp42", model, mu, W, V, U, Z, {},
            RegularizerSpec::make(RegularizerKind::shifted_square, W.bounds.w_max),
            0.0, plan.j_star, plan.optimal_policy};
}

TabularModel random_mdp(int n_states, int n_actions, double gamma, std::uint64_t seed) {
    Rng rng(seed);
    Mat trans(n_states * n_actions, n_states);
    for (int r = 0; r < trans.rows(); ++r) {
        Vec row(n_states);
        for (int s = 0; s < n_states; ++s) row[s] = 0.05 + rng.uniform01();
        trans.row(r) = row.transpose() / row.sum();
    }
    Mat rewards(n_states, n_actions);
    for (int s = 0; s < n_states; ++s)
        for (int a = 0; a < n_actions; ++a) rewards(s, a) = rng.uniform01();
    Vec rho(n_states);
    for (int s = 0; s < n_states; ++s) rho[s] = 0.05 + rng.uniform01();
    rho /= rho.sum();
    return TabularModel(n_states, n_actions, trans, rewards,
                        std::vector<RewardKind>(n_states * n_actions, RewardKind::deterministic),
                        rho, gamma);
}

DataDistribution random_mu(int n_states, int n_actions, std::uint64_t seed, double floor) {
    Rng rng(seed);
    Mat joint(n_states, n_actions);
    for (int s = 0; s < n_states; ++s)
        for (int a = 0; a < n_actions; ++a) joint(s, a) = floor + rng.uniform01();
    joint /= joint.sum();
    return DataDistribution(joint);
}

TabularModel random_mab(int n_arms, std::uint64_t seed) {
    Rng rng(seed);
    Mat rewards(1, n_arms);
    for (int a = 0; a < n_arms; ++a) rewards(0, a) = rng.uniform01();
    return TabularModel(1, n_arms, single_state_transitions(n_arms), rewards,
                        std::vector<RewardKind>(n_arms, RewardKind::deterministic),
                        Vec::Ones(1), 0.0);
}

Instance build_instance(const std::string& name, std::size_t n, double alpha,
                        double gamma, std::uint64_t seed) {
    (void)seed;
    if (name == "prop1") return prop1(n);
    if (name == "prop3_large") return prop3_large(alpha > 0.0 ? alpha : 0.3);
    if (name == "prop3_small") return prop3_small(n, alpha > 0.0 ? alpha : 1.0 / n);
    if (name == "figure1") return figure1(gamma);
    if (name == "rate_mab5") return rate_mab5(n);
    if (name == "rate_cb33") return rate_cb33(n);
    if (name == "rate_mdp42") return rate_mdp42(n);
    throw ConfigError("unknown instance '" + name + "'");
}

}  // namespace coral
