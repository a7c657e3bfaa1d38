#include "coral/selftest.hpp"

#include "coral/experiments.hpp"
#include "coral/oracles.hpp"
#include "coral/rng.hpp"

#include <cmath>
#include <ostream>

namespace coral {

namespace {

bool flow_conservation(std::ostream& out) {
    for (int k = 0; k < 40; ++k) {
        const TabularModel m = random_mdp(4 + k % 3, 2 + k % 2, 0.9 * (k % 5) / 5.0, 1000 + k);
        const DataDistribution mu = random_mu(m.n_states(), m.n_actions(), 2000 + k);
        Rng rng(3000 + k);
        Mat p(m.n_states(), m.n_actions());
        for (int s = 0; s < m.n_states(); ++s) {
            for (int a = 0; a < m.n_actions(); ++a) p(s, a) = 0.05 + rng.uniform01();
            p.row(s) /= p.row(s).sum();
        }
        const Policy pi(p);
        const OccupancyMeasure occ = occupancy_of(m, pi);
        if (std::abs(occ.joint.sum() - 1.0) > 1e-9) {
            out << "  flow: mass " << occ.joint.sum() << "\n";
            return false;
        }
        // Bellman flow residual
        for (int s = 0; s < m.n_states(); ++s) {
            double inflow = (1.0 - m.discount()) * m.initial()[s];
            for (int sp = 0; sp < m.n_states(); ++sp)
                for (int ap = 0; ap < m.n_actions(); ++ap)
                    inflow += m.discount() * m.next_dist(sp, ap)[s] * occ.joint(sp, ap);
            if (std::abs(inflow - occ.marginal[s]) > 1e-9) return false;
        }
        // value-occupancy identity
        const double lhs = j_value(m, pi);
        double rhs = 0.0;
        for (int s = 0; s < m.n_states(); ++s)
            for (int a = 0; a < m.n_actions(); ++a)
                rhs += occ.joint(s, a) * m.reward_mean()(s, a);
        if (std::abs(lhs - rhs) > 1e-9) return false;
        (void)mu;
    }
    return true;
}

bool conjugacy(std::ostream& out) {
    // sup_{z<0} x z + g*(z) should equal -f*^{-1}(x) = 2 - 2 sqrt(x+1)
    for (int i = 0; i < 100; ++i) {
        const double x = -0.99 + (3.0 + 0.99) * i / 99.0;
        // coarse scan over [-12, 0) then one refinement pass around the argmax
        double best = -kInfinity, arg = -1.0;
        for (int k = 1; k <= 5000; ++k) {
            const double z = -12.0 * k / 5000.0;
            const double val = x * z + FenchelPair::g_star(z);
            if (val > best) {
                best = val;
                arg = z;
            }
        }
        const double h = 12.0 / 5000.0;
        for (int k = 0; k <= 5000; ++k) {
            const double z = std::min(arg + h - 2.0 * h * k / 5000.0, -1e-9);
            best = std::max(best, x * z + FenchelPair::g_star(z));
        }
        const double target = 2.0 - 2.0 * std::sqrt(x + 1.0);
        if (std::abs(best - target) > 1e-6) {
            out << "  conjugacy off by " << std::abs(best - target) << " at x=" << x << "\n";
            return false;
        }
    }
    for (int i = 0; i < 100; ++i) {
        const double x = -2.0 + 4.0 * i / 99.0;
        if (std::abs(FenchelPair::f_star_inv(FenchelPair::f_star(x)) - x) > 1e-10) return false;
    }
    return true;
}

bool oracle_residuals(std::ostream& out) {
    for (int k = 0; k < 25; ++k) {
        const TabularModel m = random_mdp(4, 2, 0.85, 500 + k);
        const DataDistribution mu = random_mu(4, 2, 600 + k);
        WeightFn w_star;
        try {
            w_star = optimal_weights(m, mu);
        } catch (const DataError&) {
            continue;
        }
        const InducedOccupancy ind = induced_occupancy(w_star, mu);
        const OccupancyMeasure occ = occupancy_of(m, policy_from_weights(w_star, mu));
        if ((ind.joint - occ.joint).cwiseAbs().maxCoeff() > 1e-9) {
            out << "  w* occupancy mismatch\n";
            return false;
        }
        const FenchelPair fen{(1.0 - m.discount()) / 4.0};
        const AuxFn u = u_star(m, mu, w_star, fen);
        const double u_bound = (fen.b_x * fen.b_x / 4.0 + fen.b_x) / (1.0 - m.discount());
        if (u.table.cwiseAbs().maxCoeff() > u_bound + 1e-12) return false;
    }
    return true;
}

bool penalty_invariance(std::ostream& out) {
    int checked = 0;
    for (int k = 0; k < 50; ++k) {
        const TabularModel m = random_mdp(3, 2, 0.8, 700 + k);
        const DataDistribution mu = random_mu(3, 2, 800 + k);
        WeightFn w_star;
        try {
            w_star = optimal_weights(m, mu);
        } catch (const DataError&) {
            continue;
        }
        FiniteClass<WeightFn> W;
        W.bounds.w_max = 100.0;
        W.members.push_back(w_star);
        Rng rng(900 + k);
        for (int j = 0; j < 3; ++j) {
            Mat noise(3, 2);
            for (int s = 0; s < 3; ++s)
                for (int a = 0; a < 2; ++a) noise(s, a) = 2.0 * rng.uniform01();
            W.members.push_back({noise});
        }
        FiniteClass<DualFn> V;
        V.bounds.v_abs = 100.0;
        V.members.push_back({plan_optimal(m).v_star});
        Vec v2(3);
        for (int s = 0; s < 3; ++s) v2[s] = rng.uniform01();
        V.members.push_back({v2});
        const InvarianceReport rep = alm_invariance_check(m, mu, W, V);
        if (!rep.holds) {
            out << "  invariance failed on draw " << k << "\n";
            return false;
        }
        ++checked;
    }
    return checked >= 40;
}

bool figure1_trichotomy(std::ostream&) {
    const ExperimentReport rep = run_figure1(0.9, 0.01);
    return all_checks_pass(rep);
}

}  // namespace

bool run_selftest(std::ostream& out) {
    struct Suite {
        const char* name;
        bool (*fn)(std::ostream&);
    };
    const Suite suites[] = {
        {"flow_conservation_and_value_identity", flow_conservation},
        {"fenchel_conjugacy", conjugacy},
        {"oracle_residuals", oracle_residuals},
        {"penalty_invariance", penalty_invariance},
        {"figure1_trichotomy", figure1_trichotomy},
    };
    bool all_ok = true;
    for (const auto& s : suites) {
        const bool ok = s.fn(out);
        out << "selftest " << s.name << ": " << (ok ? "pass" : "FAIL") << "\n";
        all_ok &= ok;
    }
    out << (all_ok ? "selftest: all suites passed\n" : "selftest: FAILURES\n");
    return all_ok;
}

}  // namespace coral
