#include "coral/classes.hpp"

#include <cmath>

namespace coral {

namespace {

std::optional<BoundViolation> scan_table(const Mat& t, double lo, double hi,
                                         const std::string& what) {
    for (int s = 0; s < t.rows(); ++s)
        for (int a = 0; a < t.cols(); ++a)
            if (t(s, a) < lo || t(s, a) > hi)
                return BoundViolation{s, a, t(s, a), what};
    return std::nullopt;
}

}  // namespace

std::optional<BoundViolation> validate(const WeightFn& w, const ClassBounds& b) {
    return scan_table(w.table, 0.0, b.w_max, "weight out of [0,B_w]");
}

std::optional<BoundViolation> validate(const DualFn& v, const ClassBounds& b) {
    for (int s = 0; s < v.table.size(); ++s)
        if (std::abs(v.table[s]) > b.v_abs)
            return BoundViolation{s, -1, v.table[s], "dual out of [-B_v,B_v]"};
    return std::nullopt;
}

std::optional<BoundViolation> validate(const AuxFn& u, const ClassBounds& b) {
    return scan_table(u.table, -b.u_abs, b.u_abs, "aux out of [-B_u,B_u]");
}

std::optional<BoundViolation> validate(const SlopeFn& z, const ClassBounds& b) {
    return scan_table(z.table, -b.zeta_hi, -b.zeta_lo, "slope out of [-B_zu,-B_zl]");
}

RegularizerSpec RegularizerSpec::make(RegularizerKind kind, double w_max) {
    if (w_max <= 0.0) throw std::invalid_argument("regularizer needs a positive weight bound");
    RegularizerSpec spec;
    spec.kind = kind;
    spec.m_f = 2.0;  // both shipped kinds are quadratics
    if (kind == RegularizerKind::shifted_square) {
        spec.b_f = std::max(1.0, (w_max - 1.0) * (w_max - 1.0));
        spec.b_fprime = std::max(2.0, 2.0 * (w_max - 1.0));
    } else {
        spec.b_f = w_max * w_max;
        spec.b_fprime = 2.0 * w_max;
    }
    return spec;
}

double alpha_schedule(double b_w, double b_v, double b_f, double m_f,
                      std::size_t card_w, std::size_t card_v, double delta,
                      std::size_t n) {
    if (b_w <= 0.0 || b_v <= 0.0 || b_f <= 0.0 || m_f <= 0.0)
        throw std::invalid_argument("alpha_schedule: bounds must be positive");
    if (card_w == 0 || card_v == 0)
        throw std::invalid_argument("alpha_schedule: empty class");
    if (delta <= 0.0 || delta >= 1.0)
        throw std::invalid_argument("alpha_schedule: delta must lie in (0,1)");
    if (n == 0) throw std::invalid_argument("alpha_schedule: n must be >= 1");
    const double log_term =
        std::log(static_cast<double>(card_w) * static_cast<double>(card_v) / delta);
    return 16.0 * ((b_w + 1.0) * (b_v + 1.0) + b_f) / m_f *
           std::sqrt(log_term / static_cast<double>(n));
}

FiniteClass<WeightFn> build_tabular_grid_class(int n_states, int n_actions,
                                               double bound, int grid_levels) {
    if (n_states <= 0 || n_actions <= 0)
        throw std::invalid_argument("grid class: empty shape");
    if (grid_levels < 1) throw std::invalid_argument("grid class: need at least one level");
    const int cells = n_states * n_actions;
    double total = 1.0;
    for (int c = 0; c < cells; ++c) {
        total *= grid_levels;
        if (total > 2e6) throw std::invalid_argument("grid class would exceed 2e6 members");
    }
    FiniteClass<WeightFn> out;
    out.bounds.w_max = bound;
    std::vector<int> odo(cells, 0);
    const auto level_value = [&](int l) {
        return grid_levels == 1 ? 0.0 : bound * l / (grid_levels - 1);
    };
    while (true) {
        Mat t(n_states, n_actions);
        for (int c = 0; c < cells; ++c)
            t(c / n_actions, c % n_actions) = level_value(odo[c]);
        out.members.push_back({t});
        int c = cells - 1;
        while (c >= 0 && ++odo[c] == grid_levels) odo[c--] = 0;
        if (c < 0) break;
    }
    return out;
}

}  // namespace coral
