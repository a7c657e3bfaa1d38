#pragma once

#include "coral/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace coral {

// Tabular function-class members. Weight/aux/slope tables are S x A, duals
// are per-state. Strong types keep the four-argument objectives honest.
struct WeightFn { Mat table; };   // 0 <= w <= B_w
struct DualFn   { Vec table; };   // |v| <= B_v
struct AuxFn    { Mat table; };   // |u| <= B_u
struct SlopeFn  { Mat table; };   // -B_zu <= zeta <= -B_zl < 0

struct ClassBounds {
    double w_max = 0.0;      // B_w
    double v_abs = 0.0;      // B_v
    double u_abs = 0.0;      // B_u
    double zeta_lo = 0.0;    // B_{zeta,L} (magnitude lower bound)
    double zeta_hi = 0.0;    // B_{zeta,U}
};

struct BoundViolation {
    int s = -1, a = -1;
    double value = 0.0;
    std::string what;
};

template <typename T>
struct FiniteClass {
    std::vector<T> members;
    ClassBounds bounds;

    std::size_t size() const { return members.size(); }
    bool empty() const { return members.empty(); }
};

std::optional<BoundViolation> validate(const WeightFn& w, const ClassBounds& b);
std::optional<BoundViolation> validate(const DualFn& v, const ClassBounds& b);
std::optional<BoundViolation> validate(const AuxFn& u, const ClassBounds& b);
std::optional<BoundViolation> validate(const SlopeFn& z, const ClassBounds& b);

enum class RegularizerKind { shifted_square, plain_square };

/// Behavior-regularizer f with its curvature/size constants. B_f and B_f'
/// are computed from the weight bound at construction, which keeps the
/// alpha schedule consistent with the class actually in use.
struct RegularizerSpec {
    RegularizerKind kind;
    double m_f;       // strong convexity
    double b_f;       // sup |f| over [0, B_w]
    double b_fprime;  // sup |f'| over [0, B_w]

    double f(double x) const {
        return kind == RegularizerKind::shifted_square ? (x - 1.0) * (x - 1.0) : x * x;
    }
    double fprime(double x) const {
        return kind == RegularizerKind::shifted_square ? 2.0 * (x - 1.0) : 2.0 * x;
    }
    double fprime_inv(double y) const {
        return kind == RegularizerKind::shifted_square ? y / 2.0 + 1.0 : y / 2.0;
    }

    static RegularizerSpec make(RegularizerKind kind, double w_max);
};

/// Regularization strength from the suboptimality analysis:
/// alpha = 16((B_w+1)(B_v+1)+B_f)/M_f * sqrt(log(|V||W|/delta)/n).
double alpha_schedule(double b_w, double b_v, double b_f, double m_f,
                      std::size_t card_w, std::size_t card_v, double delta,
                      std::size_t n);

/// All weight tables on a uniform Cartesian grid over [0, bound].
FiniteClass<WeightFn> build_tabular_grid_class(int n_states, int n_actions,
                                               double bound, int grid_levels);

}  // namespace coral
