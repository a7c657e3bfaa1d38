#pragma once

#include "coral/classes.hpp"
#include "coral/data.hpp"
#include "coral/objectives.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace coral {

struct SaddleSolution {
    int w_index = -1;
    int v_index = -1;
    int u_index = -1;     // -1 when no U class
    int zeta_index = -1;  // -1 when no Z class
    double objective = 0.0;
    std::vector<double> outer_values;  // min-max value per W member (finite mode)
    // gradient mode diagnostics
    int steps = 0;
    double gap_estimate = 0.0;
    bool converged = false;
    Mat w_table;  // chosen weights (both modes)
    Vec v_table;
};

/// Exact nested enumeration max_w min_v [min_u [max_zeta]]; innermost level
/// is evaluated first and ties break toward the lowest member index at every
/// level. eval receives (iw, iv, iu, iz) with -1 for absent classes.
SaddleSolution solve_finite(
    std::size_t n_w, std::size_t n_v, std::size_t n_u, std::size_t n_z,
    const std::function<double(int, int, int, int)>& eval);

enum class BanditAlgorithm { pro_mab, alm_mab, pro_cb, alm_cb };

struct GdaConfig {
    int steps = 20000;
    double step_w = 0.05;
    double step_v = 0.05;
    bool average = true;    // average the second half of the trajectory
    double tol = 1e-3;      // declare convergence when the probe gap is below
    int probe_levels = 5;   // grid resolution of the duality-gap probe
};

/// Projected gradient ascent on w / descent on v over box classes
/// [0,B_w]^{SxA} x [-B_v,B_v]^S for the bandit/CB objectives. The CORAL
/// objectives are finite-mode only.
SaddleSolution solve_gda(BanditAlgorithm algo, const OfflineDataset& data,
                         const DataDistribution& mu, double alpha,
                         const RegularizerSpec& spec, const ClassBounds& bounds,
                         const GdaConfig& config);

/// Analytic gradient of the empirical bandit/CB objective at (w, v);
/// exposed for the finite-difference checks.
void gda_gradients(BanditAlgorithm algo, const OfflineDataset& data,
                   const DataDistribution& mu, double alpha,
                   const RegularizerSpec& spec, const Mat& w, const Vec& v,
                   Mat& grad_w, Vec& grad_v);

/// Maximum-likelihood transitions from a transition dataset.
/// Finite class: member maximizing the log-likelihood (ties -> lowest index;
/// members assigning probability zero to an observed move score -inf).
/// Tabular: add-lambda smoothed empirical rows, uniform where unseen.
Mat mle_transitions_tabular(const ModelDataset& data, int n_states, int n_actions,
                            double lambda = 0.5);
int mle_transitions_finite(const ModelDataset& data, const std::vector<Mat>& members);

}  // namespace coral
