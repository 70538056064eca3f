#pragma once

#include "seleqtl/data_model.hpp"
#include "seleqtl/linalg.hpp"
#include "seleqtl/metrics.hpp"
#include "seleqtl/pruning.hpp"

#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace seleqtl {

// A gene ready for analysis: the standardized cis-window and its pruned
// prototype panel. `index` keys the gene's random streams.
struct PreparedGene {
    std::size_t index = 0;
    GenePanel panel;
    PrunedPanel pruned;
    std::optional<SyntheticTruth> truth;
    Vector mu;  // noiseless mean, simulation only
};

// Everything Stage I and Stage II decided for one gene. This is the
// conditioning information later stages need, and the screening dump format.
struct ScreeningRecord {
    std::string gene_id;
    std::size_t variant_count = 0;
    std::size_t pruned_count = 0;
    double p_tilde = 1.0;
    std::size_t j0 = 0;
    double T0 = 0.0;
    double T_j0 = 0.0;
    double omega_j0 = 0.0;
    int s_j0 = 1;
    double sigma_j0 = 1.0;
    double gamma = 0.0;
    bool selected = false;
    std::size_t K0 = 0;
    std::size_t G = 0;
    double q = 0.1;
    double lambda = 0.0;
    double epsilon = 0.0;
    double tau = 0.0;
    Vector zeta;
    std::vector<std::size_t> E;  // pruned column indices
    std::vector<int> s_E;
    Vector beta_E;
    std::string status;  // empty when the gene completed

    bool quarantined() const { return !status.empty(); }
};

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct CoordinateRecord {
    InferenceResult adjusted;
    InferenceResult vanilla;
    double truth = kNaN;           // adaptive target at the model mean
    double pivot_at_truth = kNaN;
    double egene_residual = 0.0;
    double lasso_active_residual = 0.0;
    double lasso_inactive_residual = 0.0;
    bool retried = false;          // grid widened after an unbracketed root
    std::string status;            // empty when inference completed
};

struct GeneInference {
    std::string gene_id;
    std::vector<CoordinateRecord> coordinates;
    bool constraints_hold = true;
    bool rank_deficient = false;
    std::string status;
};

} // namespace seleqtl
