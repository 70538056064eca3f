#pragma once

#include "seleqtl/grid_inference.hpp"
#include "seleqtl/selection_law.hpp"

#include <array>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace seleqtl {

struct InferenceResult {
    std::string gene_id;
    std::string variant_id;
    std::size_t coordinate = 0;     // position in E
    std::size_t variant_index = 0;  // column in the unpruned panel
    double b_hat = 0.0;
    double sigma = 0.0;             // standard deviation of b_hat
    double pivot_at_zero = 0.5;
    double p_two_sided = 1.0;
    Interval ci;
    double mle = 0.0;
    bool reported = false;
};

InferenceResult vanilla_inference(const AdaptiveTarget& target, std::size_t j, double alpha);

// Sets `reported` to 0 outside the interval; returns the reported variant
// ids keyed by gene.
std::map<std::string, std::vector<std::string>> post_inference_report(std::vector<InferenceResult>& results,
                                                                      double alpha);

inline constexpr std::size_t kCausalCategories = 10;

struct CoverageRecord {
    std::size_t causal_count = 0;
    double truth = 0.0;
    double estimate = 0.0;
    Interval ci;
};

struct CategoryStats {
    std::size_t count = 0;
    double coverage = 0.0;
    double mean_length = 0.0;
    double risk = 0.0;
};

struct CoverageSummary {
    std::array<CategoryStats, kCausalCategories> by_category{};
    CategoryStats pooled;
};

// Closed intervals: a truth on the boundary counts as covered.
CoverageSummary coverage_length_risk(std::span<const CoverageRecord> records);

// One gene's selections against its truth; variant indices refer to the
// unpruned panel and cluster_of maps each of them to its cluster.
struct GeneDiscovery {
    bool egene_selected = false;
    std::vector<std::size_t> causal;
    std::vector<std::size_t> cluster_of;
    std::vector<std::size_t> selected_variants;
    std::vector<std::size_t> reported_variants;
};

struct DiscoveryRates {
    double egene_fdp = 0.0;
    double egene_power = 0.0;
    double evariant_fdp_pre = 0.0;
    double evariant_fdp_post = 0.0;
    double evariant_power = 0.0;
    std::size_t egenes = 0;
    std::size_t non_null_genes = 0;
    std::size_t causal_variants = 0;
};

// Discoveries are correct when their cluster holds a causal variant; a
// causal variant is found when its own cluster's prototype is reported.
// Empty ratios are 0.
DiscoveryRates fdr_power(std::span<const GeneDiscovery> genes);

} // namespace seleqtl
