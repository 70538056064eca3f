#pragma once

#include "seleqtl/config.hpp"
#include "seleqtl/io.hpp"
#include "seleqtl/grid_inference.hpp"
#include "seleqtl/lasso.hpp"
#include "seleqtl/records.hpp"
#include "seleqtl/selection_law.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace seleqtl {

GenotypeDesign genotype_design(const RunConfig& config);

double ridge_weight(const RunConfig& config, Index n);

// Prunes each panel; `index` follows input order.
std::vector<PreparedGene> prepare_genes(std::vector<GenePanel> panels, const RunConfig& config);

// Simulated cis-windows, fixed across replicates.
std::vector<PreparedGene> simulate_gene_panels(const RunConfig& config);

// Draws the causal structure and expression of replicate `replicate`.
void draw_replicate(std::vector<PreparedGene>& genes, const RunConfig& config, std::uint64_t replicate);

// Stage I statistics for every gene, BH across genes, and the randomized
// LASSO for every eGene. With `stage_two` false only the eGene step runs.
std::vector<ScreeningRecord> screen_genes(const std::vector<PreparedGene>& genes, const RunConfig& config,
                                          std::uint64_t replicate, bool stage_two = true);

// The observed selection of one eGene, rebuilt from its screening record.
struct SelectionContext {
    LassoSolution solution;
    Matrix XE;
    AdaptiveTarget target;
    ScreeningOutcome outcome;  // only the j0 entries are populated
    double L = 0.0;
    Vector x_j0;
};

// Throws on rank deficiency or a record inconsistent with the data.
SelectionContext selection_context(const PreparedGene& gene, const ScreeningRecord& record, const RunConfig& config);

EGeneKktMap egene_map(const PreparedGene& gene, const SelectionContext& ctx, std::size_t j);
LassoKktMap lasso_map(const PreparedGene& gene, const SelectionContext& ctx, std::size_t j, const RunConfig& config);

ReferenceGrid reference_grid(const EGeneKktMap& em, const LassoKktMap& lm, const SelectionContext& ctx, std::size_t j,
                             ReferenceMethod method, const GridOptions& options);

// Rebuilds the maps from the screening record and runs adjusted and naive
// inference on every selected coordinate. Failures are recorded, not thrown.
GeneInference infer_gene(const PreparedGene& gene, const ScreeningRecord& record, const RunConfig& config);

std::vector<GeneInference> infer_genes(const std::vector<PreparedGene>& genes,
                                       const std::vector<ScreeningRecord>& records, const RunConfig& config);

struct PipelineResult {
    std::vector<ScreeningRecord> screening;
    std::vector<GeneInference> inference;
    std::size_t quarantined_genes = 0;
    std::size_t quarantined_coordinates = 0;
    double max_residual = 0.0;
};

// prune -> screen -> BH -> LASSO -> maps -> inference -> report, writing the
// screening dump, inference CSV, cluster and summary files and a manifest
// into config.output_dir. Simulate mode runs replicate 0 of the simulation
// design and also writes the truth.
PipelineResult run_pipeline(const RunConfig& config);

// Inference CSV text for a pipeline result, in gene order.
std::string inference_csv(const PipelineResult& result);

struct StudySummary {
    std::vector<SummaryRow> rows;
    std::size_t replicates = 0;
    std::size_t coordinates = 0;
    double coverage = kNaN;
    double vanilla_coverage_low_count = kNaN;  // genes with at most two causal variants
    double median_length_ratio = kNaN;
    double adjusted_risk = kNaN;
    double vanilla_risk = kNaN;
    double egene_fdr = kNaN;
    double egene_fdr_se = kNaN;
    double pivot_ks = kNaN;
    std::size_t pivots = 0;
    double max_residual = 0.0;
    bool constraints_hold = true;
    std::size_t quarantined_genes = 0;
    std::size_t quarantined_coordinates = 0;
    std::size_t rank_deficient_genes = 0;
    double seconds = 0.0;
};

// Full proposed-versus-vanilla comparison over config.replicates replicates.
// Writes summary.csv, coordinates.csv and a manifest when `write` is set.
StudySummary run_simulation_study(const RunConfig& config, bool write = true);

struct OracleRow {
    std::size_t instance = 0;
    std::string gene_id;
    double b_hat = 0.0;
    double sigma = 0.0;
    double max_discrepancy = 0.0;
    double at_b = 0.0;
};

struct OracleReport {
    std::vector<OracleRow> rows;
    std::size_t attempts = 0;
    double max_discrepancy = 0.0;
    bool passed = false;
};

// Generates |E| = 1 instances and compares Chernoff and quadrature pivots
// over b_hat +- oracle_b_half_width * sigma.
OracleReport run_oracle_check(const RunConfig& config, bool write = true);

// Kolmogorov-Smirnov distance of a sample from Uniform[0, 1].
double ks_uniform(std::vector<double> sample);

} // namespace seleqtl
