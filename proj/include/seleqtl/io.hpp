#pragma once

#include "seleqtl/config.hpp"
#include "seleqtl/records.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace seleqtl {

// Panels from either a JSON-lines file, one {"gene_id", "variant_ids",
// "genotypes" (rows of samples), "expression"} object per line, or a
// directory holding expression.csv (gene_id, then one column per sample) and
// genotypes/<gene_id>.csv (header of variant ids, one row per sample).
// Constant genotype columns are dropped and expression is centered.
std::vector<GenePanel> read_panels(const std::string& path);
void write_panel(std::ostream& out, const std::string& gene_id, const Matrix& genotypes, const Vector& expression,
                 const std::vector<std::string>& variant_ids);

void write_screening(std::ostream& out, const ScreeningRecord& record);
std::vector<ScreeningRecord> read_screening(const std::string& path);

void write_inference_header(std::ostream& out);
void write_inference_row(std::ostream& out, const InferenceResult& r);
std::vector<InferenceResult> read_inference(const std::string& path);

// {"gene_id", "clusters": [{"cluster_id", "members", "prototype"}]} per line,
// with variant ids.
void write_clusters(std::ostream& out, const PreparedGene& gene);

void write_truth(std::ostream& out, const std::string& gene_id, const SyntheticTruth& truth);

struct SummaryRow {
    std::string method;
    std::string category;
    std::string metric;
    double value = 0.0;
};

void write_summary(std::ostream& out, const std::vector<SummaryRow>& rows);

void write_manifest(const std::string& path, const RunConfig& config, const std::string& command,
                    const std::vector<std::pair<std::string, std::string>>& extra);

std::string format_number(double v);

// Opens for writing or throws IoError.
std::ofstream open_output(const std::string& path);
void ensure_directory(const std::string& path);

} // namespace seleqtl
