#include "seleqtl/metrics.hpp"

#include "seleqtl/error.hpp"
#include "seleqtl/normal.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace seleqtl {

InferenceResult vanilla_inference(const AdaptiveTarget& target, std::size_t j, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::InvalidArgument, "alpha must lie in (0, 1)");
    if (j >= target.size()) throw Error(ErrorCode::InvalidArgument, "target coordinate out of range");
    InferenceResult r;
    r.gene_id = target.gene_id;
    r.coordinate = j;
    r.b_hat = target.estimate(j);
    r.sigma = target.scale(j);
    const double z = normal::upper_quantile(0.5 * alpha);
    r.ci = {r.b_hat - z * r.sigma, r.b_hat + z * r.sigma};
    r.pivot_at_zero = normal::cdf(r.b_hat / r.sigma);
    r.p_two_sided = 2.0 * normal::sf(std::abs(r.b_hat) / r.sigma);
    r.mle = r.b_hat;
    r.reported = !r.ci.contains(0.0);
    return r;
}

std::map<std::string, std::vector<std::string>> post_inference_report(std::vector<InferenceResult>& results,
                                                                      double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::InvalidArgument, "alpha must lie in (0, 1)");
    std::map<std::string, std::vector<std::string>> reported;
    for (auto& r : results) {
        r.reported = !r.ci.contains(0.0);
        auto& ids = reported[r.gene_id];
        if (r.reported) ids.push_back(r.variant_id);
    }
    return reported;
}

namespace {

void accumulate(CategoryStats& s, const CoverageRecord& r) {
    ++s.count;
    s.coverage += r.ci.contains(r.truth) ? 1.0 : 0.0;
    s.mean_length += r.ci.length();
    const double d = r.estimate - r.truth;
    s.risk += d * d;
}

void finish(CategoryStats& s) {
    if (s.count == 0) return;
    const auto n = static_cast<double>(s.count);
    s.coverage /= n;
    s.mean_length /= n;
    s.risk /= n;
}

} // namespace

CoverageSummary coverage_length_risk(std::span<const CoverageRecord> records) {
    CoverageSummary out;
    for (const auto& r : records) {
        if (r.causal_count >= kCausalCategories) throw Error(ErrorCode::InvalidArgument, "causal count out of range");
        accumulate(out.by_category[r.causal_count], r);
        accumulate(out.pooled, r);
    }
    for (auto& s : out.by_category) finish(s);
    finish(out.pooled);
    return out;
}

namespace {

double ratio(std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

} // namespace

DiscoveryRates fdr_power(std::span<const GeneDiscovery> genes) {
    DiscoveryRates out;
    std::size_t false_egenes = 0, true_egenes = 0;
    std::size_t pre = 0, pre_false = 0, post = 0, post_false = 0, found = 0;
    for (const auto& g : genes) {
        const bool null_gene = g.causal.empty();
        if (!null_gene) ++out.non_null_genes;
        out.causal_variants += g.causal.size();
        if (!g.egene_selected) continue;
        ++out.egenes;
        if (null_gene) ++false_egenes; else ++true_egenes;

        std::set<std::size_t> causal_clusters;
        for (std::size_t c : g.causal) causal_clusters.insert(g.cluster_of.at(c));
        auto is_false = [&](std::size_t v) { return causal_clusters.count(g.cluster_of.at(v)) == 0; };

        pre += g.selected_variants.size();
        for (std::size_t v : g.selected_variants) pre_false += is_false(v) ? 1 : 0;
        post += g.reported_variants.size();
        for (std::size_t v : g.reported_variants) post_false += is_false(v) ? 1 : 0;

        std::set<std::size_t> reported_clusters;
        for (std::size_t v : g.reported_variants) reported_clusters.insert(g.cluster_of.at(v));
        for (std::size_t c : g.causal) found += reported_clusters.count(g.cluster_of.at(c));
    }
    out.egene_fdp = ratio(false_egenes, out.egenes);
    out.egene_power = ratio(true_egenes, out.non_null_genes);
    out.evariant_fdp_pre = ratio(pre_false, pre);
    out.evariant_fdp_post = ratio(post_false, post);
    out.evariant_power = ratio(found, out.causal_variants);
    return out;
}

} // namespace seleqtl
