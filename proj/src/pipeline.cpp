#include "seleqtl/pipeline.hpp"

#include "seleqtl/error.hpp"
#include "seleqtl/parallel.hpp"
#include "seleqtl/reference.hpp"
#include "seleqtl/rng.hpp"
#include "seleqtl/screening.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

namespace seleqtl {

GenotypeDesign genotype_design(const RunConfig& config) {
    GenotypeDesign d;
    d.samples = config.samples;
    d.variants = config.variants;
    d.max_block = config.max_block;
    return d;
}

double ridge_weight(const RunConfig& config, Index n) {
    return config.epsilon_rule == EpsilonRule::Fixed ? config.epsilon : default_ridge(n);
}

std::vector<PreparedGene> prepare_genes(std::vector<GenePanel> panels, const RunConfig& config) {
    std::vector<PreparedGene> genes(panels.size());
    parallel_for(panels.size(), config.workers, [&](std::size_t i) {
        genes[i].index = i;
        genes[i].pruned = prune(panels[i], config.rho0);
        genes[i].panel = std::move(panels[i]);
    });
    return genes;
}

namespace {

std::string gene_name(std::size_t g) {
    std::ostringstream os;
    os << "gene" << std::setw(4) << std::setfill('0') << g;
    return os.str();
}

} // namespace

std::vector<PreparedGene> simulate_gene_panels(const RunConfig& config) {
    const GenotypeDesign design = genotype_design(config);
    std::vector<PreparedGene> genes(config.genes);
    parallel_for(config.genes, config.workers, [&](std::size_t g) {
        Rng rng = make_stream(config.seed, g, StreamTag::Genotype);
        const Matrix raw = simulate_genotypes(design, rng);
        std::vector<std::string> ids;
        for (Index j = 0; j < raw.cols(); ++j) ids.push_back(gene_name(g) + "_v" + std::to_string(j));
        genes[g].index = g;
        genes[g].panel = make_panel(gene_name(g), raw, Vector::Zero(raw.rows()), std::move(ids));
        genes[g].pruned = prune(genes[g].panel, config.rho0);
    });
    return genes;
}

void draw_replicate(std::vector<PreparedGene>& genes, const RunConfig& config, std::uint64_t replicate) {
    const std::vector<double> counts = default_causal_count_distribution();
    parallel_for(genes.size(), config.workers, [&](std::size_t i) {
        auto& g = genes[i];
        SyntheticTruth truth;
        if (!config.null_only) {
            Rng rng = make_stream(config.seed, g.index, StreamTag::CausalStructure, replicate);
            truth = sample_causal_structure(g.pruned.tree.clusters, counts, config.effect_size, rng);
        }
        Rng rng = make_stream(config.seed, g.index, StreamTag::Expression, replicate);
        SyntheticExpression expr = synthesize_expression(g.panel.X, truth, rng);
        g.panel.y = expr.y;
        g.pruned.panel.y = std::move(expr.y);
        g.mu = std::move(expr.mu);
        g.truth = std::move(truth);
    });
}

namespace {

void run_stage_two(const PreparedGene& gene, ScreeningRecord& rec, const RunConfig& config, std::uint64_t replicate) {
    const Matrix& Xp = gene.pruned.panel.X;
    const Vector& y = gene.pruned.panel.y;
    const double sigma = config.noise == NoiseMode::Known ? 1.0 : rec.sigma_j0;

    Rng lambda_rng = make_stream(config.seed, gene.index, StreamTag::LambdaDraws, replicate);
    rec.lambda = theoretical_lambda(Xp, sigma, lambda_rng, config.lambda_draws);
    rec.epsilon = ridge_weight(config, Xp.rows());
    rec.tau = config.tau();
    Rng zeta_rng = make_stream(config.seed, gene.index, StreamTag::LassoRandomization, replicate);
    rec.zeta = draw_lasso_randomization(Xp.cols(), rec.tau, zeta_rng);

    const LassoSolution sol = randomized_lasso_solve(Xp, y, rec.lambda, rec.epsilon, rec.zeta);
    rec.E = sol.active;
    rec.s_E = sol.signs;
    rec.beta_E = sol.o_active;
}

} // namespace

std::vector<ScreeningRecord> screen_genes(const std::vector<PreparedGene>& genes, const RunConfig& config,
                                          std::uint64_t replicate, bool stage_two) {
    const std::size_t G = genes.size();
    std::vector<ScreeningRecord> records(G);
    parallel_for(G, config.workers, [&](std::size_t i) {
        const auto& gene = genes[i];
        auto& rec = records[i];
        rec.gene_id = gene.panel.gene_id;
        rec.variant_count = static_cast<std::size_t>(gene.panel.variant_count());
        rec.pruned_count = static_cast<std::size_t>(gene.pruned.panel.variant_count());
        rec.gamma = config.gamma();
        rec.q = config.q;
        try {
            Rng rng = make_stream(config.seed, gene.index, StreamTag::StageOneRandomization, replicate);
            ScreeningOutcome out;
            if (config.noise == NoiseMode::Known) {
                out = randomized_t(gene.panel, NoiseScale{1.0, NoiseSource::Known}, rec.gamma, rng);
            } else {
                std::vector<double> sigmas(rec.variant_count);
                for (std::size_t j = 0; j < sigmas.size(); ++j)
                    sigmas[j] = estimate_sigma_marginal(gene.panel.X.col(static_cast<Index>(j)), gene.panel.y).sigma;
                out = randomized_t(gene.panel, sigmas, rec.gamma, rng);
            }
            rec.p_tilde = out.p_tilde;
            rec.j0 = out.j0;
            rec.T0 = out.T0;
            rec.T_j0 = out.T_j0();
            rec.omega_j0 = out.omega_j0();
            rec.s_j0 = out.s_j0;
            rec.sigma_j0 = out.sigma_j0;
        } catch (const Error& e) {
            rec.status = e.what();
            rec.p_tilde = 1.0;
        }
    });

    std::vector<double> p_tildes(G);
    std::vector<std::string> ids(G);
    for (std::size_t i = 0; i < G; ++i) {
        p_tildes[i] = records[i].p_tilde;
        ids[i] = records[i].gene_id;
    }
    const EGeneSelection sel = bh_select(p_tildes, ids, config.q);
    for (auto& r : records) {
        r.K0 = sel.K0;
        r.G = G;
    }
    for (std::size_t i : sel.selected) records[i].selected = true;
    if (!stage_two) return records;

    parallel_for(sel.selected.size(), config.workers, [&](std::size_t k) {
        const std::size_t i = sel.selected[k];
        try {
            run_stage_two(genes[i], records[i], config, replicate);
        } catch (const Error& e) {
            records[i].status = e.what();
        }
    });
    return records;
}

SelectionContext selection_context(const PreparedGene& gene, const ScreeningRecord& rec, const RunConfig& config) {
    const Matrix& Xp = gene.pruned.panel.X;
    const Vector& y = gene.pruned.panel.y;
    if (rec.zeta.size() != Xp.cols() || rec.E.size() != static_cast<std::size_t>(rec.beta_E.size()))
        throw Error(ErrorCode::InvalidArgument, "screening record does not match the pruned panel");
    if (rec.j0 >= static_cast<std::size_t>(gene.panel.variant_count()))
        throw Error(ErrorCode::InvalidArgument, "screening record j0 out of range");

    Vector beta = Vector::Zero(Xp.cols());
    for (std::size_t k = 0; k < rec.E.size(); ++k) {
        if (rec.E[k] >= static_cast<std::size_t>(Xp.cols()))
            throw Error(ErrorCode::InvalidArgument, "screening record E out of range");
        beta[static_cast<Index>(rec.E[k])] = rec.beta_E[static_cast<Index>(k)];
    }

    SelectionContext ctx;
    ctx.solution = complete_lasso_solution(Xp, y, rec.lambda, rec.epsilon, rec.zeta, beta);
    if (ctx.solution.active != rec.E || ctx.solution.signs != rec.s_E)
        throw Error(ErrorCode::InvalidArgument, "stored LASSO solution does not reproduce its active set");

    ctx.XE = select_columns(Xp, ctx.solution.active);
    const double noise = config.noise == NoiseMode::Known ? 1.0 : estimate_sigma_refit(ctx.XE, y).sigma;
    ctx.target = adaptive_target(ctx.XE, y, noise);
    ctx.target.gene_id = rec.gene_id;

    const auto V = gene.panel.variant_count();
    ctx.outcome.T = Vector::Zero(V);
    ctx.outcome.omega = Vector::Zero(V);
    ctx.outcome.j0 = rec.j0;
    ctx.outcome.T[static_cast<Index>(rec.j0)] = rec.T_j0;
    ctx.outcome.omega[static_cast<Index>(rec.j0)] = rec.omega_j0;
    ctx.outcome.T0 = rec.T0;
    ctx.outcome.s_j0 = rec.s_j0;
    ctx.outcome.sigma_j0 = rec.sigma_j0;
    ctx.outcome.gamma = rec.gamma;
    ctx.outcome.p_tilde = rec.p_tilde;

    ctx.L = egene_threshold(rec.K0, rec.variant_count, rec.G, rec.q, rec.gamma, rec.T0);
    ctx.x_j0 = gene.panel.X.col(static_cast<Index>(rec.j0));
    return ctx;
}

EGeneKktMap egene_map(const PreparedGene& gene, const SelectionContext& ctx, std::size_t j) {
    return build_egene_map(ctx.x_j0, gene.panel.y, ctx.XE, ctx.target, j, ctx.outcome, ctx.L);
}

LassoKktMap lasso_map(const PreparedGene& gene, const SelectionContext& ctx, std::size_t j, const RunConfig& config) {
    return build_lasso_map(gene.pruned.panel.X, gene.pruned.panel.y, ctx.solution, ctx.target, j, config.tau());
}

ReferenceGrid reference_grid(const EGeneKktMap& em, const LassoKktMap& lm, const SelectionContext& ctx, std::size_t j,
                             ReferenceMethod method, const GridOptions& options) {
    const double b_hat = ctx.target.estimate(j);
    ReferenceGrid grid;
    grid.points = build_grid(b_hat, ctx.target.scale(j), options);
    if (method == ReferenceMethod::Chernoff) {
        grid.provenance = ReferenceKind::Chernoff;
        grid.log_ref = chernoff_log_reference(grid.points, b_hat, em, lm, inner_start(lm, ctx.solution.o_active));
    } else {
        grid.provenance = ReferenceKind::Quadrature;
        grid.log_ref.resize(grid.points.size());
        for (std::size_t i = 0; i < grid.points.size(); ++i)
            grid.log_ref[i] = quadrature_log_reference(grid.points[i], em, lm);
    }
    validate(grid);
    return grid;
}

namespace {

void adjusted_inference(CoordinateRecord& rec, const EGeneKktMap& em, const LassoKktMap& lm,
                        const SelectionContext& ctx, std::size_t j, const RunConfig& config) {
    const double b_hat = ctx.target.estimate(j);
    const double scale = ctx.target.scale(j);
    GridOptions options{config.grid_half_width, config.grid_points};
    ReferenceGrid grid;
    Interval ci;
    for (int attempt = 0;; ++attempt) {
        grid = reference_grid(em, lm, ctx, j, config.reference, options);
        try {
            ci = confidence_interval(grid, b_hat, scale, config.alpha);
            break;
        } catch (const Error& e) {
            if (e.code() != ErrorCode::RootNotBracketed || attempt == 1) throw;
            options.half_width *= 2.0;
            options.points = 2 * options.points - 1;
            rec.retried = true;
        }
    }
    auto& r = rec.adjusted;
    r.b_hat = b_hat;
    r.sigma = scale;
    r.ci = ci;
    r.pivot_at_zero = pivot(grid, b_hat, 0.0, scale);
    r.p_two_sided = two_sided_p(r.pivot_at_zero);
    r.mle = selection_mle(grid, b_hat, scale);
    r.reported = !ci.contains(0.0);
    if (std::isfinite(rec.truth)) rec.pivot_at_truth = pivot(grid, b_hat, rec.truth, scale);
}

} // namespace

GeneInference infer_gene(const PreparedGene& gene, const ScreeningRecord& rec, const RunConfig& config) {
    GeneInference gi;
    gi.gene_id = rec.gene_id;
    if (!rec.selected || rec.quarantined() || rec.E.empty()) return gi;
    SelectionContext ctx;
    try {
        ctx = selection_context(gene, rec, config);
    } catch (const Error& e) {
        gi.status = e.what();
        gi.rank_deficient = e.code() == ErrorCode::RankDeficient;
        return gi;
    }
    const Vector truth = gene.mu.size() > 0 ? adaptive_truth(ctx.XE, gene.mu) : Vector();

    for (std::size_t j = 0; j < ctx.target.size(); ++j) {
        CoordinateRecord c;
        const std::size_t column = ctx.solution.active[j];
        c.vanilla = vanilla_inference(ctx.target, j, config.alpha);
        c.adjusted.gene_id = c.vanilla.gene_id = rec.gene_id;
        c.adjusted.variant_id = c.vanilla.variant_id = gene.pruned.panel.variant_ids[column];
        c.adjusted.variant_index = c.vanilla.variant_index = gene.pruned.columns[column];
        c.adjusted.coordinate = c.vanilla.coordinate = j;
        if (truth.size() > 0) c.truth = truth[static_cast<Index>(j)];
        try {
            const EGeneKktMap em = egene_map(gene, ctx, j);
            const LassoKktMap lm = lasso_map(gene, ctx, j, config);
            c.egene_residual = egene_reconstruction_residual(em, ctx.target.estimate(j), ctx.outcome);
            const auto lr = lasso_reconstruction_residual(lm, ctx.target.estimate(j), ctx.solution);
            c.lasso_active_residual = lr.active;
            c.lasso_inactive_residual = lr.inactive;
            if (!observed_constraints_hold(em, ctx.outcome, ctx.solution)) gi.constraints_hold = false;
            adjusted_inference(c, em, lm, ctx, j, config);
        } catch (const Error& e) {
            c.status = e.what();
        }
        gi.coordinates.push_back(std::move(c));
    }
    return gi;
}

std::vector<GeneInference> infer_genes(const std::vector<PreparedGene>& genes,
                                       const std::vector<ScreeningRecord>& records, const RunConfig& config) {
    if (genes.size() != records.size()) throw Error(ErrorCode::InvalidArgument, "one screening record per gene required");
    std::vector<GeneInference> out(genes.size());
    parallel_for(genes.size(), config.workers, [&](std::size_t i) {
        if (genes[i].panel.gene_id != records[i].gene_id)
            throw Error(ErrorCode::InvalidArgument, "screening record order does not match the panels");
        out[i] = infer_gene(genes[i], records[i], config);
    });
    return out;
}

namespace {

double max_residual(const CoordinateRecord& c) {
    return std::max({c.egene_residual, c.lasso_active_residual, c.lasso_inactive_residual});
}

GeneDiscovery discovery(const PreparedGene& gene, const ScreeningRecord& rec, const GeneInference& gi, bool vanilla) {
    GeneDiscovery d;
    d.egene_selected = rec.selected;
    if (gene.truth) d.causal = gene.truth->causal_indices;
    d.cluster_of = gene.pruned.tree.cluster_of;
    for (const auto& c : gi.coordinates) {
        if (!c.status.empty()) continue;
        d.selected_variants.push_back(c.adjusted.variant_index);
        if ((vanilla ? c.vanilla : c.adjusted).reported) d.reported_variants.push_back(c.adjusted.variant_index);
    }
    return d;
}

void append_rates(std::vector<SummaryRow>& rows, const std::string& method, const std::string& category,
                  const DiscoveryRates& r) {
    rows.push_back({method, category, "egene_fdr", r.egene_fdp});
    rows.push_back({method, category, "egene_power", r.egene_power});
    rows.push_back({method, category, "evariant_fdp_pre", r.evariant_fdp_pre});
    rows.push_back({method, category, "evariant_fdp_post", r.evariant_fdp_post});
    rows.push_back({method, category, "evariant_power", r.evariant_power});
}

} // namespace

std::string inference_csv(const PipelineResult& result) {
    std::ostringstream os;
    write_inference_header(os);
    for (const auto& gi : result.inference)
        for (const auto& c : gi.coordinates)
            if (c.status.empty()) write_inference_row(os, c.adjusted);
    return os.str();
}

PipelineResult run_pipeline(const RunConfig& config) {
    validate(config);
    ensure_directory(config.output_dir);
    std::vector<PreparedGene> genes;
    if (config.mode == RunMode::Simulate) {
        genes = simulate_gene_panels(config);
        draw_replicate(genes, config, 0);
    } else {
        genes = prepare_genes(read_panels(config.input), config);
    }

    PipelineResult result;
    result.screening = screen_genes(genes, config, 0);
    result.inference = infer_genes(genes, result.screening, config);

    const std::string dir = config.output_dir + "/";
    {
        auto out = open_output(dir + "screening.jsonl");
        for (const auto& r : result.screening) write_screening(out, r);
    }
    {
        auto out = open_output(dir + "clusters.jsonl");
        for (const auto& g : genes) write_clusters(out, g);
    }
    {
        auto out = open_output(dir + "inference.csv");
        out << inference_csv(result);
    }
    if (config.mode == RunMode::Simulate) {
        auto out = open_output(dir + "truth.jsonl");
        for (const auto& g : genes) write_truth(out, g.panel.gene_id, *g.truth);
    }

    std::size_t egenes = 0, pre = 0, post = 0, post_vanilla = 0;
    std::vector<GeneDiscovery> adj, van;
    for (std::size_t i = 0; i < genes.size(); ++i) {
        const auto& rec = result.screening[i];
        const auto& gi = result.inference[i];
        if (rec.selected) ++egenes;
        if (rec.quarantined() || !gi.status.empty()) ++result.quarantined_genes;
        for (const auto& c : gi.coordinates) {
            result.max_residual = std::max(result.max_residual, max_residual(c));
            if (!c.status.empty()) {
                ++result.quarantined_coordinates;
                continue;
            }
            ++pre;
            post += c.adjusted.reported ? 1 : 0;
            post_vanilla += c.vanilla.reported ? 1 : 0;
        }
        adj.push_back(discovery(genes[i], rec, gi, false));
        van.push_back(discovery(genes[i], rec, gi, true));
    }

    std::vector<SummaryRow> rows{
        {"proposed", "all", "genes", static_cast<double>(genes.size())},
        {"proposed", "all", "egenes", static_cast<double>(egenes)},
        {"proposed", "all", "evariants_pre", static_cast<double>(pre)},
        {"proposed", "all", "evariants_post", static_cast<double>(post)},
        {"vanilla", "all", "evariants_post", static_cast<double>(post_vanilla)},
        {"diagnostics", "all", "quarantined_genes", static_cast<double>(result.quarantined_genes)},
        {"diagnostics", "all", "quarantined_coordinates", static_cast<double>(result.quarantined_coordinates)},
        {"diagnostics", "all", "max_kkt_residual", result.max_residual},
    };
    if (config.mode == RunMode::Simulate) {
        append_rates(rows, "proposed", "all", fdr_power(adj));
        append_rates(rows, "vanilla", "all", fdr_power(van));
    }
    {
        auto out = open_output(dir + "summary.csv");
        write_summary(out, rows);
    }
    write_manifest(dir + "manifest.json", config, "run",
                   {{"genes", std::to_string(genes.size())},
                    {"egenes", std::to_string(egenes)},
                    {"evariants_pre", std::to_string(pre)},
                    {"evariants_post", std::to_string(post)},
                    {"quarantined_genes", std::to_string(result.quarantined_genes)},
                    {"quarantined_coordinates", std::to_string(result.quarantined_coordinates)}});
    return result;
}

double ks_uniform(std::vector<double> sample) {
    if (sample.empty()) return kNaN;
    std::sort(sample.begin(), sample.end());
    const auto n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double u = std::clamp(sample[i], 0.0, 1.0);
        d = std::max({d, static_cast<double>(i + 1) / n - u, u - static_cast<double>(i) / n});
    }
    return d;
}

namespace {

double median(std::vector<double> v) {
    if (v.empty()) return kNaN;
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

struct RateAccumulator {
    std::size_t replicates = 0;
    double egene_fdp = 0.0, egene_fdp_sq = 0.0, egene_power = 0.0;
    double fdp_pre = 0.0, fdp_post = 0.0, power = 0.0;

    void add(const DiscoveryRates& r) {
        ++replicates;
        egene_fdp += r.egene_fdp;
        egene_fdp_sq += r.egene_fdp * r.egene_fdp;
        egene_power += r.egene_power;
        fdp_pre += r.evariant_fdp_pre;
        fdp_post += r.evariant_fdp_post;
        power += r.evariant_power;
    }

    DiscoveryRates mean() const {
        DiscoveryRates m;
        if (replicates == 0) return m;
        const auto n = static_cast<double>(replicates);
        m.egene_fdp = egene_fdp / n;
        m.egene_power = egene_power / n;
        m.evariant_fdp_pre = fdp_pre / n;
        m.evariant_fdp_post = fdp_post / n;
        m.evariant_power = power / n;
        return m;
    }

    double fdp_standard_error() const {
        if (replicates < 2) return kNaN;
        const auto n = static_cast<double>(replicates);
        const double mean = egene_fdp / n;
        const double var = std::max(0.0, (egene_fdp_sq - n * mean * mean) / (n - 1.0));
        return std::sqrt(var / n);
    }
};

void append_coverage(std::vector<SummaryRow>& rows, const std::string& method, const CoverageSummary& s) {
    auto add = [&](const std::string& cat, const CategoryStats& c) {
        rows.push_back({method, cat, "count", static_cast<double>(c.count)});
        if (c.count == 0) return;
        rows.push_back({method, cat, "coverage", c.coverage});
        rows.push_back({method, cat, "mean_length", c.mean_length});
        rows.push_back({method, cat, "risk", c.risk});
    };
    add("all", s.pooled);
    for (std::size_t k = 0; k < kCausalCategories; ++k) add(std::to_string(k), s.by_category[k]);
}

} // namespace

StudySummary run_simulation_study(const RunConfig& config, bool write) {
    validate(config);
    if (config.mode != RunMode::Simulate) throw Error(ErrorCode::InvalidArgument, "the simulation study needs simulate mode");
    const auto started = std::chrono::steady_clock::now();

    std::vector<PreparedGene> genes = simulate_gene_panels(config);
    StudySummary summary;
    summary.replicates = config.replicates;

    std::vector<CoverageRecord> adjusted, vanilla, vanilla_low;
    std::vector<double> pivots, ratios;
    RateAccumulator adj_rates, van_rates;
    std::array<RateAccumulator, kCausalCategories> adj_by_cat{}, van_by_cat{};
    std::ostringstream coords;
    coords << "replicate,gene_id,variant_id,causal_count,truth,b_hat,sigma,ci_lo,ci_hi,mle,pivot_at_truth,"
              "naive_lo,naive_hi,status\n";

    for (std::size_t rep = 0; rep < config.replicates; ++rep) {
        draw_replicate(genes, config, rep);
        const auto records = screen_genes(genes, config, rep, !config.screening_only);
        std::vector<GeneInference> inference(genes.size());
        if (!config.screening_only) inference = infer_genes(genes, records, config);

        std::vector<GeneDiscovery> adj_d, van_d;
        std::array<std::vector<GeneDiscovery>, kCausalCategories> adj_cat, van_cat;
        for (std::size_t i = 0; i < genes.size(); ++i) {
            const auto& g = genes[i];
            const auto& gi = inference[i];
            const std::size_t count = g.truth->causal_count();
            if (records[i].quarantined() || !gi.status.empty()) ++summary.quarantined_genes;
            if (gi.rank_deficient) ++summary.rank_deficient_genes;
            if (!gi.constraints_hold) summary.constraints_hold = false;
            for (const auto& c : gi.coordinates) {
                coords << rep << ',' << g.panel.gene_id << ',' << c.adjusted.variant_id << ',' << count << ','
                       << format_number(c.truth) << ',' << format_number(c.adjusted.b_hat) << ','
                       << format_number(c.vanilla.sigma) << ',' << format_number(c.adjusted.ci.lo) << ','
                       << format_number(c.adjusted.ci.hi) << ',' << format_number(c.adjusted.mle) << ','
                       << format_number(c.pivot_at_truth) << ',' << format_number(c.vanilla.ci.lo) << ','
                       << format_number(c.vanilla.ci.hi) << ',' << (c.status.empty() ? "ok" : "quarantined")
                       << '\n';
                summary.max_residual = std::max(summary.max_residual, max_residual(c));
                if (!c.status.empty()) {
                    ++summary.quarantined_coordinates;
                    continue;
                }
                adjusted.push_back({count, c.truth, c.adjusted.mle, c.adjusted.ci});
                vanilla.push_back({count, c.truth, c.vanilla.b_hat, c.vanilla.ci});
                if (count <= 2) vanilla_low.push_back(vanilla.back());
                pivots.push_back(c.pivot_at_truth);
                ratios.push_back(c.adjusted.ci.length() / c.vanilla.ci.length());
            }
            adj_d.push_back(discovery(g, records[i], gi, false));
            van_d.push_back(discovery(g, records[i], gi, true));
            adj_cat[count].push_back(adj_d.back());
            van_cat[count].push_back(van_d.back());
        }
        adj_rates.add(fdr_power(adj_d));
        van_rates.add(fdr_power(van_d));
        for (std::size_t k = 0; k < kCausalCategories; ++k) {
            if (adj_cat[k].empty()) continue;
            adj_by_cat[k].add(fdr_power(adj_cat[k]));
            van_by_cat[k].add(fdr_power(van_cat[k]));
        }
    }

    const CoverageSummary adj_cov = coverage_length_risk(adjusted);
    const CoverageSummary van_cov = coverage_length_risk(vanilla);
    summary.coordinates = adjusted.size();
    summary.coverage = adj_cov.pooled.count ? adj_cov.pooled.coverage : kNaN;
    summary.adjusted_risk = adj_cov.pooled.count ? adj_cov.pooled.risk : kNaN;
    summary.vanilla_risk = van_cov.pooled.count ? van_cov.pooled.risk : kNaN;
    const CoverageSummary low = coverage_length_risk(vanilla_low);
    summary.vanilla_coverage_low_count = low.pooled.count ? low.pooled.coverage : kNaN;
    summary.median_length_ratio = median(ratios);
    summary.pivot_ks = ks_uniform(pivots);
    summary.pivots = pivots.size();
    summary.egene_fdr = adj_rates.mean().egene_fdp;
    summary.egene_fdr_se = adj_rates.fdp_standard_error();
    summary.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

    auto& rows = summary.rows;
    append_coverage(rows, "proposed", adj_cov);
    append_coverage(rows, "vanilla", van_cov);
    append_rates(rows, "proposed", "all", adj_rates.mean());
    append_rates(rows, "vanilla", "all", van_rates.mean());
    for (std::size_t k = 0; k < kCausalCategories; ++k) {
        if (adj_by_cat[k].replicates == 0) continue;
        append_rates(rows, "proposed", std::to_string(k), adj_by_cat[k].mean());
        append_rates(rows, "vanilla", std::to_string(k), van_by_cat[k].mean());
    }
    rows.push_back({"diagnostics", "all", "replicates", static_cast<double>(summary.replicates)});
    rows.push_back({"diagnostics", "all", "coordinates", static_cast<double>(summary.coordinates)});
    rows.push_back({"diagnostics", "all", "egene_fdr_se", summary.egene_fdr_se});
    rows.push_back({"diagnostics", "all", "median_length_ratio", summary.median_length_ratio});
    rows.push_back({"diagnostics", "all", "pivot_ks", summary.pivot_ks});
    rows.push_back({"diagnostics", "all", "max_kkt_residual", summary.max_residual});
    rows.push_back({"diagnostics", "all", "quarantined_genes", static_cast<double>(summary.quarantined_genes)});
    rows.push_back({"diagnostics", "all", "quarantined_coordinates",
                    static_cast<double>(summary.quarantined_coordinates)});
    rows.push_back({"diagnostics", "all", "rank_deficient_genes", static_cast<double>(summary.rank_deficient_genes)});
    rows.push_back({"diagnostics", "all", "seconds", summary.seconds});

    if (write) {
        ensure_directory(config.output_dir);
        const std::string dir = config.output_dir + "/";
        {
            auto out = open_output(dir + "summary.csv");
            write_summary(out, rows);
        }
        {
            auto out = open_output(dir + "coordinates.csv");
            out << coords.str();
        }
        write_manifest(dir + "manifest.json", config, "simulate",
                       {{"replicates", std::to_string(summary.replicates)},
                        {"coordinates", std::to_string(summary.coordinates)},
                        {"coverage", format_number(summary.coverage)},
                        {"egene_fdr", format_number(summary.egene_fdr)},
                        {"pivot_ks", format_number(summary.pivot_ks)}});
    }
    return summary;
}

OracleReport run_oracle_check(const RunConfig& config, bool write) {
    validate(config);
    RunConfig c = config;
    c.variants = config.oracle_variants;
    c.workers = 1;
    const GenotypeDesign design = genotype_design(c);
    const std::vector<double> one_causal{0.0, 1.0};
    const std::size_t max_attempts = 200 * std::max<std::size_t>(1, config.oracle_instances);

    std::vector<OracleRow> rows(0);
    OracleReport report;
    std::ostringstream failures;
    for (std::size_t attempt = 0; attempt < max_attempts && rows.size() < config.oracle_instances; ++attempt) {
        ++report.attempts;
        std::vector<PreparedGene> genes(1);
        auto& g = genes[0];
        g.index = attempt;
        Rng rng = make_stream(config.seed, attempt, StreamTag::OracleInstance, 0);
        const Matrix raw = simulate_genotypes(design, rng);
        std::vector<std::string> ids;
        for (Index j = 0; j < raw.cols(); ++j) ids.push_back("v" + std::to_string(j));
        g.panel = make_panel("oracle" + std::to_string(attempt), raw, Vector::Zero(raw.rows()), ids);
        g.pruned = prune(g.panel, c.rho0);
        SyntheticTruth truth = sample_causal_structure(g.pruned.tree.clusters, one_causal, c.effect_size, rng);
        SyntheticExpression expr = synthesize_expression(g.panel.X, truth, rng);
        g.panel.y = expr.y;
        g.pruned.panel.y = expr.y;

        std::vector<ScreeningRecord> records;
        try {
            records = screen_genes(genes, c, 0);
        } catch (const Error&) {
            continue;
        }
        const auto& rec = records[0];
        if (!rec.selected || rec.quarantined() || rec.E.size() != 1) continue;

        try {
            const SelectionContext ctx = selection_context(g, rec, c);
            const EGeneKktMap em = egene_map(g, ctx, 0);
            const LassoKktMap lm = lasso_map(g, ctx, 0, c);
            const GridOptions options{c.grid_half_width, c.grid_points};
            const ReferenceGrid chern = reference_grid(em, lm, ctx, 0, ReferenceMethod::Chernoff, options);
            const ReferenceGrid quad = reference_grid(em, lm, ctx, 0, ReferenceMethod::Quadrature, options);
            const double b_hat = ctx.target.estimate(0);
            const double scale = ctx.target.scale(0);

            OracleRow row;
            row.instance = rows.size();
            row.gene_id = rec.gene_id;
            row.b_hat = b_hat;
            row.sigma = scale;
            const std::size_t m = c.oracle_b_points;
            for (std::size_t k = 0; k < m; ++k) {
                const double b = b_hat - c.oracle_b_half_width * scale +
                                 2.0 * c.oracle_b_half_width * scale * static_cast<double>(k) / static_cast<double>(m - 1);
                const double d = std::abs(pivot(chern, b_hat, b, scale) - pivot(quad, b_hat, b, scale));
                if (d > row.max_discrepancy) {
                    row.max_discrepancy = d;
                    row.at_b = b;
                }
            }
            if (row.max_discrepancy > c.oracle_tolerance) write_screening(failures, rec);
            report.max_discrepancy = std::max(report.max_discrepancy, row.max_discrepancy);
            rows.push_back(row);
        } catch (const Error& e) {
            failures << "{\"gene_id\":\"" << rec.gene_id << "\",\"error\":\"" << e.what() << "\"}\n";
        }
    }
    report.rows = std::move(rows);
    report.passed = report.rows.size() >= config.oracle_instances && report.max_discrepancy <= config.oracle_tolerance;

    if (write) {
        ensure_directory(config.output_dir);
        const std::string dir = config.output_dir + "/";
        {
            auto out = open_output(dir + "oracle.csv");
            out << "instance,gene_id,b_hat,sigma,max_discrepancy,at_b\n";
            for (const auto& r : report.rows)
                out << r.instance << ',' << r.gene_id << ',' << format_number(r.b_hat) << ',' << format_number(r.sigma)
                    << ',' << format_number(r.max_discrepancy) << ',' << format_number(r.at_b) << '\n';
        }
        if (!failures.str().empty()) {
            auto out = open_output(dir + "oracle_failures.jsonl");
            out << failures.str();
        }
        write_manifest(dir + "manifest.json", config, "oracle-check",
                       {{"instances", std::to_string(report.rows.size())},
                        {"attempts", std::to_string(report.attempts)},
                        {"max_discrepancy", format_number(report.max_discrepancy)},
                        {"passed", report.passed ? "true" : "false"}});
    }
    return report;
}

} // namespace seleqtl
