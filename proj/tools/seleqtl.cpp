#include "seleqtl/config.hpp"
#include "seleqtl/error.hpp"
#include "seleqtl/io.hpp"
#include "seleqtl/pipeline.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <optional>

using namespace seleqtl;

namespace {

enum Exit { kOk = 0, kUsage = 1, kAcceptance = 2, kIo = 3 };

struct CommonOptions {
    std::string config_path;
    std::vector<std::string> overrides;
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;
    std::optional<std::string> input;
    std::optional<std::string> output;
    std::optional<std::string> mode;

    void attach(CLI::App* app) {
        app->add_option("-c,--config", config_path, "key=value config file");
        app->add_option("-s,--set", overrides, "override, key=value (repeatable)");
        app->add_option("--seed", seed, "random seed");
        app->add_option("-j,--workers", workers, "worker threads");
        app->add_option("-i,--input", input, "panel file (JSON lines) or CSV directory");
        app->add_option("-o,--output", output, "output directory");
        app->add_option("--mode", mode, "simulate or real");
    }

    RunConfig resolve() const {
        RunConfig c = config_path.empty() ? RunConfig{} : load_config(config_path);
        apply_overrides(c, overrides);
        if (seed) c.seed = *seed;
        if (workers) c.workers = *workers;
        if (input) {
            c.input = *input;
            if (!mode) set_config_value(c, "mode", "real");
        }
        if (output) c.output_dir = *output;
        if (mode) set_config_value(c, "mode", *mode);
        if (c.mode == RunMode::Real) c.noise = NoiseMode::Estimated;
        validate(c);
        return c;
    }
};

std::vector<PreparedGene> load_genes(const RunConfig& c) {
    if (c.mode == RunMode::Real) return prepare_genes(read_panels(c.input), c);
    auto genes = simulate_gene_panels(c);
    draw_replicate(genes, c, 0);
    return genes;
}

int report_error(const Error& e) {
    nlohmann::json j{{"error", std::string(to_string(e.code()))}, {"message", e.what()}};
    std::cerr << j.dump() << '\n';
    return e.code() == ErrorCode::IoError ? kIo : kUsage;
}

int cmd_prune(const RunConfig& c) {
    ensure_directory(c.output_dir);
    const auto genes = load_genes(c);
    auto out = open_output(c.output_dir + "/clusters.jsonl");
    for (const auto& g : genes) write_clusters(out, g);
    std::cout << "pruned " << genes.size() << " genes\n";
    return kOk;
}

int cmd_screen(const RunConfig& c) {
    ensure_directory(c.output_dir);
    const auto genes = load_genes(c);
    const auto records = screen_genes(genes, c, 0);
    auto out = open_output(c.output_dir + "/screening.jsonl");
    std::size_t selected = 0;
    for (const auto& r : records) {
        write_screening(out, r);
        selected += r.selected ? 1 : 0;
    }
    std::cout << "screened " << records.size() << " genes, " << selected << " eGenes\n";
    return kOk;
}

int cmd_infer(const RunConfig& c, const std::string& screening_path) {
    ensure_directory(c.output_dir);
    const auto genes = load_genes(c);
    const auto records = read_screening(screening_path.empty() ? c.output_dir + "/screening.jsonl" : screening_path);
    PipelineResult result;
    result.screening = records;
    result.inference = infer_genes(genes, records, c);
    auto out = open_output(c.output_dir + "/inference.csv");
    out << inference_csv(result);
    std::size_t rows = 0;
    for (const auto& gi : result.inference) rows += gi.coordinates.size();
    std::cout << "inferred " << rows << " coordinates\n";
    return kOk;
}

int cmd_report(const RunConfig& c, const std::string& inference_path) {
    auto results = read_inference(inference_path.empty() ? c.output_dir + "/inference.csv" : inference_path);
    const auto reported = post_inference_report(results, c.alpha);
    std::size_t post = 0;
    for (const auto& [gene, ids] : reported) post += ids.size();
    ensure_directory(c.output_dir);
    {
        auto out = open_output(c.output_dir + "/reported.csv");
        out << "gene_id,variant_id\n";
        for (const auto& [gene, ids] : reported)
            for (const auto& id : ids) out << gene << ',' << id << '\n';
    }
    auto out = open_output(c.output_dir + "/report_summary.csv");
    write_summary(out, {{"proposed", "all", "egenes_with_variants", static_cast<double>(reported.size())},
                        {"proposed", "all", "evariants_pre", static_cast<double>(results.size())},
                        {"proposed", "all", "evariants_post", static_cast<double>(post)}});
    std::cout << results.size() << " selected variants, " << post << " reported\n";
    return kOk;
}

int cmd_run(const RunConfig& c) {
    const auto result = run_pipeline(c);
    std::size_t egenes = 0, rows = 0;
    for (const auto& r : result.screening) egenes += r.selected ? 1 : 0;
    for (const auto& gi : result.inference) rows += gi.coordinates.size();
    std::cout << result.screening.size() << " genes, " << egenes << " eGenes, " << rows << " coordinates, "
              << result.quarantined_genes << " quarantined genes\n";
    return kOk;
}

int cmd_simulate(const RunConfig& c) {
    const auto s = run_simulation_study(c);
    std::cout << "replicates " << s.replicates << ", coordinates " << s.coordinates << '\n'
              << "coverage " << format_number(s.coverage) << ", median length ratio "
              << format_number(s.median_length_ratio) << '\n'
              << "risk adjusted " << format_number(s.adjusted_risk) << ", vanilla " << format_number(s.vanilla_risk)
              << '\n'
              << "eGene FDR " << format_number(s.egene_fdr) << " (se " << format_number(s.egene_fdr_se) << ")\n"
              << "pivot KS " << format_number(s.pivot_ks) << " over " << s.pivots << " pivots\n";
    return kOk;
}

int cmd_oracle(const RunConfig& c) {
    const auto r = run_oracle_check(c);
    std::cout << r.rows.size() << " instances, max discrepancy " << format_number(r.max_discrepancy) << " (tolerance "
              << format_number(c.oracle_tolerance) << ")\n";
    return r.passed ? kOk : kAcceptance;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Randomized hierarchical eQTL selection with selection-adjusted inference"};
    app.require_subcommand(1);

    std::map<std::string, CommonOptions> opts;
    std::string screening_path, inference_path;
    auto add = [&](const std::string& name, const std::string& help) {
        CLI::App* sub = app.add_subcommand(name, help);
        opts[name].attach(sub);
        return sub;
    };
    add("prune", "minimax-prune each cis-window, write clusters.jsonl");
    add("screen", "Stage I screening, BH and the randomized LASSO, write screening.jsonl");
    add("infer", "selection-adjusted inference from a screening dump, write inference.csv")
        ->add_option("--screening", screening_path, "screening dump (default: <output>/screening.jsonl)");
    add("report", "post-inference report from an inference CSV")
        ->add_option("--inference", inference_path, "inference CSV (default: <output>/inference.csv)");
    add("run", "all stages in one pass");
    add("simulate", "simulation study, proposed versus vanilla");
    add("oracle-check", "Chernoff versus quadrature pivots on |E| = 1 instances");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kUsage;
    }

    const CLI::App* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    try {
        const RunConfig c = opts[name].resolve();
        if (name == "prune") return cmd_prune(c);
        if (name == "screen") return cmd_screen(c);
        if (name == "infer") return cmd_infer(c, screening_path);
        if (name == "report") return cmd_report(c, inference_path);
        if (name == "run") return cmd_run(c);
        if (name == "simulate") return cmd_simulate(c);
        if (name == "oracle-check") return cmd_oracle(c);
    } catch (const Error& e) {
        return report_error(e);
    } catch (const std::exception& e) {
        std::cerr << nlohmann::json{{"error", "Internal"}, {"message", e.what()}}.dump() << '\n';
        return kUsage;
    }
    return kUsage;
}
