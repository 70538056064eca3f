#include "seleqtl/io.hpp"

#include "seleqtl/error.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace seleqtl {

using json = nlohmann::json;

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_double(const std::string& s) {
    if (s == "nan") return kNaN;
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw Error(ErrorCode::ParseError, "bad number '" + s + "'");
    }
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot read " + path);
    return in;
}

json vector_json(const Vector& v) {
    json a = json::array();
    for (Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

Vector json_vector(const json& a) {
    Vector v(static_cast<Index>(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i) v[static_cast<Index>(i)] = a[i].get<double>();
    return v;
}

} // namespace

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
    return out;
}

void ensure_directory(const std::string& path) {
    std::error_code ec;
    std::filesystem::create_directories(path, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create directory " + path + ": " + ec.message());
}

namespace {

// expression.csv (gene_id, then one column per sample) plus
// genotypes/<gene_id>.csv (header of variant ids, one row per sample).
std::vector<GenePanel> read_csv_panels(const std::string& dir) {
    auto in = open_input(dir + "/expression.csv");
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorCode::ParseError, dir + "/expression.csv: missing header");
    std::vector<GenePanel> panels;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_csv(line);
        const std::string& gene_id = fields.at(0);
        Vector y(static_cast<Index>(fields.size() - 1));
        for (std::size_t i = 1; i < fields.size(); ++i) y[static_cast<Index>(i - 1)] = parse_double(fields[i]);
        y.array() -= y.mean();

        const std::string gpath = dir + "/genotypes/" + gene_id + ".csv";
        auto gin = open_input(gpath);
        std::string header;
        if (!std::getline(gin, header)) throw Error(ErrorCode::ParseError, gpath + ": missing header");
        if (!header.empty() && header.back() == '\r') header.pop_back();
        const auto ids = split_csv(header);
        std::vector<std::vector<double>> rows;
        while (std::getline(gin, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            const auto f = split_csv(line);
            if (f.size() != ids.size()) throw Error(ErrorCode::ParseError, gpath + ": ragged row");
            std::vector<double> row(f.size());
            for (std::size_t c = 0; c < f.size(); ++c) row[c] = parse_double(f[c]);
            rows.push_back(std::move(row));
        }
        Matrix raw(static_cast<Index>(rows.size()), static_cast<Index>(ids.size()));
        for (std::size_t r = 0; r < rows.size(); ++r)
            for (std::size_t c = 0; c < ids.size(); ++c) raw(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
        panels.push_back(make_panel(gene_id, raw, std::move(y), ids));
    }
    return panels;
}

} // namespace

std::vector<GenePanel> read_panels(const std::string& path) {
    if (std::filesystem::is_directory(path)) return read_csv_panels(path);
    auto in = open_input(path);
    std::vector<GenePanel> panels;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const json j = json::parse(line);
            const auto& rows = j.at("genotypes");
            const auto ids = j.at("variant_ids").get<std::vector<std::string>>();
            Matrix raw(static_cast<Index>(rows.size()), static_cast<Index>(ids.size()));
            for (std::size_t r = 0; r < rows.size(); ++r) {
                if (rows[r].size() != ids.size()) throw Error(ErrorCode::ParseError, "ragged genotype row");
                for (std::size_t c = 0; c < ids.size(); ++c)
                    raw(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c].get<double>();
            }
            Vector y = json_vector(j.at("expression"));
            y.array() -= y.mean();
            panels.push_back(make_panel(j.at("gene_id").get<std::string>(), raw, std::move(y), ids));
        } catch (const json::exception& e) {
            throw Error(ErrorCode::ParseError, path + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return panels;
}

void write_panel(std::ostream& out, const std::string& gene_id, const Matrix& genotypes, const Vector& expression,
                 const std::vector<std::string>& variant_ids) {
    json j;
    j["gene_id"] = gene_id;
    j["variant_ids"] = variant_ids;
    json rows = json::array();
    for (Index r = 0; r < genotypes.rows(); ++r) rows.push_back(vector_json(genotypes.row(r).transpose()));
    j["genotypes"] = std::move(rows);
    j["expression"] = vector_json(expression);
    out << j.dump() << '\n';
}

void write_screening(std::ostream& out, const ScreeningRecord& r) {
    json j;
    j["gene_id"] = r.gene_id;
    j["p_tilde"] = r.p_tilde;
    j["selected"] = r.selected;
    j["j0"] = r.j0;
    j["T0"] = r.T0;
    j["s_j0"] = r.s_j0;
    j["E"] = r.E;
    j["s_E"] = r.s_E;
    j["lambda"] = r.lambda;
    j["K0"] = r.K0;
    j["G"] = r.G;
    j["q"] = r.q;
    j["V_g"] = r.variant_count;
    j["p_g"] = r.pruned_count;
    j["T_j0"] = r.T_j0;
    j["omega_j0"] = r.omega_j0;
    j["sigma"] = r.sigma_j0;
    j["gamma"] = r.gamma;
    j["tau"] = r.tau;
    j["zeta"] = vector_json(r.zeta);
    j["beta_E"] = vector_json(r.beta_E);
    j["epsilon"] = r.epsilon;
    j["status"] = r.status;
    out << j.dump() << '\n';
}

std::vector<ScreeningRecord> read_screening(const std::string& path) {
    auto in = open_input(path);
    std::vector<ScreeningRecord> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const json j = json::parse(line);
            ScreeningRecord r;
            r.gene_id = j.at("gene_id").get<std::string>();
            r.p_tilde = j.at("p_tilde").get<double>();
            r.selected = j.at("selected").get<bool>();
            r.j0 = j.at("j0").get<std::size_t>();
            r.T0 = j.at("T0").get<double>();
            r.s_j0 = j.at("s_j0").get<int>();
            r.E = j.at("E").get<std::vector<std::size_t>>();
            r.s_E = j.at("s_E").get<std::vector<int>>();
            r.lambda = j.at("lambda").get<double>();
            r.K0 = j.at("K0").get<std::size_t>();
            r.G = j.at("G").get<std::size_t>();
            r.q = j.at("q").get<double>();
            r.variant_count = j.at("V_g").get<std::size_t>();
            r.pruned_count = j.at("p_g").get<std::size_t>();
            r.T_j0 = j.at("T_j0").get<double>();
            r.omega_j0 = j.at("omega_j0").get<double>();
            r.sigma_j0 = j.at("sigma").get<double>();
            r.gamma = j.at("gamma").get<double>();
            r.tau = j.at("tau").get<double>();
            r.zeta = json_vector(j.at("zeta"));
            r.beta_E = json_vector(j.at("beta_E"));
            r.epsilon = j.at("epsilon").get<double>();
            r.status = j.at("status").get<std::string>();
            out.push_back(std::move(r));
        } catch (const json::exception& e) {
            throw Error(ErrorCode::ParseError, path + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

void write_inference_header(std::ostream& out) {
    out << "gene_id,variant_id,b_hat,sigma,pivot_at_zero,p_two_sided,ci_lo,ci_hi,mle,reported\n";
}

void write_inference_row(std::ostream& out, const InferenceResult& r) {
    out << r.gene_id << ',' << r.variant_id << ',' << format_number(r.b_hat) << ',' << format_number(r.sigma) << ','
        << format_number(r.pivot_at_zero) << ',' << format_number(r.p_two_sided) << ',' << format_number(r.ci.lo)
        << ',' << format_number(r.ci.hi) << ',' << format_number(r.mle) << ',' << (r.reported ? 1 : 0) << '\n';
}

std::vector<InferenceResult> read_inference(const std::string& path) {
    auto in = open_input(path);
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorCode::ParseError, path + ": missing header");
    std::vector<InferenceResult> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_csv(line);
        if (f.size() != 10) throw Error(ErrorCode::ParseError, path + ": expected 10 fields");
        InferenceResult r;
        r.gene_id = f[0];
        r.variant_id = f[1];
        r.b_hat = parse_double(f[2]);
        r.sigma = parse_double(f[3]);
        r.pivot_at_zero = parse_double(f[4]);
        r.p_two_sided = parse_double(f[5]);
        r.ci = {parse_double(f[6]), parse_double(f[7])};
        r.mle = parse_double(f[8]);
        r.reported = f[9] == "1";
        out.push_back(std::move(r));
    }
    return out;
}

void write_clusters(std::ostream& out, const PreparedGene& gene) {
    const auto& tree = gene.pruned.tree;
    const auto& ids = gene.panel.variant_ids;
    json clusters = json::array();
    for (std::size_t c = 0; c < tree.cluster_count(); ++c) {
        json members = json::array();
        for (std::size_t m : tree.clusters[c]) members.push_back(ids[m]);
        clusters.push_back({{"cluster_id", c}, {"members", members}, {"prototype", ids[tree.prototypes[c]]}});
    }
    json j;
    j["gene_id"] = gene.panel.gene_id;
    j["clusters"] = std::move(clusters);
    out << j.dump() << '\n';
}

void write_truth(std::ostream& out, const std::string& gene_id, const SyntheticTruth& truth) {
    json effects = json::array();
    for (std::size_t k : truth.causal_indices) effects.push_back(truth.effects.at(k));
    json j;
    j["gene_id"] = gene_id;
    j["causal_indices"] = truth.causal_indices;
    j["effects"] = std::move(effects);
    out << j.dump() << '\n';
}

void write_summary(std::ostream& out, const std::vector<SummaryRow>& rows) {
    out << "method,category,metric,value\n";
    for (const auto& r : rows)
        out << r.method << ',' << r.category << ',' << r.metric << ',' << format_number(r.value) << '\n';
}

void write_manifest(const std::string& path, const RunConfig& config, const std::string& command,
                    const std::vector<std::pair<std::string, std::string>>& extra) {
    json cfg = json::object();
    for (const auto& [k, v] : config_entries(config)) cfg[k] = v;
    json j;
    j["command"] = command;
    j["version"] = SELEQTL_VERSION;
    j["seed"] = config.seed;
    j["config"] = std::move(cfg);
    json x = json::object();
    for (const auto& [k, v] : extra) x[k] = v;
    j["results"] = std::move(x);
    auto out = open_output(path);
    out << j.dump(2) << '\n';
}

} // namespace seleqtl
