#include "seleqtl/config.hpp"

#include "seleqtl/error.hpp"

#include <charconv>
#include <cmath>
#include <type_traits>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace seleqtl {

double RunConfig::gamma() const { return std::sqrt(gamma2); }
double RunConfig::tau() const { return std::sqrt(tau2); }

namespace {

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
    T value{};
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end) throw Error(ErrorCode::ParseError, "bad value for " + key + ": '" + text + "'");
    return value;
}

bool parse_bool(const std::string& key, const std::string& text) {
    if (text == "true" || text == "1") return true;
    if (text == "false" || text == "0") return false;
    throw Error(ErrorCode::ParseError, "bad value for " + key + ": '" + text + "'");
}

std::string format_double(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

template <typename E>
E parse_enum(const std::string& key, const std::string& text, const std::vector<std::pair<std::string, E>>& names) {
    for (const auto& [name, value] : names)
        if (name == text) return value;
    throw Error(ErrorCode::ParseError, "bad value for " + key + ": '" + text + "'");
}

template <typename E>
std::string enum_name(E value, const std::vector<std::pair<std::string, E>>& names) {
    for (const auto& [name, v] : names)
        if (v == value) return name;
    return "?";
}

const std::vector<std::pair<std::string, RunMode>> kModes{{"simulate", RunMode::Simulate}, {"real", RunMode::Real}};
const std::vector<std::pair<std::string, EpsilonRule>> kEpsilonRules{{"inverse_sqrt_n", EpsilonRule::InverseSqrtN},
                                                                     {"fixed", EpsilonRule::Fixed}};
const std::vector<std::pair<std::string, NoiseMode>> kNoiseModes{{"known", NoiseMode::Known},
                                                                 {"estimated", NoiseMode::Estimated}};
const std::vector<std::pair<std::string, ReferenceMethod>> kReferences{{"chernoff", ReferenceMethod::Chernoff},
                                                                       {"quadrature", ReferenceMethod::Quadrature}};

struct Field {
    std::string key;
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

#define SELEQTL_NUMBER(name, type)                                                                          \
    Field {                                                                                                 \
        #name, [](RunConfig& c, const std::string& v) { c.name = parse_number<type>(#name, v); },           \
            [](const RunConfig& c) {                                                                        \
                if constexpr (std::is_floating_point_v<type>) return format_double(c.name);                 \
                else return std::to_string(c.name);                                                         \
            }                                                                                               \
    }
#define SELEQTL_BOOL(name)                                                                                  \
    Field {                                                                                                 \
        #name, [](RunConfig& c, const std::string& v) { c.name = parse_bool(#name, v); },                   \
            [](const RunConfig& c) { return std::string(c.name ? "true" : "false"); }                       \
    }
#define SELEQTL_ENUM(name, table)                                                                           \
    Field {                                                                                                 \
        #name, [](RunConfig& c, const std::string& v) { c.name = parse_enum(#name, v, table); },            \
            [](const RunConfig& c) { return enum_name(c.name, table); }                                     \
    }
#define SELEQTL_STRING(name)                                                                                \
    Field {                                                                                                 \
        #name, [](RunConfig& c, const std::string& v) { c.name = v; }, [](const RunConfig& c) { return c.name; } \
    }

const std::vector<Field>& fields() {
    static const std::vector<Field> table{
        SELEQTL_NUMBER(seed, std::uint64_t),
        SELEQTL_ENUM(mode, kModes),
        SELEQTL_NUMBER(q, double),
        SELEQTL_NUMBER(alpha, double),
        SELEQTL_NUMBER(gamma2, double),
        SELEQTL_NUMBER(tau2, double),
        SELEQTL_NUMBER(rho0, double),
        SELEQTL_ENUM(epsilon_rule, kEpsilonRules),
        SELEQTL_NUMBER(epsilon, double),
        SELEQTL_NUMBER(lambda_draws, int),
        SELEQTL_NUMBER(grid_half_width, double),
        SELEQTL_NUMBER(grid_points, std::size_t),
        SELEQTL_NUMBER(workers, int),
        SELEQTL_STRING(input),
        SELEQTL_STRING(output_dir),
        SELEQTL_ENUM(noise, kNoiseModes),
        SELEQTL_ENUM(reference, kReferences),
        SELEQTL_NUMBER(genes, std::size_t),
        SELEQTL_NUMBER(replicates, std::size_t),
        SELEQTL_NUMBER(samples, int),
        SELEQTL_NUMBER(variants, int),
        SELEQTL_NUMBER(max_block, int),
        SELEQTL_NUMBER(effect_size, double),
        SELEQTL_BOOL(null_only),
        SELEQTL_BOOL(screening_only),
        SELEQTL_NUMBER(oracle_instances, std::size_t),
        SELEQTL_NUMBER(oracle_variants, int),
        SELEQTL_NUMBER(oracle_tolerance, double),
        SELEQTL_NUMBER(oracle_b_points, std::size_t),
        SELEQTL_NUMBER(oracle_b_half_width, double),
    };
    return table;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::pair<std::string, std::string> split_assignment(const std::string& line) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::ParseError, "expected key=value, got '" + line + "'");
    return {trim(line.substr(0, eq)), trim(line.substr(eq + 1))};
}

} // namespace

void set_config_value(RunConfig& config, const std::string& key, const std::string& value) {
    for (const auto& f : fields())
        if (f.key == key) {
            f.set(config, value);
            return;
        }
    throw Error(ErrorCode::ParseError, "unknown config key '" + key + "'");
}

RunConfig parse_config(const std::string& text, RunConfig base) {
    std::istringstream in(text);
    std::string line;
    std::set<std::string> seen;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto [key, value] = split_assignment(line);
        if (!seen.insert(key).second) throw Error(ErrorCode::ParseError, "duplicate config key '" + key + "'");
        set_config_value(base, key, value);
    }
    return base;
}

RunConfig load_config(const std::string& path, RunConfig base) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot read config " + path);
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str(), std::move(base));
}

void apply_overrides(RunConfig& config, const std::vector<std::string>& overrides) {
    for (const auto& o : overrides) {
        auto [key, value] = split_assignment(o);
        set_config_value(config, key, value);
    }
}

void validate(const RunConfig& c) {
    auto require = [](bool ok, const std::string& what) {
        if (!ok) throw Error(ErrorCode::InvalidArgument, what);
    };
    require(c.q > 0.0 && c.q < 1.0, "q must lie in (0, 1)");
    require(c.alpha > 0.0 && c.alpha < 1.0, "alpha must lie in (0, 1)");
    require(c.gamma2 > 0.0, "gamma2 must be positive");
    require(c.tau2 > 0.0, "tau2 must be positive");
    require(c.rho0 > 0.0 && c.rho0 < 1.0, "rho0 must lie in (0, 1)");
    require(c.epsilon > 0.0, "epsilon must be positive");
    require(c.lambda_draws >= 1, "lambda_draws must be positive");
    require(c.grid_half_width > 0.0, "grid_half_width must be positive");
    require(c.grid_points >= 3 && c.grid_points % 2 == 1, "grid_points must be odd and at least 3");
    require(c.workers >= 1, "workers must be positive");
    require(!c.output_dir.empty(), "output_dir must be set");
    require(c.mode == RunMode::Simulate || !c.input.empty(), "real mode needs an input path");
    require(c.mode == RunMode::Simulate || c.noise == NoiseMode::Estimated, "real mode needs estimated noise");
    require(c.replicates >= 1, "replicates must be positive");
    require(c.samples >= 3 && c.variants >= 1 && c.max_block >= 1, "bad genotype design");
    require(c.oracle_variants >= 2, "oracle_variants must be at least 2");
    require(c.oracle_tolerance > 0.0, "oracle_tolerance must be positive");
    require(c.oracle_b_points >= 2 && c.oracle_b_half_width > 0.0, "bad oracle b-grid");
}

std::vector<std::pair<std::string, std::string>> config_entries(const RunConfig& config) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& f : fields()) out.emplace_back(f.key, f.get(config));
    return out;
}

} // namespace seleqtl
