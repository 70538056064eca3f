#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace seleqtl {

enum class RunMode { Simulate, Real };
enum class EpsilonRule { InverseSqrtN, Fixed };
enum class NoiseMode { Known, Estimated };
enum class ReferenceMethod { Chernoff, Quadrature };

struct RunConfig {
    std::uint64_t seed = 20240101;
    RunMode mode = RunMode::Simulate;
    double q = 0.1;
    double alpha = 0.1;
    double gamma2 = 0.5;
    double tau2 = 0.5;
    double rho0 = 0.5;
    EpsilonRule epsilon_rule = EpsilonRule::InverseSqrtN;
    double epsilon = 0.1;  // used by the fixed rule
    int lambda_draws = 500;
    double grid_half_width = 10.0;
    std::size_t grid_points = 1201;
    int workers = 1;
    std::string input;
    std::string output_dir = "out";
    NoiseMode noise = NoiseMode::Known;
    ReferenceMethod reference = ReferenceMethod::Chernoff;

    // simulation design
    std::size_t genes = 60;
    std::size_t replicates = 1;
    int samples = 100;
    int variants = 300;
    int max_block = 4;
    double effect_size = 3.0;
    bool null_only = false;
    bool screening_only = false;

    // oracle check
    std::size_t oracle_instances = 50;
    int oracle_variants = 40;
    double oracle_tolerance = 0.05;
    std::size_t oracle_b_points = 41;
    double oracle_b_half_width = 5.0;

    double gamma() const;
    double tau() const;
};

// Sets `key` from its textual value. Throws ParseError on unknown keys or
// malformed values.
void set_config_value(RunConfig& config, const std::string& key, const std::string& value);

// Flat `key = value` lines; '#' starts a comment. Duplicate keys are errors.
RunConfig parse_config(const std::string& text, RunConfig base = {});
RunConfig load_config(const std::string& path, RunConfig base = {});

// "key=value" overrides applied in order.
void apply_overrides(RunConfig& config, const std::vector<std::string>& overrides);

// Throws InvalidArgument when a field is out of range.
void validate(const RunConfig& config);

// Every resolved field as canonical text, in a fixed order.
std::vector<std::pair<std::string, std::string>> config_entries(const RunConfig& config);

} // namespace seleqtl
