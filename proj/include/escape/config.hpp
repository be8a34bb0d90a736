#pragma once

// JSON experiment description shared by the command-line tools: the base
// system (matrix + named locally constant functions), the discretization,
// target point, hole family, and Monte Carlo sections. Parse failures throw
// ConfigError naming the offending field. Also: 17-digit real formatting for
// artifacts and the config hash recorded in run manifests.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "escape/open_system.hpp"

namespace escape {

struct MonteCarloConfig {
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
    double time = 0.0;
};

// optional replacements applied to a generated nested family, so miscalibrated
// constants can be exercised end to end
struct NestedOverrides {
    std::optional<double> c, rho, kappa;
    std::vector<int> l;  // empty keeps the generated depths
};

struct ExperimentConfig {
    TransitionMatrix matrix;
    std::vector<std::string> function_names;  // declaration order
    std::map<std::string, LocallyConstantFunction> functions;
    std::string potential_name;
    std::string roof_name;  // empty when no roof was given

    bool has_discretization = false;
    bool delta_auto = false;
    double delta_request = 0.0;
    std::optional<int> m;

    std::optional<ShiftPoint> target;
    std::optional<int> n_min, n_max;
    NestedOverrides overrides;
    std::optional<Hole> hole;
    std::optional<MonteCarloConfig> monte_carlo;
    int k_max = 64;   // survivor recursion horizon
    int n_scan = 8;   // cylinder scan depth (certification, invariance)

    const LocallyConstantFunction& potential() const;
    const LocallyConstantFunction& roof() const;  // ConfigError when absent
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// FNV-1a over the raw config bytes; recorded in the run manifest
std::uint64_t fnv1a(const std::string& bytes);
std::string hash_hex(std::uint64_t h);

// shortest-round-trip style fixed formatting: %.17g
std::string format_real(double x);

}  // namespace escape
