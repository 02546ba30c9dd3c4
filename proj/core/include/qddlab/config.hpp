#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qddlab/flow.hpp"

namespace qddlab {

enum class InitKind { none, bls, regular, uniform, file };

/// Run configuration. Optional fields have experiment-dependent defaults.
struct Config {
    int dim = 2;
    int n = 30;
    double lambda = 1.0;
    /// Centre of the quadratic potential, one entry per direction.
    std::vector<double> xbar;
    std::optional<double> tau;
    std::optional<std::size_t> steps;
    InitKind init = InitKind::none;
    std::string init_path;
    std::optional<std::size_t> snapshot_every;
    std::string output_prefix = "qddlab_out";
    FlowMode mode = FlowMode::qdd;
    Damping damping = Damping::halving;
    JacobianMode jacobian = JacobianMode::analytic;
    double newton_tol = 1e-11;
    int newton_max_iter = 50;
    std::size_t samples = 1000;
    std::uint64_t seed = 1;
    int quadrature_order = 5;
    std::size_t eig_cap = 4096;

    /// Keys given in the file or on the command line.
    std::set<std::string> explicit_keys;
    bool is_set(const std::string& key) const { return explicit_keys.count(key) != 0; }
};

struct ConfigKey {
    std::string_view name;
    std::string_view default_value;
    std::string_view help;
};

/// Every accepted key, in documentation order.
std::span<const ConfigKey> config_keys();

using Overrides = std::vector<std::pair<std::string, std::string>>;

/// Parses key=value lines ('#' starts a comment), then applies the overrides in order.
/// Throws ConfigError naming the offending key. With `require_init`, a missing `init` is an error.
Config parse_config(std::string_view text, const Overrides& overrides = {}, bool require_init = true);

/// min(1e-5, 0.1 / (2 lambda_h)^2) for the configured lambda and grid.
double auto_tau(const Config& cfg);

StepperConfig stepper_config(const Config& cfg, double tau);

std::string to_string(InitKind kind);

}  // namespace qddlab
