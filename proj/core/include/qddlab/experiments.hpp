#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qddlab/config.hpp"
#include "qddlab/flow.hpp"
#include "qddlab/grid.hpp"
#include "qddlab/markov.hpp"
#include "qddlab/potential.hpp"

namespace qddlab {

/// (cos^16(pi x1) + cos^16(pi x2)) / Z + 1e-4 with Z chosen for unit mass.
double bls_profile(std::span<const double> x);
/// 4/3 sin^2(3 pi x1) sin^2(2 pi x2) + (1 + x1 + x2) / 3, of unit mass.
double regular_profile(std::span<const double> x);

/// Quadratic product steady state for cfg.lambda and cfg.xbar.
SteadyState make_steady_state(const Config& cfg);

/// Initial density selected by cfg.init, of unit mass.
std::vector<double> initial_density(const Config& cfg, const Grid& grid);

/// Reference constants for the decay rates.
struct RateConstants {
    double lambda_h = 0.0;
    /// Mielke-type modulus, minimum over the directions.
    double lambda_tilde_h = 0.0;
    double cdpp = 0.0;
    double lambda_star_h = 0.0;
    bool dense_gap = false;
};
RateConstants rate_constants(const SteadyState& steady, const Generator& gen, std::size_t eig_cap);

std::span<const std::string_view> subcommands();
/// Whether the subcommand reads `init` from the configuration.
bool needs_init(std::string_view subcommand);

/// Runs a subcommand, printing a summary to `out`. Returns the process exit status.
/// Configuration problems throw ConfigError; numeric failures throw NumericError.
int run_subcommand(std::string_view name, Config cfg, std::ostream& out);

}  // namespace qddlab
