#pragma once

#include <span>
#include <vector>

#include "qddlab/potential.hpp"

namespace qddlab {

/// Logarithmic mean (a - b) / (log a - log b), with L(a, a) = a and L(0, b) = 0.
double log_mean(double a, double b);

struct LogMeanGradient {
    double da;
    double db;
};
/// Partial derivatives of the logarithmic mean (a, b > 0).
LogMeanGradient log_mean_gradient(double a, double b);

/// log(a) - log(b) without cancellation when a and b are close.
double log_difference(double a, double b);

/// Edge mobilities sqrt(Pi_i Pi_j) L(U_i/Pi_i, U_j/Pi_j), aligned with grid.edges().
std::vector<double> edge_mobilities(const SteadyState& steady, std::span<const double> u);

/// P[K_U Q] = h^d sum_edges sqrt(Pi_i Pi_j) L_ij(U) (P_i - P_j)(Q_i - Q_j) / h^2.
double onsager_form(const SteadyState& steady, std::span<const double> u, std::span<const double> p,
                    std::span<const double> q);

/// (K_U P)_i = h^-2 sum_{j~i} sqrt(Pi_i Pi_j) L_ij(U) (P_i - P_j).
std::vector<double> onsager_apply(const SteadyState& steady, std::span<const double> u, std::span<const double> p);

/// Same action with precomputed edge mobilities.
std::vector<double> onsager_apply_with(const Grid& grid, std::span<const double> mobilities,
                                       std::span<const double> p);

/// Contribution of each lattice direction to onsager_form; the entries sum to the full form.
std::vector<double> onsager_split(const SteadyState& steady, std::span<const double> u, std::span<const double> p,
                                  std::span<const double> q);

/// Throws DomainError unless `u` matches the grid and is strictly positive.
void require_positive_density(const SteadyState& steady, std::span<const double> u, const char* where);

}  // namespace qddlab
