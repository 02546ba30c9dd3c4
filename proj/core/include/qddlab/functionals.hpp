#pragma once

#include <span>
#include <vector>

#include "qddlab/markov.hpp"
#include "qddlab/potential.hpp"

namespace qddlab {

/// Relative entropy h^d sum U log(U / Pi^h). Vanishes exactly at Pi^h; the offset
/// gamma_h relating it to the continuous entropy is kept in SteadyState.
double entropy(std::span<const double> u, const SteadyState& steady);

/// Representative of D H: 1 + log(U / Pi^h) under the h^d-weighted pairing.
std::vector<double> entropy_gradient(std::span<const double> u, const SteadyState& steady);

/// Fisher information h^d sum_edges sqrt(Pi_i Pi_j) L_ij(U) ((log r_i - log r_j) / h)^2, r = U / Pi^h.
double fisher(std::span<const double> u, const SteadyState& steady);
/// Same quantity as h^(d-2) sum_edges sqrt(Pi_i Pi_j) (r_i - r_j)(log r_i - log r_j).
double fisher_alt(std::span<const double> u, const SteadyState& steady);

/// S = M U / U + M^T log(U / Pi^h). The derivative of the Fisher information is -S
/// (up to constants) and the QDD velocity is K_U S.
std::vector<double> fisher_gradient(std::span<const double> u, const SteadyState& steady, const Generator& gen);

/// h^d sum Xi^2 / U
double entropy_hessian_form(const Grid& grid, std::span<const double> u, std::span<const double> xi);
/// Second derivative of the Fisher information along Xi (linear interpolation).
double fisher_hessian_form(std::span<const double> u, const SteadyState& steady, std::span<const double> xi);

/// h^d sum |U - Pi^h|
double l1_distance(std::span<const double> u, const SteadyState& steady);

/// Convex decay inequality data: J = -dI/ds along the Fokker-Planck flow, bound = 2 lambda_h I.
struct CdiMargin {
    double j;
    double bound;
    double margin() const noexcept { return j - bound; }
};
CdiMargin cdi_margin(std::span<const double> u, const SteadyState& steady, const Generator& gen);

struct FunctionalReport {
    double entropy;
    double fisher;
    double fisher_alt;
    double l1_to_steady;
    /// sqrt(2 H) - L1 distance; nonnegative by Csiszar-Kullback.
    double ck_slack;
};
FunctionalReport report(std::span<const double> u, const SteadyState& steady);

/// h^d sum p_j xi_j
double pairing(const Grid& grid, std::span<const double> p, std::span<const double> xi);

}  // namespace qddlab
