#pragma once

#include <span>
#include <vector>

#include "qddlab/grid.hpp"

namespace qddlab {

/// One direction of a product potential V(x) = V1(x1) + ... + Vd(xd).
class Potential1D {
public:
    enum class Kind { quadratic, tabulated };

    /// V(x) = (lambda / 2) (x - xbar)^2.
    static Potential1D quadratic(double lambda, double xbar = 0.5);
    /// Cell averages given directly. The convexity modulus must be declared by the caller.
    static Potential1D tabulated(std::vector<double> cell_averages, double declared_lambda);

    Kind kind() const noexcept { return kind_; }
    double lambda() const noexcept { return lambda_; }
    double xbar() const noexcept { return xbar_; }
    const std::vector<double>& table() const noexcept { return table_; }

    /// Pointwise value; quadratic kind only.
    double operator()(double x) const;
    double derivative(double x) const;
    double second_derivative(double x) const;

private:
    Potential1D(Kind kind, double lambda, double xbar, std::vector<double> table)
        : kind_(kind), lambda_(lambda), xbar_(xbar), table_(std::move(table)) {}

    Kind kind_;
    double lambda_;
    double xbar_;
    std::vector<double> table_;
};

/// V^h_j = (1/h) * integral of V over cell j; closed form for quadratics.
std::vector<double> cell_averages(const Potential1D& pot, int n);
inline std::vector<double> cell_averages(const Potential1D& pot, const Grid& grid) {
    return cell_averages(pot, grid.n());
}

/// Discrete convexity modulus (2/h^2)(1 - exp(-h^2 lambda / 2)).
double lambda_h(double lambda, double h);

/// Discrete steady state of a product potential together with its derived constants.
struct SteadyState {
    Grid grid;
    std::vector<std::vector<double>> cell_potentials;  ///< V^[k],h per direction
    std::vector<std::vector<double>> factors;          ///< Pi^[k],h, each of unit h-mass
    std::vector<double> z_h;                           ///< Z^[k],h = h sum exp(-V^[k],h)
    std::vector<double> z;                             ///< continuous Z^[k] (equals z_h for tables)
    Density values;                                    ///< Pi^h on the full lattice
    double gamma_h = 0.0;                              ///< log(prod Z / prod Z^h) >= 0
    double lambda = 0.0;                               ///< min_k declared convexity modulus
    double lambda_h = 0.0;                             ///< discrete modulus for `lambda`
    std::vector<double> edge_weights;                  ///< sqrt(Pi_i Pi_j) per grid edge
};

/// Builds Pi^h from one potential per direction.
/// Throws RangeError when some |V^h| exceeds 700 (shift the potential; Pi^h is shift invariant).
SteadyState steady_state(std::span<const Potential1D> pots, const Grid& grid);

/// Same quadratic potential in every direction, centred at xbar (one entry per direction).
SteadyState quadratic_steady_state(const Grid& grid, double lambda, std::span<const double> xbar);
SteadyState quadratic_steady_state(const Grid& grid, double lambda);

/// W = |grad V|^2 - 2 Laplace V for quadratic product potentials.
ScalarField w_from_v(std::span<const Potential1D> pots);

}  // namespace qddlab
