#include "qddlab/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "qddlab/error.hpp"

namespace qddlab {

namespace {

constexpr double kExpGuard = 700.0;
constexpr int kContinuousQuadratureOrder = 10;

// Continuous normalisation integral of exp(-V) over [0, 1], minus its
// piecewise-constant counterpart, accumulated cell by cell so that the two
// agree to round-off when V is constant on every cell.
double continuous_z_excess(const Potential1D& pot, std::span<const double> averages, double h) {
    const QuadratureRule rule = gauss_legendre_unit(kContinuousQuadratureOrder);
    double weight_sum = 0.0;
    for (double w : rule.weights) weight_sum += w;
    double excess = 0.0;
    for (std::size_t j = 0; j < averages.size(); ++j) {
        double cell = 0.0;
        for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
            const double x = h * (static_cast<double>(j) + rule.nodes[q]);
            cell += rule.weights[q] * std::exp(-pot(x));
        }
        excess += h * (cell / weight_sum - std::exp(-averages[j]));
    }
    return excess;
}

}  // namespace

Potential1D Potential1D::quadratic(double lambda, double xbar) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw DomainError("quadratic potential needs a finite lambda >= 0");
    }
    if (!std::isfinite(xbar)) throw DomainError("quadratic potential needs a finite centre");
    return Potential1D(Kind::quadratic, lambda, xbar, {});
}

Potential1D Potential1D::tabulated(std::vector<double> cell_averages, double declared_lambda) {
    if (cell_averages.empty()) throw DomainError("tabulated potential needs at least one value");
    return Potential1D(Kind::tabulated, declared_lambda, 0.0, std::move(cell_averages));
}

double Potential1D::operator()(double x) const {
    if (kind_ != Kind::quadratic) throw UnsupportedOperation("pointwise evaluation of a tabulated potential");
    const double d = x - xbar_;
    return 0.5 * lambda_ * d * d;
}

double Potential1D::derivative(double x) const {
    if (kind_ != Kind::quadratic) throw UnsupportedOperation("derivative of a tabulated potential");
    return lambda_ * (x - xbar_);
}

double Potential1D::second_derivative(double) const {
    if (kind_ != Kind::quadratic) throw UnsupportedOperation("second derivative of a tabulated potential");
    return lambda_;
}

std::vector<double> cell_averages(const Potential1D& pot, int n) {
    if (pot.kind() == Potential1D::Kind::tabulated) {
        if (pot.table().size() != static_cast<std::size_t>(n)) {
            throw ConfigError("potential", "table has " + std::to_string(pot.table().size()) +
                                               " values, grid needs " + std::to_string(n));
        }
        return pot.table();
    }
    const double h = 1.0 / n;
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        const double a = h * j - pot.xbar();
        const double b = h * (j + 1) - pot.xbar();
        // (1/h) * integral_a^b (lambda/2) s^2 ds = lambda (a^2 + ab + b^2) / 6
        v[static_cast<std::size_t>(j)] = pot.lambda() * (a * a + a * b + b * b) / 6.0;
    }
    return v;
}

double lambda_h(double lambda, double h) {
    if (!(h > 0.0)) throw DomainError("lambda_h: h must be positive");
    return -2.0 / (h * h) * std::expm1(-0.5 * h * h * lambda);
}

SteadyState steady_state(std::span<const Potential1D> pots, const Grid& grid) {
    if (pots.size() != static_cast<std::size_t>(grid.dim())) {
        throw DomainError("steady_state: need one potential per direction (" + std::to_string(grid.dim()) +
                          "), got " + std::to_string(pots.size()));
    }
    const double h = grid.h();
    SteadyState st{.grid = grid, .cell_potentials = {}, .factors = {}, .z_h = {}, .z = {}, .values = {}, .edge_weights = {}};
    st.lambda = std::numeric_limits<double>::infinity();

    for (const Potential1D& pot : pots) {
        std::vector<double> v = cell_averages(pot, grid);
        for (double x : v) {
            if (!(std::abs(x) <= kExpGuard)) {
                throw RangeError("cell potential " + std::to_string(x) +
                                 " exceeds |V| <= 700; shift V by a constant (the steady state is unchanged)");
            }
        }
        std::vector<double> factor(v.size());
        double z_h = 0.0;
        for (std::size_t j = 0; j < v.size(); ++j) {
            factor[j] = std::exp(-v[j]);
            z_h += factor[j];
        }
        z_h *= h;
        for (double& p : factor) p /= z_h;

        double z = z_h;
        if (pot.kind() == Potential1D::Kind::quadratic) z = z_h + continuous_z_excess(pot, v, h);

        st.cell_potentials.push_back(std::move(v));
        st.factors.push_back(std::move(factor));
        st.z_h.push_back(z_h);
        st.z.push_back(z);
        st.lambda = std::min(st.lambda, pot.lambda());
    }

    double gamma = 0.0;
    for (std::size_t k = 0; k < st.z.size(); ++k) gamma += std::log1p((st.z[k] - st.z_h[k]) / st.z_h[k]);
    st.gamma_h = std::max(0.0, gamma);
    st.lambda_h = lambda_h(st.lambda, h);

    std::vector<double> values(grid.size());
    for (std::size_t flat = 0; flat < grid.size(); ++flat) {
        double p = 1.0;
        for (int k = 0; k < grid.dim(); ++k) {
            p *= st.factors[static_cast<std::size_t>(k)][static_cast<std::size_t>(grid.coordinate(flat, k) - 1)];
        }
        values[flat] = p;
    }
    st.values = Density(std::move(values));

    st.edge_weights.reserve(grid.edges().size());
    for (const Edge& e : grid.edges()) st.edge_weights.push_back(std::sqrt(st.values[e.lo] * st.values[e.hi]));
    return st;
}

SteadyState quadratic_steady_state(const Grid& grid, double lambda, std::span<const double> xbar) {
    if (xbar.size() != static_cast<std::size_t>(grid.dim())) {
        throw DomainError("quadratic_steady_state: need one centre coordinate per direction");
    }
    std::vector<Potential1D> pots;
    for (double c : xbar) pots.push_back(Potential1D::quadratic(lambda, c));
    return steady_state(pots, grid);
}

SteadyState quadratic_steady_state(const Grid& grid, double lambda) {
    const std::vector<double> centre(static_cast<std::size_t>(grid.dim()), 0.5);
    return quadratic_steady_state(grid, lambda, centre);
}

ScalarField w_from_v(std::span<const Potential1D> pots) {
    for (const Potential1D& pot : pots) {
        if (pot.kind() != Potential1D::Kind::quadratic) {
            throw UnsupportedOperation("w_from_v needs a smooth (quadratic) potential in every direction");
        }
    }
    std::vector<Potential1D> copy(pots.begin(), pots.end());
    return [copy = std::move(copy)](std::span<const double> x) {
        double w = 0.0;
        for (std::size_t k = 0; k < copy.size(); ++k) {
            const double g = copy[k].derivative(x[k]);
            w += g * g - 2.0 * copy[k].second_derivative(x[k]);
        }
        return w;
    };
}

}  // namespace qddlab
