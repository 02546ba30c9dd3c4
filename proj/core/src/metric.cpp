#include "qddlab/metric.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "qddlab/error.hpp"

namespace qddlab {

namespace {

// Below this |log(a/b)| the quotient form loses digits; use sqrt(ab) sinh(x/2)/(x/2).
constexpr double kLogMeanSeriesThreshold = 1e-4;
constexpr double kGradientSeriesThreshold = 0.05;

// (exp(-x) - 1 + x) / x^2, the derivative of L(a, b) in a with x = log(a/b).
double log_mean_partial(double x) {
    if (std::abs(x) < kGradientSeriesThreshold) {
        // sum_k (-x)^k / (k+2)!
        double term = 0.5;
        double sum = term;
        for (int k = 1; k <= 8; ++k) {
            term *= -x / (k + 2);
            sum += term;
        }
        return sum;
    }
    return (x + std::expm1(-x)) / (x * x);
}

}  // namespace

double log_difference(double a, double b) {
    if (a >= 0.5 * b && a <= 2.0 * b) return std::log1p((a - b) / b);
    return std::log(a) - std::log(b);
}

double log_mean(double a, double b) {
    if (!(a >= 0.0) || !(b >= 0.0)) throw DomainError("log_mean: arguments must be nonnegative");
    if (a == 0.0 || b == 0.0) return 0.0;
    if (a == b) return a;
    if (a < b) std::swap(a, b);
    const double x = log_difference(a, b);
    if (std::abs(x) < kLogMeanSeriesThreshold) {
        const double x2 = x * x;
        return std::sqrt(a * b) * (1.0 + x2 / 24.0 + x2 * x2 / 1920.0);
    }
    return (a - b) / x;
}

LogMeanGradient log_mean_gradient(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) throw DomainError("log_mean_gradient: arguments must be positive");
    const double x = log_difference(a, b);
    return {log_mean_partial(x), log_mean_partial(-x)};
}

void require_positive_density(const SteadyState& steady, std::span<const double> u, const char* where) {
    if (u.size() != steady.grid.size()) {
        throw DomainError(std::string(where) + ": density has " + std::to_string(u.size()) + " entries, grid has " +
                          std::to_string(steady.grid.size()));
    }
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (!(u[i] > 0.0) || !std::isfinite(u[i])) {
            throw DomainError(std::string(where) + ": density must be strictly positive (entry " +
                              std::to_string(i) + ")");
        }
    }
}

namespace {

void require_size(const SteadyState& steady, std::span<const double> v, const char* where) {
    if (v.size() != steady.grid.size()) throw DomainError(std::string(where) + ": size mismatch");
}

}  // namespace

std::vector<double> edge_mobilities(const SteadyState& steady, std::span<const double> u) {
    const auto edges = steady.grid.edges();
    const auto& pi = steady.values;
    std::vector<double> w(edges.size());
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const Edge& edge = edges[e];
        w[e] = steady.edge_weights[e] * log_mean(u[edge.lo] / pi[edge.lo], u[edge.hi] / pi[edge.hi]);
    }
    return w;
}

double onsager_form(const SteadyState& steady, std::span<const double> u, std::span<const double> p,
                    std::span<const double> q) {
    require_positive_density(steady, u, "onsager_form");
    require_size(steady, p, "onsager_form");
    require_size(steady, q, "onsager_form");
    const auto edges = steady.grid.edges();
    const std::vector<double> w = edge_mobilities(steady, u);
    double sum = 0.0;
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const Edge& edge = edges[e];
        sum += w[e] * (p[edge.lo] - p[edge.hi]) * (q[edge.lo] - q[edge.hi]);
    }
    const double h = steady.grid.h();
    return steady.grid.cell_volume() * sum / (h * h);
}

std::vector<double> onsager_apply_with(const Grid& grid, std::span<const double> mobilities,
                                       std::span<const double> p) {
    const auto edges = grid.edges();
    const double inv_h2 = 1.0 / (grid.h() * grid.h());
    std::vector<double> out(grid.size(), 0.0);
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const Edge& edge = edges[e];
        const double flux = inv_h2 * mobilities[e] * (p[edge.lo] - p[edge.hi]);
        out[edge.lo] += flux;
        out[edge.hi] -= flux;
    }
    return out;
}

std::vector<double> onsager_apply(const SteadyState& steady, std::span<const double> u, std::span<const double> p) {
    require_positive_density(steady, u, "onsager_apply");
    require_size(steady, p, "onsager_apply");
    return onsager_apply_with(steady.grid, edge_mobilities(steady, u), p);
}

std::vector<double> onsager_split(const SteadyState& steady, std::span<const double> u, std::span<const double> p,
                                  std::span<const double> q) {
    require_positive_density(steady, u, "onsager_split");
    require_size(steady, p, "onsager_split");
    require_size(steady, q, "onsager_split");
    const auto edges = steady.grid.edges();
    const std::vector<double> w = edge_mobilities(steady, u);
    std::vector<double> parts(static_cast<std::size_t>(steady.grid.dim()), 0.0);
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const Edge& edge = edges[e];
        parts[static_cast<std::size_t>(edge.axis)] += w[e] * (p[edge.lo] - p[edge.hi]) * (q[edge.lo] - q[edge.hi]);
    }
    const double h = steady.grid.h();
    for (double& v : parts) v *= steady.grid.cell_volume() / (h * h);
    return parts;
}

}  // namespace qddlab
