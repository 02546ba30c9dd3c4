#include "qddlab/functionals.hpp"

#include <cmath>

#include "qddlab/error.hpp"
#include "qddlab/metric.hpp"

namespace qddlab {

namespace {

// r log r - r + 1 at r = 1 + delta, accurate for small |delta|.
double entropy_density(double delta) {
    if (std::abs(delta) < 0.1) {
        // sum_{n>=2} (-1)^n delta^n / (n (n-1))
        double power = delta * delta;
        double sum = 0.0;
        for (int n = 2; n <= 22; ++n) {
            sum += ((n % 2 == 0) ? power : -power) / (n * (n - 1.0));
            power *= delta;
        }
        return sum;
    }
    const double r = 1.0 + delta;
    return r * std::log1p(delta) - delta;
}

void require_same_size(std::size_t expected, std::span<const double> v, const char* where) {
    if (v.size() != expected) throw DomainError(std::string(where) + ": size mismatch");
}

}  // namespace

double pairing(const Grid& grid, std::span<const double> p, std::span<const double> xi) {
    require_same_size(grid.size(), p, "pairing");
    require_same_size(grid.size(), xi, "pairing");
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) sum += p[i] * xi[i];
    return grid.cell_volume() * sum;
}

double entropy(std::span<const double> u, const SteadyState& steady) {
    require_positive_density(steady, u, "entropy");
    const auto& pi = steady.values;
    // h^d sum U log(U/Pi) = h^d sum Pi phi(U/Pi) + h^d sum (U - Pi)
    double divergence = 0.0;
    double mass_gap = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double diff = u[i] - pi[i];
        divergence += pi[i] * entropy_density(diff / pi[i]);
        mass_gap += diff;
    }
    return steady.grid.cell_volume() * (divergence + mass_gap);
}

std::vector<double> entropy_gradient(std::span<const double> u, const SteadyState& steady) {
    require_positive_density(steady, u, "entropy_gradient");
    std::vector<double> g(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) g[i] = 1.0 + log_difference(u[i], steady.values[i]);
    return g;
}

double fisher(std::span<const double> u, const SteadyState& steady) {
    require_positive_density(steady, u, "fisher");
    const auto edges = steady.grid.edges();
    const auto& pi = steady.values;
    double sum = 0.0;
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const Edge& edge = edges[e];
        const double ri = u[edge.lo] / pi[edge.lo];
        const double rj = u[edge.hi] / pi[edge.hi];
        const double dlog = log_difference(ri, rj);
        sum += steady.edge_weights[e] * log_mean(ri, rj) * dlog * dlog;
    }
    const double h = steady.grid.h();
    return steady.grid.cell_volume() * sum / (h * h);
}

double fisher_alt(std::span<const double> u, const SteadyState& steady) {
    require_positive_density(steady, u, "fisher_alt");
    const auto edges = steady.grid.edges();
    const auto& pi = steady.values;
    double sum = 0.0;
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const Edge& edge = edges[e];
        const double ri = u[edge.lo] / pi[edge.lo];
        const double rj = u[edge.hi] / pi[edge.hi];
        sum += steady.edge_weights[e] * (ri - rj) * log_difference(ri, rj);
    }
    const double h = steady.grid.h();
    return steady.grid.cell_volume() * sum / (h * h);
}

std::vector<double> fisher_gradient(std::span<const double> u, const SteadyState& steady, const Generator& gen) {
    require_positive_density(steady, u, "fisher_gradient");
    const std::vector<double> mu = gen.apply(u);
    std::vector<double> log_ratio(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) log_ratio[i] = log_difference(u[i], steady.values[i]);
    std::vector<double> s = gen.apply_transpose(log_ratio);
    for (std::size_t i = 0; i < u.size(); ++i) s[i] += mu[i] / u[i];
    return s;
}

double entropy_hessian_form(const Grid& grid, std::span<const double> u, std::span<const double> xi) {
    require_same_size(grid.size(), u, "entropy_hessian_form");
    require_same_size(grid.size(), xi, "entropy_hessian_form");
    double sum = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (!(u[i] > 0.0)) throw DomainError("entropy_hessian_form: density must be strictly positive");
        sum += xi[i] * xi[i] / u[i];
    }
    return grid.cell_volume() * sum;
}

double fisher_hessian_form(std::span<const double> u, const SteadyState& steady, std::span<const double> xi) {
    require_positive_density(steady, u, "fisher_hessian_form");
    require_same_size(u.size(), xi, "fisher_hessian_form");
    const auto edges = steady.grid.edges();
    const auto& pi = steady.values;
    double sum = 0.0;
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const Edge& edge = edges[e];
        const double ri = u[edge.lo] / pi[edge.lo];
        const double rj = u[edge.hi] / pi[edge.hi];
        const double d = xi[edge.lo] / u[edge.lo] - xi[edge.hi] / u[edge.hi];
        sum += steady.edge_weights[e] * (ri + rj) * d * d;
    }
    const double h = steady.grid.h();
    return steady.grid.cell_volume() * sum / (h * h);
}

double l1_distance(std::span<const double> u, const SteadyState& steady) {
    require_same_size(steady.grid.size(), u, "l1_distance");
    double sum = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) sum += std::abs(u[i] - steady.values[i]);
    return steady.grid.cell_volume() * sum;
}

CdiMargin cdi_margin(std::span<const double> u, const SteadyState& steady, const Generator& gen) {
    const std::vector<double> s = fisher_gradient(u, steady, gen);
    const std::vector<double> mu = gen.apply(u);
    const double j = pairing(steady.grid, s, mu);
    return {j, 2.0 * steady.lambda_h * fisher(u, steady)};
}

FunctionalReport report(std::span<const double> u, const SteadyState& steady) {
    FunctionalReport r{};
    r.entropy = entropy(u, steady);
    r.fisher = fisher(u, steady);
    r.fisher_alt = fisher_alt(u, steady);
    r.l1_to_steady = l1_distance(u, steady);
    r.ck_slack = std::sqrt(2.0 * std::max(0.0, r.entropy)) - r.l1_to_steady;
    return r;
}

}  // namespace qddlab
