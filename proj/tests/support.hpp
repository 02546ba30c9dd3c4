#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <span>
#include <vector>

#include "qddlab/grid.hpp"
#include "qddlab/markov.hpp"
#include "qddlab/potential.hpp"

namespace testing {

/// Log-normal cell values scaled to unit mass; `spread` is the standard deviation of the log.
inline std::vector<double> random_density(const qddlab::Grid& grid, std::mt19937_64& rng, double spread = 1.0) {
    std::normal_distribution<double> normal(0.0, spread);
    std::vector<double> u(grid.size());
    double sum = 0.0;
    for (double& x : u) {
        x = std::exp(normal(rng));
        sum += x;
    }
    for (double& x : u) x /= grid.cell_volume() * sum;
    return u;
}

/// Pi^h multiplied cellwise by exp(eps * z) and renormalised: a density close to equilibrium.
inline std::vector<double> perturbed_steady(const qddlab::SteadyState& steady, std::mt19937_64& rng, double eps) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> u(steady.grid.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        u[i] = steady.values[i] * std::exp(eps * normal(rng));
        sum += u[i];
    }
    for (double& x : u) x /= steady.grid.cell_volume() * sum;
    return u;
}

inline std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> v(n);
    for (double& x : v) x = normal(rng);
    return v;
}

inline double rel_diff(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline std::vector<double> axpy(std::span<const double> u, double eps, std::span<const double> xi) {
    std::vector<double> out(u.begin(), u.end());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += eps * xi[i];
    return out;
}

/// Steady state of a random tabulated potential (one table per direction).
inline qddlab::SteadyState random_table_steady(const qddlab::Grid& grid, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> uni(-2.0, 2.0);
    std::vector<qddlab::Potential1D> pots;
    for (int k = 0; k < grid.dim(); ++k) {
        std::vector<double> table(static_cast<std::size_t>(grid.n()));
        for (double& v : table) v = uni(rng);
        pots.push_back(qddlab::Potential1D::tabulated(table, 0.0));
    }
    return qddlab::steady_state(pots, grid);
}

}  // namespace testing
