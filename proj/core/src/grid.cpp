#include "qddlab/grid.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include <gsl/gsl_integration.h>

#include "qddlab/error.hpp"

namespace qddlab {

namespace {

std::vector<Edge> build_edges(int dim, int n, std::span<const std::size_t> strides, std::size_t size) {
    std::vector<Edge> edges;
    std::size_t count = static_cast<std::size_t>(dim) * static_cast<std::size_t>(n - 1);
    for (int k = 1; k < dim; ++k) count *= static_cast<std::size_t>(n);
    edges.reserve(count);
    for (std::size_t flat = 0; flat < size; ++flat) {
        for (int axis = 0; axis < dim; ++axis) {
            const auto c = (flat / strides[static_cast<std::size_t>(axis)]) % static_cast<std::size_t>(n);
            if (c + 1 < static_cast<std::size_t>(n)) {
                edges.push_back({flat, flat + strides[static_cast<std::size_t>(axis)], axis});
            }
        }
    }
    return edges;
}

}  // namespace

Grid::Grid(int dim, int n) : dim_(dim), n_(n) {
    if (dim < 1) throw DomainError("grid dimension must be >= 1, got " + std::to_string(dim));
    if (n < 2) throw DomainError("grid resolution must be >= 2, got " + std::to_string(n));
    h_ = 1.0 / n;
    size_ = 1;
    strides_.resize(static_cast<std::size_t>(dim));
    for (int k = 0; k < dim; ++k) {
        strides_[static_cast<std::size_t>(k)] = size_;
        if (size_ > std::numeric_limits<std::size_t>::max() / static_cast<std::size_t>(n)) {
            throw DomainError("grid too large");
        }
        size_ *= static_cast<std::size_t>(n);
    }
    cell_volume_ = std::pow(h_, dim);
    edges_ = std::make_shared<const std::vector<Edge>>(build_edges(dim, n, strides_, size_));
}

bool Grid::contains(const MultiIndex& index) const {
    if (index.coords.size() != static_cast<std::size_t>(dim_)) return false;
    for (int c : index.coords) {
        if (c < 1 || c > n_) return false;
    }
    return true;
}

std::size_t Grid::flat_index(const MultiIndex& index) const {
    if (!contains(index)) throw DomainError("multi-index outside the lattice");
    std::size_t flat = 0;
    for (int k = 0; k < dim_; ++k) {
        flat += static_cast<std::size_t>(index.coords[static_cast<std::size_t>(k)] - 1) *
                strides_[static_cast<std::size_t>(k)];
    }
    return flat;
}

MultiIndex Grid::multi_index(std::size_t flat) const {
    if (flat >= size_) throw DomainError("flat index " + std::to_string(flat) + " out of range");
    MultiIndex index;
    index.coords.resize(static_cast<std::size_t>(dim_));
    for (int k = 0; k < dim_; ++k) index.coords[static_cast<std::size_t>(k)] = coordinate(flat, k);
    return index;
}

int Grid::coordinate(std::size_t flat, int axis) const noexcept {
    return static_cast<int>((flat / strides_[static_cast<std::size_t>(axis)]) % static_cast<std::size_t>(n_)) + 1;
}

std::vector<MultiIndex> Grid::neighbors(const MultiIndex& index) const {
    if (!contains(index)) throw DomainError("multi-index outside the lattice");
    std::vector<MultiIndex> result;
    result.reserve(2 * static_cast<std::size_t>(dim_));
    for (std::size_t k = 0; k < static_cast<std::size_t>(dim_); ++k) {
        for (int step : {-1, +1}) {
            const int c = index.coords[k] + step;
            if (c < 1 || c > n_) continue;
            MultiIndex nb = index;
            nb.coords[k] = c;
            result.push_back(std::move(nb));
        }
    }
    return result;
}

std::vector<double> Grid::cell_center(std::size_t flat) const {
    std::vector<double> x(static_cast<std::size_t>(dim_));
    for (int k = 0; k < dim_; ++k) x[static_cast<std::size_t>(k)] = h_ * (coordinate(flat, k) - 0.5);
    return x;
}

double Density::mass(const Grid& grid) const {
    if (values_.size() != grid.size()) throw DomainError("density size does not match grid");
    return grid.cell_volume() * std::accumulate(values_.begin(), values_.end(), 0.0);
}

bool Density::strictly_positive() const {
    for (double v : values_) {
        if (!(v > 0.0)) return false;
    }
    return true;
}

QuadratureRule gauss_legendre_unit(int order) {
    if (order < 1) throw DomainError("quadrature order must be >= 1");
    gsl_integration_glfixed_table* table = gsl_integration_glfixed_table_alloc(static_cast<std::size_t>(order));
    if (table == nullptr) throw DomainError("cannot build Gauss-Legendre table of order " + std::to_string(order));
    QuadratureRule rule;
    rule.nodes.resize(static_cast<std::size_t>(order));
    rule.weights.resize(static_cast<std::size_t>(order));
    for (std::size_t i = 0; i < static_cast<std::size_t>(order); ++i) {
        gsl_integration_glfixed_point(0.0, 1.0, i, &rule.nodes[i], &rule.weights[i], table);
    }
    gsl_integration_glfixed_table_free(table);
    return rule;
}

Embedding discretize(const Grid& grid, const ScalarField& f, int quadrature_order) {
    const QuadratureRule rule = gauss_legendre_unit(quadrature_order);
    const auto q = static_cast<std::size_t>(quadrature_order);
    const auto dim = static_cast<std::size_t>(grid.dim());
    const double h = grid.h();

    std::vector<double> averages(grid.size());
    std::vector<std::size_t> odometer(dim);
    std::vector<double> x(dim);
    for (std::size_t flat = 0; flat < grid.size(); ++flat) {
        std::fill(odometer.begin(), odometer.end(), 0);
        double sum = 0.0;
        while (true) {
            double w = 1.0;
            for (std::size_t k = 0; k < dim; ++k) {
                const int c = grid.coordinate(flat, static_cast<int>(k));
                x[k] = h * (c - 1 + rule.nodes[odometer[k]]);
                w *= rule.weights[odometer[k]];
            }
            sum += w * f(x);
            std::size_t k = 0;
            while (k < dim && ++odometer[k] == q) odometer[k++] = 0;
            if (k == dim) break;
        }
        if (sum < 0.0 || !std::isfinite(sum)) {
            throw DomainError("discretize: field is negative or non-finite on cell " + std::to_string(flat));
        }
        averages[flat] = sum;
    }

    const double mass = grid.cell_volume() * std::accumulate(averages.begin(), averages.end(), 0.0);
    if (!(mass > 0.0)) throw DomainError("discretize: field is identically zero (degenerate input)");
    const double rescale = 1.0 / mass;
    for (double& v : averages) v *= rescale;
    return {Density(std::move(averages)), rescale};
}

}  // namespace qddlab
