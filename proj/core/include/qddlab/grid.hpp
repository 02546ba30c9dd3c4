#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace qddlab {

/// Lattice point of the cubic grid, one coordinate per direction, each in 1..N.
struct MultiIndex {
    std::vector<int> coords;

    friend auto operator<=>(const MultiIndex&, const MultiIndex&) = default;
};

/// Unordered pair of neighbouring cells, stored by flat index.
/// `hi` is the neighbour of `lo` one step up along `axis`.
struct Edge {
    std::size_t lo;
    std::size_t hi;
    int axis;
};

/// The lattice {1..N}^d covering the unit cube with cells of side h = 1/N.
///
/// Flat indices are row-major with coordinate 1 varying fastest:
/// flat = sum_k (j_k - 1) * N^(k-1). Copies share the (immutable) edge table.
class Grid {
public:
    Grid(int dim, int n);

    int dim() const noexcept { return dim_; }
    int n() const noexcept { return n_; }
    double h() const noexcept { return h_; }
    /// h^d, the weight of one cell in every discrete integral.
    double cell_volume() const noexcept { return cell_volume_; }
    std::size_t size() const noexcept { return size_; }
    std::size_t stride(int axis) const { return strides_.at(static_cast<std::size_t>(axis)); }

    bool contains(const MultiIndex& index) const;
    std::size_t flat_index(const MultiIndex& index) const;
    MultiIndex multi_index(std::size_t flat) const;
    /// Coordinate (1-based) of a flat index along one axis.
    int coordinate(std::size_t flat, int axis) const noexcept;

    /// Lattice points at distance one, ordered by axis and then -1 before +1.
    /// No wraparound: boundary cells simply have fewer neighbours.
    std::vector<MultiIndex> neighbors(const MultiIndex& index) const;

    /// Every unordered neighbour pair exactly once, ordered by (lo, axis).
    std::span<const Edge> edges() const noexcept { return *edges_; }

    std::vector<double> cell_center(std::size_t flat) const;

private:
    int dim_;
    int n_;
    double h_;
    double cell_volume_;
    std::size_t size_;
    std::vector<std::size_t> strides_;
    std::shared_ptr<const std::vector<Edge>> edges_;
};

/// A nonnegative cell-wise density U on a grid; h^d * sum(U) is its mass.
class Density {
public:
    Density() = default;
    explicit Density(std::vector<double> values) : values_(std::move(values)) {}

    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    double& operator[](std::size_t i) { return values_[i]; }
    std::span<const double> values() const noexcept { return values_; }
    std::span<double> values() noexcept { return values_; }
    const std::vector<double>& vector() const noexcept { return values_; }

    double mass(const Grid& grid) const;
    bool strictly_positive() const;

private:
    std::vector<double> values_;
};

using ScalarField = std::function<double(std::span<const double>)>;

struct Embedding {
    Density density;
    /// Factor applied to the raw cell averages to reach unit mass.
    double rescale;
};

/// Cell averages of f by tensorised Gauss-Legendre quadrature, rescaled to unit mass.
Embedding discretize(const Grid& grid, const ScalarField& f, int quadrature_order = 5);

/// Nodes and weights of the Gauss-Legendre rule of the given order on [0, 1].
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
QuadratureRule gauss_legendre_unit(int order);

}  // namespace qddlab
