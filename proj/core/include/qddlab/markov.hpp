#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/SparseCore>

#include "qddlab/grid.hpp"
#include "qddlab/potential.hpp"

namespace qddlab {

using SparseRowMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// One-dimensional tridiagonal generator factor.
///
/// With 0-based storage, `alpha[j]` is the sub-diagonal entry (row j+1, column j),
/// h^-2 sqrt(Pi_{j+1}/Pi_j): the rate of jumping from j up to j+1.
/// `beta[j]` is the super-diagonal entry (row j, column j+1), h^-2 sqrt(Pi_j/Pi_{j+1}):
/// the rate of jumping from j+1 down to j. `sigma[j]` is the magnitude of the diagonal,
/// so every column of the matrix sums to zero.
struct TriFactor {
    double h = 0.0;
    std::vector<double> alpha;
    std::vector<double> beta;
    std::vector<double> sigma;

    std::size_t size() const noexcept { return sigma.size(); }
};

TriFactor tri_factor(std::span<const double> steady_factor, double h);

/// The adjoint generator M^h of the reversible chain on the lattice (columns sum to zero).
class Generator {
public:
    Generator(Grid grid, std::vector<TriFactor> factors, SparseRowMatrix matrix)
        : grid_(std::move(grid)), factors_(std::move(factors)), matrix_(std::move(matrix)) {}

    const Grid& grid() const noexcept { return grid_; }
    /// Empty for generators assembled entrywise from the full steady state.
    std::span<const TriFactor> factors() const noexcept { return factors_; }
    const SparseRowMatrix& matrix() const noexcept { return matrix_; }
    std::size_t size() const noexcept { return grid_.size(); }

    /// M^h U
    std::vector<double> apply(std::span<const double> u) const;
    /// (M^h)^T psi
    std::vector<double> apply_transpose(std::span<const double> psi) const;

private:
    Grid grid_;
    std::vector<TriFactor> factors_;
    SparseRowMatrix matrix_;
};

/// Kronecker-sum assembly of the d one-dimensional factors.
Generator assemble(std::vector<TriFactor> factors, const Grid& grid);
/// Entrywise assembly from the full steady state: M_ij = h^-2 sqrt(Pi_i/Pi_j) for neighbours.
Generator assemble_direct(const SteadyState& steady);
/// Factor construction plus Kronecker assembly for a steady state.
Generator make_generator(const SteadyState& steady);

struct SpectralGap {
    double value = 0.0;
    /// True when the full symmetrised matrix was diagonalised.
    bool dense = false;
    /// Gap of each one-dimensional factor (empty without factors).
    std::vector<double> factor_gaps;
};

/// Smallest nonzero eigenvalue of the tridiagonal factor's negated matrix.
double factor_spectral_gap(const TriFactor& factor);

/// Smallest nonzero eigenvalue of -M^h. Uses a dense symmetric eigensolve of
/// D^{-1/2} M D^{1/2} (D = diag Pi^h) up to `dense_cap` states, otherwise the
/// minimum over the factor gaps.
SpectralGap spectral_gap(const Generator& gen, const SteadyState& steady, std::size_t dense_cap = 4096);

/// Result of a min over the interior indices; `empty` when there are none (N < 3).
struct Modulus {
    double value = 0.0;
    bool empty = false;
    /// A negative rate difference was met (non-convex table); value is then 0.
    bool nonconvex = false;
};

/// min_i (alpha_i - alpha_{i+1}) + (beta_i - beta_{i-1}), i = 2..N-1, alpha_N := 0.
Modulus cdpp_modulus(const TriFactor& factor);
/// 2 min_i sqrt((alpha_i - alpha_{i+1}) (beta_i - beta_{i-1})) over the same range.
Modulus mielke_modulus(const TriFactor& factor);

/// Symmetric form D^{-1/2} M D^{1/2}; detailed balance makes it symmetric.
SparseRowMatrix symmetrized(const Generator& gen, const SteadyState& steady);

}  // namespace qddlab
