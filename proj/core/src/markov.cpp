#include "qddlab/markov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "qddlab/error.hpp"

namespace qddlab {

TriFactor tri_factor(std::span<const double> steady_factor, double h) {
    const std::size_t n = steady_factor.size();
    if (n < 2) throw DomainError("tri_factor: need at least two states");
    if (!(h > 0.0)) throw DomainError("tri_factor: h must be positive");
    for (double p : steady_factor) {
        if (!(p > 0.0)) throw DomainError("tri_factor: steady factor must be strictly positive");
    }
    const double inv_h2 = 1.0 / (h * h);
    TriFactor f;
    f.h = h;
    f.alpha.resize(n - 1);
    f.beta.resize(n - 1);
    f.sigma.resize(n);
    for (std::size_t j = 0; j + 1 < n; ++j) {
        f.alpha[j] = inv_h2 * std::sqrt(steady_factor[j + 1] / steady_factor[j]);
        f.beta[j] = inv_h2 * std::sqrt(steady_factor[j] / steady_factor[j + 1]);
    }
    f.sigma[0] = f.alpha[0];
    f.sigma[n - 1] = f.beta[n - 2];
    for (std::size_t j = 1; j + 1 < n; ++j) f.sigma[j] = f.alpha[j] + f.beta[j - 1];
    return f;
}

std::vector<double> Generator::apply(std::span<const double> u) const {
    if (u.size() != size()) throw DomainError("Generator::apply: size mismatch");
    Eigen::Map<const Eigen::VectorXd> x(u.data(), static_cast<Eigen::Index>(u.size()));
    std::vector<double> out(u.size());
    Eigen::Map<Eigen::VectorXd>(out.data(), static_cast<Eigen::Index>(out.size())) = matrix_ * x;
    return out;
}

std::vector<double> Generator::apply_transpose(std::span<const double> psi) const {
    if (psi.size() != size()) throw DomainError("Generator::apply_transpose: size mismatch");
    Eigen::Map<const Eigen::VectorXd> x(psi.data(), static_cast<Eigen::Index>(psi.size()));
    std::vector<double> out(psi.size());
    Eigen::Map<Eigen::VectorXd>(out.data(), static_cast<Eigen::Index>(out.size())) = matrix_.transpose() * x;
    return out;
}

Generator assemble(std::vector<TriFactor> factors, const Grid& grid) {
    if (factors.size() != static_cast<std::size_t>(grid.dim())) {
        throw DomainError("assemble: need one factor per direction");
    }
    for (const TriFactor& f : factors) {
        if (f.size() != static_cast<std::size_t>(grid.n())) throw DomainError("assemble: factor size != N");
    }
    const int dim = grid.dim();
    const int n = grid.n();
    SparseRowMatrix m(static_cast<Eigen::Index>(grid.size()), static_cast<Eigen::Index>(grid.size()));
    m.reserve(Eigen::VectorXi::Constant(static_cast<Eigen::Index>(grid.size()), 2 * dim + 1));
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto row = static_cast<Eigen::Index>(i);
        // Columns in increasing order: lower neighbours by decreasing axis, diagonal, upper by increasing axis.
        for (int k = dim - 1; k >= 0; --k) {
            const int c = grid.coordinate(i, k);
            if (c > 1) {
                const auto& f = factors[static_cast<std::size_t>(k)];
                m.insert(row, static_cast<Eigen::Index>(i - grid.stride(k))) = f.alpha[static_cast<std::size_t>(c - 2)];
            }
        }
        double diag = 0.0;
        for (int k = 0; k < dim; ++k) {
            diag += factors[static_cast<std::size_t>(k)].sigma[static_cast<std::size_t>(grid.coordinate(i, k) - 1)];
        }
        m.insert(row, row) = -diag;
        for (int k = 0; k < dim; ++k) {
            const int c = grid.coordinate(i, k);
            if (c < n) {
                const auto& f = factors[static_cast<std::size_t>(k)];
                m.insert(row, static_cast<Eigen::Index>(i + grid.stride(k))) = f.beta[static_cast<std::size_t>(c - 1)];
            }
        }
    }
    m.makeCompressed();
    return Generator(grid, std::move(factors), std::move(m));
}

Generator assemble_direct(const SteadyState& steady) {
    const Grid& grid = steady.grid;
    const auto& pi = steady.values;
    const double inv_h2 = 1.0 / (grid.h() * grid.h());
    const int dim = grid.dim();
    SparseRowMatrix m(static_cast<Eigen::Index>(grid.size()), static_cast<Eigen::Index>(grid.size()));
    m.reserve(Eigen::VectorXi::Constant(static_cast<Eigen::Index>(grid.size()), 2 * dim + 1));
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto row = static_cast<Eigen::Index>(i);
        for (int k = dim - 1; k >= 0; --k) {
            if (grid.coordinate(i, k) > 1) {
                const std::size_t j = i - grid.stride(k);
                m.insert(row, static_cast<Eigen::Index>(j)) = inv_h2 * std::sqrt(pi[i] / pi[j]);
            }
        }
        // Diagonal: minus the total rate of leaving state i.
        double diag = 0.0;
        for (int k = 0; k < dim; ++k) {
            const int c = grid.coordinate(i, k);
            if (c > 1) diag += inv_h2 * std::sqrt(pi[i - grid.stride(k)] / pi[i]);
            if (c < grid.n()) diag += inv_h2 * std::sqrt(pi[i + grid.stride(k)] / pi[i]);
        }
        m.insert(row, row) = -diag;
        for (int k = 0; k < dim; ++k) {
            if (grid.coordinate(i, k) < grid.n()) {
                const std::size_t j = i + grid.stride(k);
                m.insert(row, static_cast<Eigen::Index>(j)) = inv_h2 * std::sqrt(pi[i] / pi[j]);
            }
        }
    }
    m.makeCompressed();
    return Generator(grid, {}, std::move(m));
}

Generator make_generator(const SteadyState& steady) {
    std::vector<TriFactor> factors;
    factors.reserve(steady.factors.size());
    for (const auto& f : steady.factors) factors.push_back(tri_factor(f, steady.grid.h()));
    return assemble(std::move(factors), steady.grid);
}

SparseRowMatrix symmetrized(const Generator& gen, const SteadyState& steady) {
    if (steady.values.size() != gen.size()) throw DomainError("symmetrized: steady state does not match generator");
    SparseRowMatrix s = gen.matrix();
    for (Eigen::Index r = 0; r < s.outerSize(); ++r) {
        for (SparseRowMatrix::InnerIterator it(s, r); it; ++it) {
            if (it.col() != it.row()) {
                it.valueRef() *= std::sqrt(steady.values[static_cast<std::size_t>(it.col())] /
                                           steady.values[static_cast<std::size_t>(it.row())]);
            }
        }
    }
    return s;
}

double factor_spectral_gap(const TriFactor& factor) {
    const auto n = static_cast<Eigen::Index>(factor.size());
    Eigen::VectorXd diag(n);
    Eigen::VectorXd sub(n - 1);
    for (Eigen::Index j = 0; j < n; ++j) diag[j] = factor.sigma[static_cast<std::size_t>(j)];
    for (Eigen::Index j = 0; j + 1 < n; ++j) {
        sub[j] = -std::sqrt(factor.alpha[static_cast<std::size_t>(j)] * factor.beta[static_cast<std::size_t>(j)]);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw NumericError("tridiagonal eigensolve failed", 0.0);
    return solver.eigenvalues()[1];
}

SpectralGap spectral_gap(const Generator& gen, const SteadyState& steady, std::size_t dense_cap) {
    SpectralGap gap;
    for (const TriFactor& f : gen.factors()) gap.factor_gaps.push_back(factor_spectral_gap(f));

    if (gen.size() <= dense_cap) {
        const Eigen::MatrixXd s = -Eigen::MatrixXd(symmetrized(gen, steady));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(s, Eigen::EigenvaluesOnly);
        if (solver.info() != Eigen::Success) throw NumericError("dense eigensolve failed", 0.0);
        gap.value = solver.eigenvalues()[1];
        gap.dense = true;
        return gap;
    }
    if (gap.factor_gaps.empty()) {
        throw NumericError("spectral_gap: " + std::to_string(gen.size()) +
                               " states exceed the dense cap and the generator has no 1-D factors",
                           0.0);
    }
    gap.value = *std::min_element(gap.factor_gaps.begin(), gap.factor_gaps.end());
    return gap;
}

namespace {

template <class Combine>
Modulus interior_min(const TriFactor& f, Combine combine) {
    Modulus m;
    const std::size_t n = f.size();
    if (n < 3) {
        m.value = std::numeric_limits<double>::infinity();
        m.empty = true;
        return m;
    }
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double next_alpha = (i + 1 < n - 1) ? f.alpha[i + 1] : 0.0;
        const double da = f.alpha[i] - next_alpha;
        const double db = f.beta[i] - f.beta[i - 1];
        best = std::min(best, combine(da, db, m));
    }
    m.value = m.nonconvex ? 0.0 : best;
    return m;
}

}  // namespace

Modulus cdpp_modulus(const TriFactor& factor) {
    return interior_min(factor, [](double da, double db, Modulus&) { return da + db; });
}

Modulus mielke_modulus(const TriFactor& factor) {
    return interior_min(factor, [](double da, double db, Modulus& m) {
        if (da < 0.0 || db < 0.0) {
            m.nonconvex = true;
            return 0.0;
        }
        return 2.0 * std::sqrt(da * db);
    });
}

}  // namespace qddlab
