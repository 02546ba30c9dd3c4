#include "qddlab/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>

#include "qddlab/functionals.hpp"
#include "qddlab/metric.hpp"

namespace qddlab {

void StepperConfig::validate() const {
    if (!(tau > 0.0) || !std::isfinite(tau)) throw ConfigError("tau", "must be positive");
    if (!(newton_tol > 0.0)) throw ConfigError("newton_tol", "must be positive");
    if (newton_max_iter < 1) throw ConfigError("newton_max_iter", "must be at least 1");
    if (max_halvings < 0) throw ConfigError("max_halvings", "must be nonnegative");
}

namespace {

using Eigen::Index;

Eigen::Map<const Eigen::VectorXd> view(std::span<const double> v) {
    return {v.data(), static_cast<Index>(v.size())};
}

std::vector<double> to_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

SparseColMatrix identity(Index n) {
    SparseColMatrix id(n, n);
    id.setIdentity();
    return id;
}

// Solves A x = b with a direct factorisation for small systems and BiCGSTAB otherwise.
Eigen::VectorXd solve_general(const SparseColMatrix& a, const Eigen::VectorXd& b) {
    if (static_cast<std::size_t>(a.rows()) <= kDirectSolveLimit) {
        Eigen::SparseLU<SparseColMatrix> lu;
        lu.compute(a);
        if (lu.info() != Eigen::Success) throw NumericError("sparse LU factorisation failed: " + lu.lastErrorMessage(), 0.0);
        Eigen::VectorXd x = lu.solve(b);
        if (lu.info() != Eigen::Success) throw NumericError("sparse LU solve failed", 0.0);
        return x;
    }
    Eigen::BiCGSTAB<SparseColMatrix, Eigen::IncompleteLUT<double>> solver;
    solver.setTolerance(1e-14);
    solver.compute(a);
    Eigen::VectorXd x = solver.solve(b);
    if (solver.info() != Eigen::Success) throw NumericError("BiCGSTAB did not converge", solver.error());
    return x;
}

}  // namespace

struct FpStepper::Impl {
    bool direct = true;
    Eigen::SparseLU<SparseColMatrix> lu;
    // the iterative solver references its matrix, so it lives here
    SparseColMatrix system;
    Eigen::ConjugateGradient<SparseColMatrix, Eigen::Lower | Eigen::Upper> cg;
    Eigen::VectorXd sqrt_pi;
};

FpStepper::FpStepper(const Generator& gen, const SteadyState& steady, double tau)
    : impl_(std::make_unique<Impl>()), tau_(tau) {
    if (!(tau > 0.0)) throw DomainError("fp step: tau must be positive");
    const auto n = static_cast<Index>(gen.size());
    if (gen.size() <= kDirectSolveLimit) {
        const SparseColMatrix a = identity(n) - tau * SparseColMatrix(gen.matrix());
        impl_->lu.compute(a);
        if (impl_->lu.info() != Eigen::Success) throw NumericError("fp step: factorisation failed", 0.0);
        return;
    }
    // Id - tau M is similar to the symmetric positive definite Id - tau D^-1/2 M D^1/2.
    impl_->direct = false;
    impl_->sqrt_pi.resize(n);
    for (Index i = 0; i < n; ++i) impl_->sqrt_pi[i] = std::sqrt(steady.values[static_cast<std::size_t>(i)]);
    impl_->system = identity(n) - tau * SparseColMatrix(symmetrized(gen, steady));
    impl_->cg.setTolerance(1e-14);
    impl_->cg.compute(impl_->system);
}

FpStepper::~FpStepper() = default;
FpStepper::FpStepper(FpStepper&&) noexcept = default;
FpStepper& FpStepper::operator=(FpStepper&&) noexcept = default;

std::vector<double> FpStepper::step(std::span<const double> u) const {
    const Eigen::Map<const Eigen::VectorXd> b = view(u);
    if (impl_->direct) {
        if (static_cast<Index>(u.size()) != impl_->lu.rows()) throw DomainError("fp step: size mismatch");
        Eigen::VectorXd x = impl_->lu.solve(b);
        if (impl_->lu.info() != Eigen::Success) throw NumericError("fp step: solve failed", 0.0);
        return to_vector(x);
    }
    if (static_cast<Index>(u.size()) != impl_->sqrt_pi.size()) throw DomainError("fp step: size mismatch");
    const Eigen::VectorXd rhs = b.cwiseQuotient(impl_->sqrt_pi);
    const Eigen::VectorXd y = impl_->cg.solve(rhs);
    if (impl_->cg.info() != Eigen::Success) throw NumericError("fp step: CG did not converge", impl_->cg.error());
    return to_vector(y.cwiseProduct(impl_->sqrt_pi));
}

std::vector<double> fp_step(const Generator& gen, const SteadyState& steady, std::span<const double> u, double tau) {
    return FpStepper(gen, steady, tau).step(u);
}

std::vector<double> qdd_rhs(std::span<const double> u, const SteadyState& steady, const Generator& gen) {
    const std::vector<double> s = fisher_gradient(u, steady, gen);
    return onsager_apply_with(steady.grid, edge_mobilities(steady, u), s);
}

SparseColMatrix qdd_jacobian(std::span<const double> u, const SteadyState& steady, const Generator& gen) {
    require_positive_density(steady, u, "qdd_jacobian");
    const Grid& grid = steady.grid;
    const auto n = static_cast<Index>(u.size());
    const auto& pi = steady.values;
    const double inv_h2 = 1.0 / (grid.h() * grid.h());

    const std::vector<double> s = fisher_gradient(u, steady, gen);
    const std::vector<double> mu = gen.apply(u);
    const std::vector<double> w = edge_mobilities(steady, u);

    // dS/dU = diag(1/U) M - diag(MU / U^2) + M^T diag(1/U)
    const SparseColMatrix m(gen.matrix());
    Eigen::VectorXd inv_u(n);
    Eigen::VectorXd curvature(n);
    for (Index i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        inv_u[i] = 1.0 / u[k];
        curvature[i] = mu[k] / (u[k] * u[k]);
    }
    SparseColMatrix ds = inv_u.asDiagonal() * m;
    ds += SparseColMatrix(m.transpose()) * inv_u.asDiagonal();
    SparseColMatrix diag_part(n, n);
    {
        std::vector<Eigen::Triplet<double>> t;
        t.reserve(static_cast<std::size_t>(n));
        for (Index i = 0; i < n; ++i) t.emplace_back(i, i, curvature[i]);
        diag_part.setFromTriplets(t.begin(), t.end());
    }
    ds -= diag_part;

    // F = L_w S with the weighted edge Laplacian L_w, plus the mobility derivative B.
    const auto edges = grid.edges();
    std::vector<Eigen::Triplet<double>> lap;
    std::vector<Eigen::Triplet<double>> mob;
    lap.reserve(4 * edges.size());
    mob.reserve(4 * edges.size());
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const Edge& edge = edges[e];
        const auto lo = static_cast<Index>(edge.lo);
        const auto hi = static_cast<Index>(edge.hi);
        const double c = inv_h2 * w[e];
        lap.emplace_back(lo, lo, c);
        lap.emplace_back(hi, hi, c);
        lap.emplace_back(lo, hi, -c);
        lap.emplace_back(hi, lo, -c);

        const LogMeanGradient g = log_mean_gradient(u[edge.lo] / pi[edge.lo], u[edge.hi] / pi[edge.hi]);
        const double dw_lo = steady.edge_weights[e] * g.da / pi[edge.lo];
        const double dw_hi = steady.edge_weights[e] * g.db / pi[edge.hi];
        const double flux = inv_h2 * (s[edge.lo] - s[edge.hi]);
        mob.emplace_back(lo, lo, flux * dw_lo);
        mob.emplace_back(lo, hi, flux * dw_hi);
        mob.emplace_back(hi, lo, -flux * dw_lo);
        mob.emplace_back(hi, hi, -flux * dw_hi);
    }
    SparseColMatrix l(n, n);
    l.setFromTriplets(lap.begin(), lap.end());
    SparseColMatrix b(n, n);
    b.setFromTriplets(mob.begin(), mob.end());

    SparseColMatrix j = l * ds;
    j += b;
    j.makeCompressed();
    return j;
}

Eigen::MatrixXd qdd_jacobian_fd(std::span<const double> u, const SteadyState& steady, const Generator& gen,
                                double rel_step) {
    require_positive_density(steady, u, "qdd_jacobian_fd");
    if (!(rel_step > 0.0 && rel_step < 1.0)) throw DomainError("qdd_jacobian_fd: rel_step must lie in (0, 1)");
    const auto n = static_cast<Index>(u.size());
    Eigen::MatrixXd j(n, n);
    std::vector<double> probe(u.begin(), u.end());
    for (Index k = 0; k < n; ++k) {
        const auto kk = static_cast<std::size_t>(k);
        const double step = rel_step * u[kk];
        probe[kk] = u[kk] + step;
        const std::vector<double> fp = qdd_rhs(probe, steady, gen);
        probe[kk] = u[kk] - step;
        const std::vector<double> fm = qdd_rhs(probe, steady, gen);
        probe[kk] = u[kk];
        for (Index i = 0; i < n; ++i) {
            const auto ii = static_cast<std::size_t>(i);
            j(i, k) = (fp[ii] - fm[ii]) / (2.0 * step);
        }
    }
    return j;
}

namespace {

std::vector<double> euler_residual(std::span<const double> u, std::span<const double> u_prev, double tau,
                                   const SteadyState& steady, const Generator& gen) {
    const std::vector<double> f = qdd_rhs(u, steady, gen);
    std::vector<double> g(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) g[i] = u[i] - u_prev[i] - tau * f[i];
    return g;
}

bool positive(const Eigen::VectorXd& v) {
    for (Index i = 0; i < v.size(); ++i) {
        if (!(v[i] > 0.0) || !std::isfinite(v[i])) return false;
    }
    return true;
}

}  // namespace

StepResult qdd_step(std::span<const double> u_prev, const SteadyState& steady, const Generator& gen,
                    const StepperConfig& cfg) {
    cfg.validate();
    require_positive_density(steady, u_prev, "qdd_step");
    const auto n = static_cast<Index>(u_prev.size());
    const SparseColMatrix id = identity(n);

    StepResult result;
    Eigen::VectorXd u = view(u_prev);
    std::vector<double> g = euler_residual(u_prev, u_prev, cfg.tau, steady, gen);
    result.diagnostics.residuals.push_back(max_abs(g));

    // At least one update is taken, so a converged step reports one iteration.
    for (int iter = 1; iter <= cfg.newton_max_iter; ++iter) {
        const std::span<const double> current(u.data(), static_cast<std::size_t>(n));
        SparseColMatrix jf;
        if (cfg.jacobian == JacobianMode::analytic) {
            jf = qdd_jacobian(current, steady, gen);
        } else {
            jf = qdd_jacobian_fd(current, steady, gen).sparseView();
        }
        const SparseColMatrix a = id - cfg.tau * jf;
        const Eigen::VectorXd delta = solve_general(a, -view(g));

        Eigen::VectorXd candidate = u + delta;
        double theta = 1.0;
        int halvings = 0;
        while (!positive(candidate)) {
            if (cfg.damping == Damping::undamped) {
                throw NumericError("qdd step: Newton iterate left the positive orthant (undamped)",
                                   result.diagnostics.residuals.back());
            }
            if (halvings == cfg.max_halvings) {
                throw NumericError("qdd step: positivity not restored after " + std::to_string(halvings) +
                                       " halvings",
                                   result.diagnostics.residuals.back());
            }
            theta *= 0.5;
            ++halvings;
            candidate = u + theta * delta;
        }
        result.diagnostics.halvings += halvings;
        u = std::move(candidate);

        g = euler_residual(std::span<const double>(u.data(), static_cast<std::size_t>(n)), u_prev, cfg.tau, steady,
                           gen);
        const double r = max_abs(g);
        result.diagnostics.residuals.push_back(r);
        result.diagnostics.iterations = iter;
        if (!std::isfinite(r)) throw NumericError("qdd step: residual is not finite", r);
        if (r <= cfg.newton_tol) {
            result.density = to_vector(u);
            return result;
        }
    }
    throw NumericError("qdd step: Newton did not converge in " + std::to_string(cfg.newton_max_iter) +
                           " iterations (residual " + std::to_string(result.diagnostics.residuals.back()) + ")",
                       result.diagnostics.residuals.back());
}

namespace {

double mass_of(const Grid& grid, std::span<const double> u) {
    double sum = 0.0;
    for (double x : u) sum += x;
    return grid.cell_volume() * sum;
}

double decay_rate(double previous, double current, double tau) {
    if (!(previous > 0.0) || !(current > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    return (std::log(previous) - std::log(current)) / tau;
}

}  // namespace

RunRecord evolve(std::span<const double> u0, const SteadyState& steady, const Generator& gen,
                 const StepperConfig& cfg, std::size_t steps, FlowMode mode, const Observer& observer) {
    cfg.validate();
    require_positive_density(steady, u0, "evolve");
    RunRecord record;
    record.tau = cfg.tau;
    const double mass0 = mass_of(steady.grid, u0);

    auto make_row = [&](std::size_t m, std::span<const double> u, int iters) {
        RunRow row;
        row.step = m;
        row.time = static_cast<double>(m) * cfg.tau;
        row.entropy = entropy(u, steady);
        row.fisher = fisher(u, steady);
        row.l1_to_steady = l1_distance(u, steady);
        row.newton_iters = iters;
        row.mass_drift = std::abs(mass_of(steady.grid, u) - mass0);
        if (record.rows.empty()) {
            row.entropy_rate = std::numeric_limits<double>::quiet_NaN();
            row.fisher_rate = std::numeric_limits<double>::quiet_NaN();
        } else {
            const RunRow& prev = record.rows.back();
            row.entropy_rate = decay_rate(prev.entropy, row.entropy, cfg.tau);
            row.fisher_rate = decay_rate(prev.fisher, row.fisher, cfg.tau);
        }
        return row;
    };

    std::vector<double> u(u0.begin(), u0.end());
    record.rows.push_back(make_row(0, u, 0));
    if (observer) observer(0, 0.0, u);

    std::unique_ptr<FpStepper> fp;
    if (mode == FlowMode::fp) fp = std::make_unique<FpStepper>(gen, steady, cfg.tau);

    for (std::size_t m = 1; m <= steps; ++m) {
        int iters = 0;
        try {
            if (mode == FlowMode::fp) {
                u = fp->step(u);
                require_positive_density(steady, u, "fp step");
            } else {
                StepResult r = qdd_step(u, steady, gen, cfg);
                u = std::move(r.density);
                iters = r.diagnostics.iterations;
            }
        } catch (const NumericError& e) {
            record.final_density = u;
            throw FlowFailure(NumericError("step " + std::to_string(m) + ": " + e.what(), e.residual()),
                              std::move(record));
        } catch (const DomainError& e) {
            record.final_density = u;
            throw FlowFailure(NumericError("step " + std::to_string(m) + ": " + e.what(), 0.0), std::move(record));
        }
        record.rows.push_back(make_row(m, u, iters));
        if (observer) observer(m, record.rows.back().time, u);
    }
    record.final_density = std::move(u);
    return record;
}

}  // namespace qddlab
