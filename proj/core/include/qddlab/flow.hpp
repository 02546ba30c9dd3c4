#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "qddlab/error.hpp"
#include "qddlab/markov.hpp"
#include "qddlab/potential.hpp"

namespace qddlab {

using SparseColMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor>;

enum class Damping { undamped, halving };
enum class JacobianMode { analytic, finite_difference };
enum class FlowMode { qdd, fp };

struct StepperConfig {
    double tau = 1e-5;
    /// Bound on max_i |G_i| for the implicit Euler residual G.
    double newton_tol = 1e-11;
    int newton_max_iter = 50;
    Damping damping = Damping::halving;
    JacobianMode jacobian = JacobianMode::analytic;
    int max_halvings = 30;

    /// Throws ConfigError naming the first invalid field.
    void validate() const;
};

/// Problems with more unknowns than this use iterative linear solvers.
inline constexpr std::size_t kDirectSolveLimit = 10000;

/// Implicit Euler for the Fokker-Planck flow: solves (Id - tau M) U+ = U.
/// The factorisation is computed once and reused across steps.
class FpStepper {
public:
    FpStepper(const Generator& gen, const SteadyState& steady, double tau);
    ~FpStepper();
    FpStepper(FpStepper&&) noexcept;
    FpStepper& operator=(FpStepper&&) noexcept;

    std::vector<double> step(std::span<const double> u) const;
    double tau() const noexcept { return tau_; }

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    double tau_;
};

/// One Fokker-Planck step without caching.
std::vector<double> fp_step(const Generator& gen, const SteadyState& steady, std::span<const double> u, double tau);

/// F(U) = K_U (M U / U + M^T log(U / Pi^h)), the right-hand side of the QDD flow.
std::vector<double> qdd_rhs(std::span<const double> u, const SteadyState& steady, const Generator& gen);

/// dF/dU assembled from the edge contributions.
SparseColMatrix qdd_jacobian(std::span<const double> u, const SteadyState& steady, const Generator& gen);

/// dF/dU by central differences with step rel_step * U_k in column k.
Eigen::MatrixXd qdd_jacobian_fd(std::span<const double> u, const SteadyState& steady, const Generator& gen,
                                double rel_step = 1e-6);

struct StepDiagnostics {
    int iterations = 0;
    /// max |G| at the initial guess and after every Newton update.
    std::vector<double> residuals;
    int halvings = 0;
};

struct StepResult {
    std::vector<double> density;
    StepDiagnostics diagnostics;
};

/// Implicit Euler step of the QDD flow: Newton's method on G(U) = U - U_prev - tau F(U),
/// started from U_prev. Throws NumericError carrying the last residual on failure.
StepResult qdd_step(std::span<const double> u_prev, const SteadyState& steady, const Generator& gen,
                    const StepperConfig& cfg);

struct RunRow {
    std::size_t step = 0;
    double time = 0.0;
    double entropy = 0.0;
    double fisher = 0.0;
    double l1_to_steady = 0.0;
    /// (log X_{m-1} - log X_m) / tau; NaN on the initial row.
    double entropy_rate = 0.0;
    double fisher_rate = 0.0;
    int newton_iters = 0;
    /// |mass(U_m) - mass(U_0)|
    double mass_drift = 0.0;
};

struct RunRecord {
    double tau = 0.0;
    std::vector<RunRow> rows;
    std::vector<double> final_density;
};

/// Invoked with (step, time, density) for the initial state and after every step.
using Observer = std::function<void(std::size_t, double, std::span<const double>)>;

/// Step failure during evolve(); holds the rows completed before the failure.
class FlowFailure : public NumericError {
public:
    FlowFailure(const NumericError& cause, RunRecord partial)
        : NumericError(cause.what(), cause.residual()), partial_(std::move(partial)) {}

    const RunRecord& partial() const noexcept { return partial_; }

private:
    RunRecord partial_;
};

RunRecord evolve(std::span<const double> u0, const SteadyState& steady, const Generator& gen,
                 const StepperConfig& cfg, std::size_t steps, FlowMode mode = FlowMode::qdd,
                 const Observer& observer = {});

}  // namespace qddlab
