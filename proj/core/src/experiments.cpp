#include "qddlab/experiments.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>

#include "qddlab/error.hpp"
#include "qddlab/functionals.hpp"
#include "qddlab/io.hpp"

namespace qddlab {

namespace {

constexpr double kPlateau = 1e-4;
// Integral of cos^16(pi x1) + cos^16(pi x2) over the unit square: 2 * C(16, 8) / 2^16.
constexpr double kBlsCosineMass = 2.0 * 12870.0 / 65536.0;
constexpr double kBlsZ = kBlsCosineMass / (1.0 - kPlateau);

double pow16(double c) {
    const double c2 = c * c;
    const double c4 = c2 * c2;
    const double c8 = c4 * c4;
    return c8 * c8;
}

constexpr std::array<std::string_view, 7> kSubcommands{"steady", "spectrum", "cdi-check", "fp-run",
                                                       "qdd-run", "bls", "decay"};

void require_two_dimensional(const Grid& grid, const char* what) {
    if (grid.dim() != 2) throw ConfigError("dim", std::string(what) + " is defined for dim=2");
}

void force(Config& cfg, const std::string& key, bool consistent, const std::string& required) {
    if (cfg.is_set(key) && !consistent) throw ConfigError(key, "this experiment requires " + key + "=" + required);
}

std::string fmt(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return format_double(x);
}

HeaderEntries run_header(const Config& cfg, const RateConstants& rc, double tau, std::size_t steps, FlowMode mode) {
    HeaderEntries h;
    h.emplace_back("dim", std::to_string(cfg.dim));
    h.emplace_back("n", std::to_string(cfg.n));
    h.emplace_back("lambda", fmt(cfg.lambda));
    h.emplace_back("tau", fmt(tau));
    h.emplace_back("steps", std::to_string(steps));
    h.emplace_back("init", cfg.init == InitKind::file ? "file:" + cfg.init_path : to_string(cfg.init));
    h.emplace_back("mode", mode == FlowMode::qdd ? "qdd" : "fp");
    h.emplace_back("lambda_h", fmt(rc.lambda_h));
    h.emplace_back("lambda_tilde_h", fmt(rc.lambda_tilde_h));
    h.emplace_back("lambda_star_h", fmt(rc.lambda_star_h));
    h.emplace_back("rate_lambda_h", fmt(4.0 * rc.lambda_h * rc.lambda_h));
    h.emplace_back("rate_lambda_tilde_h", fmt(4.0 * rc.lambda_tilde_h * rc.lambda_tilde_h));
    h.emplace_back("rate_lambda_star_h", fmt(4.0 * rc.lambda_star_h * rc.lambda_star_h));
    return h;
}

std::string snapshot_path(const std::string& prefix, std::size_t step) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "_snap_%06zu.txt", step);
    return prefix + buf;
}

struct RunPlan {
    FlowMode mode = FlowMode::qdd;
    double tau = 0.0;
    std::size_t steps = 0;
    std::size_t snapshot_every = 0;
    bool cross = false;
};

int run_flow(const Config& cfg, const RunPlan& plan, std::ostream& out) {
    const SteadyState steady = make_steady_state(cfg);
    const Generator gen = make_generator(steady);
    const std::vector<double> u0 = initial_density(cfg, steady.grid);
    const RateConstants rc = rate_constants(steady, gen, cfg.eig_cap);
    const StepperConfig sc = stepper_config(cfg, plan.tau);
    const HeaderEntries header = run_header(cfg, rc, plan.tau, plan.steps, plan.mode);

    std::ofstream cross;
    if (plan.cross) {
        const std::string path = cfg.output_prefix + "_cross.csv";
        cross.open(path, std::ios::binary);
        if (!cross) throw ConfigError("output_prefix", "cannot open '" + path + "' for writing");
        cross << "time,x1,u\n";
    }
    double min_value = std::numeric_limits<double>::infinity();
    double min_time = 0.0;
    const double initial_min = *std::min_element(u0.begin(), u0.end());

    auto observer = [&](std::size_t step, double time, std::span<const double> u) {
        const double m = *std::min_element(u.begin(), u.end());
        if (m < min_value) {
            min_value = m;
            min_time = time;
        }
        if (plan.snapshot_every == 0 || step % plan.snapshot_every != 0) return;
        write_snapshot(snapshot_path(cfg.output_prefix, step), steady.grid, time, u);
        if (plan.cross) {
            const std::vector<double> section = cross_section(steady.grid, u);
            for (std::size_t i = 0; i < section.size(); ++i) {
                cross << format_double(time) << ',' << format_double((static_cast<double>(i) + 0.5) * steady.grid.h())
                      << ',' << format_double(section[i]) << '\n';
            }
        }
    };

    const std::string csv_path = cfg.output_prefix + ".csv";
    RunRecord record;
    try {
        record = evolve(u0, steady, gen, sc, plan.steps, plan.mode, observer);
    } catch (const FlowFailure& failure) {
        write_run_csv(csv_path, failure.partial(), header);
        out << "flow failed: " << failure.what() << "\n";
        out << "partial record (" << failure.partial().rows.size() << " rows) written to " << csv_path << "\n";
        return 1;
    }
    write_run_csv(csv_path, record, header);

    const RunRow& last = record.rows.back();
    for (const auto& [key, value] : header) out << key << '=' << value << '\n';
    out << "final_entropy=" << fmt(last.entropy) << '\n';
    out << "final_fisher=" << fmt(last.fisher) << '\n';
    out << "max_mass_drift=" << fmt(std::max_element(record.rows.begin(), record.rows.end(),
                                                     [](const RunRow& a, const RunRow& b) {
                                                         return a.mass_drift < b.mass_drift;
                                                     })->mass_drift)
        << '\n';
    out << "initial_min=" << fmt(initial_min) << '\n';
    out << "min_value=" << fmt(min_value) << " at t=" << fmt(min_time) << '\n';
    out << "wrote " << csv_path << '\n';
    return 0;
}

int cmd_steady(const Config& cfg, std::ostream& out) {
    const SteadyState steady = make_steady_state(cfg);
    out << "# d=" << cfg.dim << " n=" << cfg.n << " lambda=" << fmt(cfg.lambda) << " gamma_h=" << fmt(steady.gamma_h)
        << '\n';
    for (double v : steady.values.values()) out << format_double(v) << '\n';
    return 0;
}

int cmd_spectrum(const Config& cfg, std::ostream& out) {
    const SteadyState steady = make_steady_state(cfg);
    const Generator gen = make_generator(steady);
    const RateConstants rc = rate_constants(steady, gen, cfg.eig_cap);
    out << "lambda=" << fmt(cfg.lambda) << '\n';
    out << "lambda_h=" << fmt(rc.lambda_h) << '\n';
    out << "lambda_tilde_h=" << fmt(rc.lambda_tilde_h) << '\n';
    out << "cdpp_modulus=" << fmt(rc.cdpp) << '\n';
    out << "lambda_star_h=" << fmt(rc.lambda_star_h) << '\n';
    out << "lambda_star_method=" << (rc.dense_gap ? "dense" : "factors") << '\n';
    return 0;
}

int cmd_cdi_check(const Config& cfg, std::ostream& out) {
    const SteadyState steady = make_steady_state(cfg);
    const Generator gen = make_generator(steady);
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> u(steady.grid.size());
    double min_margin = std::numeric_limits<double>::infinity();
    double min_scaled = std::numeric_limits<double>::infinity();
    std::size_t violations = 0;
    for (std::size_t s = 0; s < cfg.samples; ++s) {
        double sum = 0.0;
        for (double& x : u) {
            x = std::exp(normal(rng));
            sum += x;
        }
        for (double& x : u) x /= steady.grid.cell_volume() * sum;
        const CdiMargin m = cdi_margin(u, steady, gen);
        const double scale = std::max(1.0, m.bound);
        min_margin = std::min(min_margin, m.margin());
        min_scaled = std::min(min_scaled, m.margin() / scale);
        if (m.margin() < -1e-10 * scale) ++violations;
    }
    out << "samples=" << cfg.samples << '\n';
    out << "lambda_h=" << fmt(steady.lambda_h) << '\n';
    out << "min_margin=" << fmt(min_margin) << '\n';
    out << "min_relative_margin=" << fmt(min_scaled) << '\n';
    out << "violations=" << violations << '\n';
    return violations == 0 ? 0 : 1;
}

}  // namespace

double bls_profile(std::span<const double> x) {
    if (x.size() != 2) throw DomainError("bls_profile: expects a point of the unit square");
    const double pi = std::numbers::pi;
    return (pow16(std::cos(pi * x[0])) + pow16(std::cos(pi * x[1]))) / kBlsZ + kPlateau;
}

double regular_profile(std::span<const double> x) {
    if (x.size() != 2) throw DomainError("regular_profile: expects a point of the unit square");
    const double pi = std::numbers::pi;
    const double s1 = std::sin(3.0 * pi * x[0]);
    const double s2 = std::sin(2.0 * pi * x[1]);
    return 4.0 / 3.0 * s1 * s1 * s2 * s2 + (1.0 + x[0] + x[1]) / 3.0;
}

SteadyState make_steady_state(const Config& cfg) {
    const Grid grid(cfg.dim, cfg.n);
    std::vector<double> xbar = cfg.xbar;
    if (xbar.empty()) xbar.assign(static_cast<std::size_t>(cfg.dim), 0.5);
    try {
        return quadratic_steady_state(grid, cfg.lambda, xbar);
    } catch (const RangeError& e) {
        throw ConfigError("lambda", e.what());
    }
}

std::vector<double> initial_density(const Config& cfg, const Grid& grid) {
    std::vector<double> u;
    switch (cfg.init) {
        case InitKind::none:
            throw ConfigError("init", "required");
        case InitKind::uniform:
            return std::vector<double>(grid.size(), 1.0);
        case InitKind::bls:
            require_two_dimensional(grid, "the bls datum");
            return discretize(grid, bls_profile, cfg.quadrature_order).density.vector();
        case InitKind::regular:
            require_two_dimensional(grid, "the regular datum");
            return discretize(grid, regular_profile, cfg.quadrature_order).density.vector();
        case InitKind::file:
            u = load_density(cfg.init_path, grid);
            for (double v : u) {
                if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("init", "snapshot density must be strictly positive");
            }
            return u;
    }
    throw ConfigError("init", "required");
}

RateConstants rate_constants(const SteadyState& steady, const Generator& gen, std::size_t eig_cap) {
    RateConstants rc;
    rc.lambda_h = steady.lambda_h;
    rc.lambda_tilde_h = std::numeric_limits<double>::infinity();
    rc.cdpp = std::numeric_limits<double>::infinity();
    for (const TriFactor& f : gen.factors()) {
        rc.lambda_tilde_h = std::min(rc.lambda_tilde_h, mielke_modulus(f).value);
        rc.cdpp = std::min(rc.cdpp, cdpp_modulus(f).value);
    }
    const SpectralGap gap = spectral_gap(gen, steady, eig_cap);
    rc.lambda_star_h = gap.value;
    rc.dense_gap = gap.dense;
    return rc;
}

std::span<const std::string_view> subcommands() { return kSubcommands; }

bool needs_init(std::string_view subcommand) { return subcommand == "fp-run" || subcommand == "qdd-run"; }

int run_subcommand(std::string_view name, Config cfg, std::ostream& out) {
    if (name == "steady") return cmd_steady(cfg, out);
    if (name == "spectrum") return cmd_spectrum(cfg, out);
    if (name == "cdi-check") return cmd_cdi_check(cfg, out);

    RunPlan plan;
    if (name == "fp-run" || name == "qdd-run") {
        plan.mode = name == "fp-run" ? FlowMode::fp : FlowMode::qdd;
        force(cfg, "mode", cfg.mode == plan.mode, name == "fp-run" ? "fp" : "qdd");
        plan.tau = cfg.tau.value_or(auto_tau(cfg));
        plan.steps = cfg.steps.value_or(1000);
        plan.snapshot_every = cfg.snapshot_every.value_or(0);
        return run_flow(cfg, plan, out);
    }
    if (name == "bls") {
        force(cfg, "dim", cfg.dim == 2, "2");
        force(cfg, "lambda", cfg.lambda == 0.0, "0");
        force(cfg, "init", cfg.init == InitKind::bls, "bls");
        cfg.dim = 2;
        cfg.lambda = 0.0;
        cfg.init = InitKind::bls;
        if (!cfg.is_set("xbar")) cfg.xbar.assign(2, 0.5);
        if (cfg.xbar.size() != 2) throw ConfigError("xbar", "needs 2 values for the bls experiment");
        plan.mode = cfg.mode;
        plan.tau = cfg.tau.value_or(1e-7);
        plan.steps = cfg.steps.value_or(30);
        plan.snapshot_every = cfg.snapshot_every.value_or(5);
        plan.cross = true;
        return run_flow(cfg, plan, out);
    }
    if (name == "decay") {
        force(cfg, "init", cfg.init == InitKind::regular, "regular");
        cfg.init = InitKind::regular;
        plan.mode = cfg.mode;
        plan.tau = cfg.tau.value_or(auto_tau(cfg));
        plan.steps = cfg.steps.value_or(1000);
        plan.snapshot_every = cfg.snapshot_every.value_or(0);
        return run_flow(cfg, plan, out);
    }
    throw ConfigError("", "unknown subcommand '" + std::string(name) + "'");
}

}  // namespace qddlab
