#include "qddlab/config.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <limits>

#include "qddlab/error.hpp"
#include "qddlab/potential.hpp"

namespace qddlab {

namespace {

constexpr std::array kKeys{
    ConfigKey{"dim", "2", "number of space dimensions (1-3)"},
    ConfigKey{"n", "30", "cells per direction (>= 2)"},
    ConfigKey{"lambda", "1", "convexity of V(x) = lambda/2 |x - xbar|^2 (>= 0)"},
    ConfigKey{"xbar", "0.5", "centre of V; one value, or a comma list with one entry per direction"},
    ConfigKey{"tau", "auto", "time step; auto = min(1e-5, 0.1/(2 lambda_h)^2), 1e-7 for bls"},
    ConfigKey{"steps", "1000", "number of time steps (30 for bls)"},
    ConfigKey{"init", "", "initial density: bls | regular | uniform | file:<path>"},
    ConfigKey{"snapshot_every", "0", "write a snapshot every k steps, 0 = never (5 for bls)"},
    ConfigKey{"output_prefix", "qddlab_out", "prefix for CSV and snapshot files"},
    ConfigKey{"mode", "qdd", "flow for run subcommands: qdd | fp"},
    ConfigKey{"damping", "halving", "Newton safeguard: halving | undamped"},
    ConfigKey{"jacobian", "analytic", "Newton Jacobian: analytic | finite_difference"},
    ConfigKey{"newton_tol", "1e-11", "Newton tolerance on the max-norm residual"},
    ConfigKey{"newton_max_iter", "50", "Newton iterations per step"},
    ConfigKey{"samples", "1000", "random densities drawn by cdi-check"},
    ConfigKey{"seed", "1", "random seed for cdi-check"},
    ConfigKey{"quadrature_order", "5", "Gauss-Legendre points per cell and direction for initial data"},
    ConfigKey{"eig_cap", "4096", "largest state count diagonalised densely by spectrum"},
};

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

template <class T>
T parse_number(const std::string& key, std::string_view text) {
    T value{};
    const char* begin = text.data();
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end) {
        throw ConfigError(key, "cannot parse '" + std::string(text) + "' as a number");
    }
    if constexpr (std::is_floating_point_v<T>) {
        if (!std::isfinite(value)) throw ConfigError(key, "must be finite");
    }
    return value;
}

template <class T>
T parse_nonnegative_integer(const std::string& key, std::string_view text) {
    if (!text.empty() && text.front() == '-') throw ConfigError(key, "must be nonnegative");
    return parse_number<T>(key, text);
}

std::vector<double> parse_list(const std::string& key, std::string_view text) {
    std::vector<double> values;
    while (true) {
        const auto comma = text.find(',');
        values.push_back(parse_number<double>(key, trim(text.substr(0, comma))));
        if (comma == std::string_view::npos) break;
        text.remove_prefix(comma + 1);
    }
    return values;
}

void apply(Config& cfg, const std::string& key, std::string_view value, std::vector<double>& xbar_raw) {
    if (key == "dim") {
        cfg.dim = parse_number<int>(key, value);
    } else if (key == "n") {
        cfg.n = parse_number<int>(key, value);
    } else if (key == "lambda") {
        cfg.lambda = parse_number<double>(key, value);
    } else if (key == "xbar") {
        xbar_raw = parse_list(key, value);
    } else if (key == "tau") {
        if (value == "auto") {
            cfg.tau.reset();
        } else {
            cfg.tau = parse_number<double>(key, value);
        }
    } else if (key == "steps") {
        cfg.steps = parse_nonnegative_integer<std::size_t>(key, value);
    } else if (key == "init") {
        cfg.init_path.clear();
        if (value == "bls") {
            cfg.init = InitKind::bls;
        } else if (value == "regular") {
            cfg.init = InitKind::regular;
        } else if (value == "uniform") {
            cfg.init = InitKind::uniform;
        } else if (value.substr(0, 5) == "file:" && value.size() > 5) {
            cfg.init = InitKind::file;
            cfg.init_path = std::string(value.substr(5));
        } else {
            throw ConfigError(key, "expected bls, regular, uniform or file:<path>, got '" + std::string(value) + "'");
        }
    } else if (key == "snapshot_every") {
        cfg.snapshot_every = parse_nonnegative_integer<std::size_t>(key, value);
    } else if (key == "output_prefix") {
        if (value.empty()) throw ConfigError(key, "must not be empty");
        cfg.output_prefix = std::string(value);
    } else if (key == "mode") {
        if (value == "qdd") {
            cfg.mode = FlowMode::qdd;
        } else if (value == "fp") {
            cfg.mode = FlowMode::fp;
        } else {
            throw ConfigError(key, "expected qdd or fp");
        }
    } else if (key == "damping") {
        if (value == "halving") {
            cfg.damping = Damping::halving;
        } else if (value == "undamped") {
            cfg.damping = Damping::undamped;
        } else {
            throw ConfigError(key, "expected halving or undamped");
        }
    } else if (key == "jacobian") {
        if (value == "analytic") {
            cfg.jacobian = JacobianMode::analytic;
        } else if (value == "finite_difference") {
            cfg.jacobian = JacobianMode::finite_difference;
        } else {
            throw ConfigError(key, "expected analytic or finite_difference");
        }
    } else if (key == "newton_tol") {
        cfg.newton_tol = parse_number<double>(key, value);
    } else if (key == "newton_max_iter") {
        cfg.newton_max_iter = parse_number<int>(key, value);
    } else if (key == "samples") {
        cfg.samples = parse_nonnegative_integer<std::size_t>(key, value);
    } else if (key == "seed") {
        cfg.seed = parse_nonnegative_integer<std::uint64_t>(key, value);
    } else if (key == "quadrature_order") {
        cfg.quadrature_order = parse_number<int>(key, value);
    } else if (key == "eig_cap") {
        cfg.eig_cap = parse_nonnegative_integer<std::size_t>(key, value);
    } else {
        throw ConfigError(key, "unknown key");
    }
    cfg.explicit_keys.insert(key);
}

void validate(Config& cfg, const std::vector<double>& xbar_raw, bool require_init) {
    if (cfg.dim < 1 || cfg.dim > 3) throw ConfigError("dim", "must be 1, 2 or 3");
    if (cfg.n < 2) throw ConfigError("n", "must be at least 2");
    if (!(cfg.lambda >= 0.0)) throw ConfigError("lambda", "must be nonnegative");
    if (xbar_raw.size() != 1 && xbar_raw.size() != static_cast<std::size_t>(cfg.dim)) {
        throw ConfigError("xbar", "needs one value or " + std::to_string(cfg.dim) + " values");
    }
    for (double x : xbar_raw) {
        if (!(x >= 0.0 && x <= 1.0)) throw ConfigError("xbar", "entries must lie in [0, 1]");
    }
    cfg.xbar.assign(static_cast<std::size_t>(cfg.dim), xbar_raw.front());
    if (xbar_raw.size() > 1) cfg.xbar = xbar_raw;
    if (cfg.tau && !(*cfg.tau > 0.0)) throw ConfigError("tau", "must be positive");
    if (!(cfg.newton_tol > 0.0)) throw ConfigError("newton_tol", "must be positive");
    if (cfg.newton_max_iter < 1) throw ConfigError("newton_max_iter", "must be at least 1");
    if (cfg.samples < 1) throw ConfigError("samples", "must be at least 1");
    if (cfg.quadrature_order < 1 || cfg.quadrature_order > 20) {
        throw ConfigError("quadrature_order", "must lie in 1..20");
    }
    const double states = std::pow(static_cast<double>(cfg.n), cfg.dim);
    if (states > 1e7) throw ConfigError("n", "n^dim exceeds 1e7 states");
    if (require_init && cfg.init == InitKind::none) throw ConfigError("init", "required");
}

}  // namespace

std::span<const ConfigKey> config_keys() { return kKeys; }

Config parse_config(std::string_view text, const Overrides& overrides, bool require_init) {
    Config cfg;
    std::vector<double> xbar_raw{0.5};
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto newline = text.find('\n');
        std::string_view line = text.substr(0, newline);
        text = newline == std::string_view::npos ? std::string_view{} : text.substr(newline + 1);
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError(std::string(line), "line " + std::to_string(line_no) + " is not of the form key=value");
        }
        const std::string key(trim(line.substr(0, eq)));
        if (key.empty()) throw ConfigError("", "line " + std::to_string(line_no) + " has an empty key");
        apply(cfg, key, trim(line.substr(eq + 1)), xbar_raw);
    }
    for (const auto& [key, value] : overrides) apply(cfg, key, trim(value), xbar_raw);
    validate(cfg, xbar_raw, require_init);
    return cfg;
}

double auto_tau(const Config& cfg) {
    const double lh = lambda_h(cfg.lambda, 1.0 / cfg.n);
    const double rate = 4.0 * lh * lh;
    if (rate <= 0.0) return 1e-5;
    return std::min(1e-5, 0.1 / rate);
}

StepperConfig stepper_config(const Config& cfg, double tau) {
    StepperConfig s;
    s.tau = tau;
    s.newton_tol = cfg.newton_tol;
    s.newton_max_iter = cfg.newton_max_iter;
    s.damping = cfg.damping;
    s.jacobian = cfg.jacobian;
    s.validate();
    return s;
}

std::string to_string(InitKind kind) {
    switch (kind) {
        case InitKind::none: return "none";
        case InitKind::bls: return "bls";
        case InitKind::regular: return "regular";
        case InitKind::uniform: return "uniform";
        case InitKind::file: return "file";
    }
    return "none";
}

}  // namespace qddlab
