// qddlab command-line front end.
//
//   qddlab <subcommand> [--config <path>] [--key=value ...]
//
// Exit status: 0 success, 1 numeric failure, 2 configuration error.

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "qddlab/config.hpp"
#include "qddlab/error.hpp"
#include "qddlab/experiments.hpp"

namespace {

constexpr int kExitNumeric = 1;
constexpr int kExitConfig = 2;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw qddlab::ConfigError("config", "cannot open '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return text.str();
}

const char* describe(std::string_view name) {
    if (name == "steady") return "print the discrete steady state, one value per cell";
    if (name == "spectrum") return "print the spectral gap and the convexity moduli";
    if (name == "cdi-check") return "evaluate the convex decay inequality on random densities";
    if (name == "fp-run") return "evolve the Fokker-Planck flow and write a CSV record";
    if (name == "qdd-run") return "evolve the quantum drift-diffusion flow and write a CSV record";
    if (name == "bls") return "two-dimensional plateau experiment (lambda = 0)";
    if (name == "decay") return "equilibration experiment from the regular datum";
    return "";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Structure-preserving finite-volume solver for the quantum drift-diffusion equation"};
    app.require_subcommand(1);

    std::string config_path;
    std::map<std::string, std::string> values;
    std::map<std::string, CLI::Option*> options;
    std::map<std::string, CLI::App*> commands;

    for (std::string_view name : qddlab::subcommands()) {
        CLI::App* sub = app.add_subcommand(std::string(name), describe(name));
        sub->add_option("--config", config_path, "key=value configuration file");
        for (const qddlab::ConfigKey& key : qddlab::config_keys()) {
            const std::string k(key.name);
            std::string help(key.help);
            if (!key.default_value.empty()) help += " [default: " + std::string(key.default_value) + "]";
            options[std::string(name) + "/" + k] = sub->add_option("--" + k, values[std::string(name) + "/" + k], help);
        }
        commands[std::string(name)] = sub;
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    std::string name;
    for (const auto& [n, sub] : commands) {
        if (sub->parsed()) name = n;
    }

    try {
        qddlab::Overrides overrides;
        for (const qddlab::ConfigKey& key : qddlab::config_keys()) {
            const std::string id = name + "/" + std::string(key.name);
            if (options[id]->count() > 0) overrides.emplace_back(std::string(key.name), values[id]);
        }
        const std::string text = config_path.empty() ? std::string{} : read_file(config_path);
        const qddlab::Config cfg = qddlab::parse_config(text, overrides, qddlab::needs_init(name));
        return qddlab::run_subcommand(name, cfg, std::cout);
    } catch (const qddlab::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const qddlab::NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << " (residual " << e.residual() << ")\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumeric;
    }
}
