#include "qddlab/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "qddlab/error.hpp"

namespace qddlab {

std::string format_double(double x) {
    char buf[32];
    const int len = std::snprintf(buf, sizeof buf, "%.17g", x);
    return {buf, static_cast<std::size_t>(len)};
}

void write_run_csv(std::ostream& out, const RunRecord& record, const HeaderEntries& header) {
    for (const auto& [key, value] : header) out << "# " << key << '=' << value << '\n';
    out << kRunCsvColumns << '\n';
    for (const RunRow& r : record.rows) {
        out << r.step << ',' << format_double(r.time) << ',' << format_double(r.entropy) << ','
            << format_double(r.fisher) << ',' << format_double(r.l1_to_steady) << ',' << format_double(r.entropy_rate)
            << ',' << format_double(r.fisher_rate) << ',' << r.newton_iters << ',' << format_double(r.mass_drift)
            << '\n';
    }
}

namespace {

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("output_prefix", "cannot open '" + path + "' for writing");
    return out;
}

}  // namespace

void write_run_csv(const std::string& path, const RunRecord& record, const HeaderEntries& header) {
    std::ofstream out = open_output(path);
    write_run_csv(out, record, header);
}

void write_snapshot(std::ostream& out, const Grid& grid, double time, std::span<const double> values) {
    if (values.size() != grid.size()) throw DomainError("write_snapshot: size mismatch");
    out << "# t=" << format_double(time) << " d=" << grid.dim() << " n=" << grid.n() << '\n';
    for (double v : values) out << format_double(v) << '\n';
}

void write_snapshot(const std::string& path, const Grid& grid, double time, std::span<const double> values) {
    std::ofstream out = open_output(path);
    write_snapshot(out, grid, time, values);
}

namespace {

template <class T>
bool parse_field(std::string_view token, std::string_view name, T& value) {
    if (token.substr(0, name.size()) != name) return false;
    token.remove_prefix(name.size());
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    return ec == std::errc() && ptr == token.data() + token.size();
}

}  // namespace

Snapshot read_snapshot(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("init", "snapshot is empty");
    Snapshot snap;
    std::istringstream header(line);
    std::string hash, t, d, n;
    header >> hash >> t >> d >> n;
    if (hash != "#" || !parse_field(t, "t=", snap.time) || !parse_field(d, "d=", snap.dim) ||
        !parse_field(n, "n=", snap.n)) {
        throw ConfigError("init", "snapshot header must read '# t=<time> d=<d> n=<N>'");
    }
    if (snap.dim < 1 || snap.n < 1) throw ConfigError("init", "snapshot header has invalid d or n");
    std::size_t expected = 1;
    for (int k = 0; k < snap.dim; ++k) expected *= static_cast<std::size_t>(snap.n);
    snap.values.reserve(expected);
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), v);
        if (ec != std::errc() || ptr != line.data() + line.size()) {
            throw ConfigError("init", "snapshot value '" + line + "' is not a number");
        }
        snap.values.push_back(v);
    }
    if (snap.values.size() != expected) {
        throw ConfigError("init", "snapshot has " + std::to_string(snap.values.size()) + " values, header implies " +
                                      std::to_string(expected));
    }
    return snap;
}

Snapshot read_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("init", "cannot open snapshot '" + path + "'");
    return read_snapshot(in);
}

std::vector<double> load_density(const std::string& path, const Grid& grid) {
    Snapshot snap = read_snapshot(path);
    if (snap.dim != grid.dim() || snap.n != grid.n()) {
        throw ConfigError("init", "snapshot is for d=" + std::to_string(snap.dim) + " n=" + std::to_string(snap.n) +
                                      ", configuration has d=" + std::to_string(grid.dim()) +
                                      " n=" + std::to_string(grid.n()));
    }
    return std::move(snap.values);
}

std::vector<double> cross_section(const Grid& grid, std::span<const double> values) {
    if (grid.dim() != 2) throw DomainError("cross_section: grid must be two-dimensional");
    if (values.size() != grid.size()) throw DomainError("cross_section: size mismatch");
    const auto n = static_cast<std::size_t>(grid.n());
    std::vector<double> out(n);
    // 0-based rows straddling x2 = 1/2
    const std::size_t upper = n / 2;
    const std::size_t lower = (n % 2 == 0) ? upper - 1 : upper;
    for (std::size_t i = 0; i < n; ++i) out[i] = 0.5 * (values[i + lower * n] + values[i + upper * n]);
    return out;
}

}  // namespace qddlab
