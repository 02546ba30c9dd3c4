#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qddlab/flow.hpp"
#include "qddlab/grid.hpp"

namespace qddlab {

/// Shortest text that reads back to the same double ("%.17g").
std::string format_double(double x);

using HeaderEntries = std::vector<std::pair<std::string, std::string>>;

inline constexpr const char* kRunCsvColumns =
    "step,time,entropy,fisher,l1_to_steady,entropy_rate,fisher_rate,newton_iters,mass_drift";

/// `# key=value` lines, the column header, then one row per record entry.
void write_run_csv(std::ostream& out, const RunRecord& record, const HeaderEntries& header);
void write_run_csv(const std::string& path, const RunRecord& record, const HeaderEntries& header);

/// `# t=<time> d=<d> n=<N>` followed by the values in flat-index order, one per line.
void write_snapshot(std::ostream& out, const Grid& grid, double time, std::span<const double> values);
void write_snapshot(const std::string& path, const Grid& grid, double time, std::span<const double> values);

struct Snapshot {
    double time = 0.0;
    int dim = 0;
    int n = 0;
    std::vector<double> values;
};

/// Throws ConfigError("init", ...) on malformed input.
Snapshot read_snapshot(std::istream& in);
Snapshot read_snapshot(const std::string& path);

/// Reads a snapshot and checks that it belongs to `grid`.
std::vector<double> load_density(const std::string& path, const Grid& grid);

/// Values along x2 = 1/2 of a two-dimensional density (average of the two middle rows for even N).
std::vector<double> cross_section(const Grid& grid, std::span<const double> values);

}  // namespace qddlab
