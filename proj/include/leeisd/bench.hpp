#pragma once

// Shared plumbing for the command-line tool, the acceptance runner and the Python
// module: version string, comparison-table rows and the asymptotic CSV layout.

#include <optional>
#include <string>
#include <vector>

#include "leeisd/asymptotics.hpp"

namespace leeisd {

inline constexpr const char* kVersion = "leeisd 0.3.0";

struct TableRow {
    std::string name;
    asym::Mode mode = asym::Mode::BelowGV;
    bool amortized = false;
    std::optional<std::uint32_t> fixed_r;  // nullopt: r is optimized
    double ref_exponent = 0;
    double ref_rate = 0;
    bool reference_only = false;  // published constant of an algorithm not implemented here
};

/// Full-distance decoding comparison for q = 47.
std::vector<TableRow> table1_rows();
/// Decoding beyond the minimum distance for q = 47.
std::vector<TableRow> table2_rows();

struct RowOutcome {
    TableRow row;
    asym::WorstRate worst;
    bool computed = false;
    bool exponent_ok = false;
    bool rate_ok = false;
};

inline constexpr double kExponentTolerance = 0.005;
inline constexpr double kRateTolerance = 0.03;

/// Worst-rate search for one row; reference-only rows are passed through untouched.
RowOutcome evaluate_row(const TableRow& row, const RingSpec& ring, asym::WorstRateConfig config);

/// The 16 columns of the asymptotic CSV.
std::string asym_csv_header();
/// One CSV row, every real printed with 6 decimals.
std::string asym_csv_row(const RingSpec& ring, asym::Mode mode, const asym::RatePoint& point);

}  // namespace leeisd
