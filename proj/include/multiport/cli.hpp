#pragma once

#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace multiport::cli {

// Exit codes: 0 success, 1 usage/parse error, 2 domain error (non-IC device,
// boundary distribution), 3 numerical-envelope or validation failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitDomain = 2;
inline constexpr int kExitEnvelope = 3;

using Cell = std::variant<std::monostate, long long, double, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

/// Golden output format: header row, one line per row, doubles at 17
/// significant digits, '.' decimal separator, LF line endings.
void write_csv(const Table& table, std::ostream& out);
void write_json(const Table& table, std::ostream& out);

/// "%.17g" rendering used by every CSV writer.
std::string format_double(double v);

/// Sweep syntax: a single value, or "a..b" (integers, step 1), or
/// "a..b:step". Throws std::invalid_argument on malformed input.
std::vector<long> parse_int_range(const std::string& text);
std::vector<double> parse_real_range(const std::string& text);

/// Runs the tool on the given arguments (no program name); writes results to
/// `out` and messages to `err`; returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace multiport::cli
