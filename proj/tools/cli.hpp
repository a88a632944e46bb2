#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace refl::cli {

enum ExitCode : int {
  kSuccess = 0,
  kUsage = 1,
  kDisagreement = 2,
  kInputError = 3,
  kNumericalFailure = 4,
};

using Cell = std::variant<double, long, std::string, bool>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

/// 17 significant digits, '.' decimal point, independent of locale.
std::string format_number(double value);

std::string to_csv(const Table& table);
std::string to_json(const Table& table, std::string_view command);

/// Parses "start:stop:step"; throws Error{InvalidArgument} on bad syntax.
struct GridSpec {
  double start = 0.0;
  double stop = 0.0;
  double step = 0.0;
};
GridSpec parse_grid(std::string_view text);

/// args excludes the program name. Tables go to `out` (or --out), notes and
/// diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace refl::cli
