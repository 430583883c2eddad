#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace nasbo {

/// Shortest round-trip decimal form; "NA" for NaN.
std::string format_double(double value);
std::string format_optional(const std::optional<double>& value);

/// RFC 4180 writer with '\n' line endings. Fields containing a comma, quote or
/// line break are quoted.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  /// `# text` line; only valid before the header.
  void comment(std::string_view text);
  void row(const std::vector<std::string>& fields);

 private:
  std::ostream& out_;
};

struct CsvTable {
  std::vector<std::string> comments;  // without the leading "# "
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column index by name; throws std::out_of_range if absent.
  std::size_t column(std::string_view name) const;
};

/// Reads a table written by CsvWriter. Leading '#' lines are comments; the next
/// record is the header. Throws std::runtime_error on malformed quoting or
/// ragged rows.
CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::string& path);

}  // namespace nasbo
