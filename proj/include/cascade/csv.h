#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cascade {

inline constexpr const char* kCsvSchema = "v1";

class CsvError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Comma-separated table with `# key=value` comment lines in front of the
// header. The first line is always `# schema=v1`.
struct CsvDocument {
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void set_meta(const std::string& key, const std::string& value);
  // Empty string when absent.
  std::string meta(const std::string& key) const;
  bool has_meta(const std::string& key) const;
  // Throws CsvError for unknown columns.
  std::size_t column(const std::string& name) const;
  double number(std::size_t row, const std::string& name) const;
  const std::string& text(std::size_t row, const std::string& name) const;
};

void write_csv(std::ostream& out, const CsvDocument& doc);
CsvDocument read_csv(std::istream& in);

// Shortest representation that parses back to the same double.
std::string format_double(double value);
double parse_double(const std::string& text);

}  // namespace cascade
