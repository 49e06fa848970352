#include "cascade/csv.h"

#include <charconv>
#include <istream>
#include <ostream>

namespace cascade {

namespace {

bool needs_quotes(const std::string& field) {
  return field.find_first_of(",\"\r\n") != std::string::npos;
}

void write_field(std::ostream& out, const std::string& field) {
  if (!needs_quotes(field)) {
    out << field;
    return;
  }
  out << '"';
  for (char c : field) {
    if (c == '"') out << '"';
    out << c;
  }
  out << '"';
}

void write_record(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out << ',';
    write_field(out, fields[i]);
  }
  out << '\n';
}

std::vector<std::string> split_record(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        current.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  if (quoted) throw CsvError("unterminated quoted field");
  fields.push_back(std::move(current));
  return fields;
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

}  // namespace

void CsvDocument::set_meta(const std::string& key, const std::string& value) {
  for (auto& entry : metadata) {
    if (entry.first == key) {
      entry.second = value;
      return;
    }
  }
  metadata.emplace_back(key, value);
}

std::string CsvDocument::meta(const std::string& key) const {
  for (const auto& entry : metadata) {
    if (entry.first == key) return entry.second;
  }
  return {};
}

bool CsvDocument::has_meta(const std::string& key) const {
  for (const auto& entry : metadata) {
    if (entry.first == key) return true;
  }
  return false;
}

std::size_t CsvDocument::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw CsvError("missing column '" + name + "'");
}

double CsvDocument::number(std::size_t row, const std::string& name) const {
  return parse_double(text(row, name));
}

const std::string& CsvDocument::text(std::size_t row, const std::string& name) const {
  const auto& fields = rows.at(row);
  const std::size_t col = column(name);
  if (col >= fields.size()) throw CsvError("short row " + std::to_string(row));
  return fields[col];
}

void write_csv(std::ostream& out, const CsvDocument& doc) {
  out << "# schema=" << kCsvSchema << '\n';
  for (const auto& [key, value] : doc.metadata) {
    if (key == "schema") continue;
    out << "# " << key << '=' << value << '\n';
  }
  write_record(out, doc.header);
  for (const auto& row : doc.rows) write_record(out, row);
}

CsvDocument read_csv(std::istream& in) {
  CsvDocument doc;
  std::string line;
  bool saw_schema = false;
  bool saw_header = false;
  while (std::getline(in, line)) {
    line = strip_cr(line);
    if (!saw_header && !line.empty() && line[0] == '#') {
      std::string body = line.substr(1);
      if (!body.empty() && body[0] == ' ') body.erase(0, 1);
      const auto eq = body.find('=');
      if (eq == std::string::npos) continue;
      std::string key = body.substr(0, eq);
      std::string value = body.substr(eq + 1);
      if (key == "schema") {
        if (value != kCsvSchema) throw CsvError("unknown schema '" + value + "'");
        saw_schema = true;
        continue;
      }
      if (!saw_schema) throw CsvError("schema line must come first");
      doc.metadata.emplace_back(std::move(key), std::move(value));
      continue;
    }
    if (!saw_schema) throw CsvError("missing '# schema=' line");
    if (line.empty()) continue;
    if (!saw_header) {
      doc.header = split_record(line);
      saw_header = true;
    } else {
      auto fields = split_record(line);
      if (fields.size() != doc.header.size()) {
        throw CsvError("row has " + std::to_string(fields.size()) + " fields, header has " +
                       std::to_string(doc.header.size()));
      }
      doc.rows.push_back(std::move(fields));
    }
  }
  if (!saw_schema) throw CsvError("missing '# schema=' line");
  if (!saw_header) throw CsvError("missing header row");
  return doc;
}

std::string format_double(double value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

double parse_double(const std::string& text) {
  double value = 0.0;
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  if (begin != end && *begin == '+') ++begin;
  const auto result = std::from_chars(begin, end, value);
  if (result.ec != std::errc() || result.ptr != end) {
    throw CsvError("not a number: '" + text + "'");
  }
  return value;
}

}  // namespace cascade
