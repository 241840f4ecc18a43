#include "ablum/csv.hpp"

#include <charconv>
#include <cstdio>
#include <istream>

#include "ablum/errors.hpp"

namespace ablum::csv {

std::string fixed6(double value) {
  char buf[64];
  const int n = std::snprintf(buf, sizeof buf, "%.6f", value);
  std::string out(buf, static_cast<std::size_t>(n));
  if (out == "-0.000000") out.erase(0, 1);
  return out;
}

std::vector<std::string> split(std::string_view line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.emplace_back(line.substr(start));
      break;
    }
    fields.emplace_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

std::vector<std::vector<std::string>> read(std::istream& in, std::string_view expected_header) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty CSV input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != expected_header) {
    throw IoError("unexpected CSV header '" + line + "', expected '" +
                  std::string(expected_header) + "'");
  }
  const auto arity = split(expected_header).size();
  std::vector<std::vector<std::string>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split(line);
    if (fields.size() != arity) {
      throw IoError("CSV line " + std::to_string(line_no) + " has " +
                    std::to_string(fields.size()) + " fields, expected " +
                    std::to_string(arity));
    }
    rows.push_back(std::move(fields));
  }
  return rows;
}

double to_double(std::string_view field) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw IoError("not a number: '" + std::string(field) + "'");
  }
  return value;
}

long long to_integer(std::string_view field) {
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw IoError("not an integer: '" + std::string(field) + "'");
  }
  return value;
}

}  // namespace ablum::csv
