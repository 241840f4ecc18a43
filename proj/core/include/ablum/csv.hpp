#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace ablum::csv {

// Fixed-point with six decimals; negative zero is printed as "0.000000".
std::string fixed6(double value);

// Splits one CSV line on commas (no quoting; every file we emit is numeric).
std::vector<std::string> split(std::string_view line);

// Reads a header plus rows; throws IoError when the header differs from
// `expected_header` or a row has the wrong arity.
std::vector<std::vector<std::string>> read(std::istream& in, std::string_view expected_header);

double to_double(std::string_view field);
long long to_integer(std::string_view field);

}  // namespace ablum::csv
