#pragma once

#include <charconv>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace multiac::csv {

// Shortest decimal form that parses back to the identical double.
std::string format(double x);

// Parses a full token as a double; throws std::invalid_argument otherwise.
double parse(std::string_view token);

std::vector<std::string_view> split_row(std::string_view line);

void write_row(std::ostream& os, const std::vector<double>& values);
void write_header(std::ostream& os, const std::vector<std::string>& names);

}  // namespace multiac::csv
