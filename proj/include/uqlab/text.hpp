#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace uqlab {

/// Shortest decimal representation that parses back to the same double.
/// Locale-independent ('.' decimal point), so output is byte-stable.
std::string format_double(double value);
/// Strict parse of the whole string; throws ConfigError naming `what`.
double parse_double(std::string_view text, std::string_view what = "number");
unsigned long long parse_unsigned(std::string_view text, std::string_view what = "integer");

std::vector<std::string> split(std::string_view text, char separator);
std::string_view trim(std::string_view text);

}  // namespace uqlab
