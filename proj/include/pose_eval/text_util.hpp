#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pose_eval {

std::vector<std::string_view> split(std::string_view s, char sep);
std::string_view trim(std::string_view s);
std::string to_lower_ascii(std::string_view s);
std::string to_upper_ascii(std::string_view s);

/// Shortest decimal string that parses back to exactly `v` ("25", "0.1", "1e-08").
std::string format_shortest(double v);
/// Like format_shortest but always carries a fractional part ("10.0", "0.5").
std::string format_decimal(double v);
/// Fixed-point rendering used by reports.
std::string format_fixed(double v, int digits);

std::optional<double> parse_double(std::string_view s);
std::optional<long long> parse_int(std::string_view s);
std::optional<bool> parse_bool(std::string_view s);

}  // namespace pose_eval
