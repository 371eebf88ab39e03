#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

namespace graphon {

/// 17 significant digits, general format.
std::string format_double(double v);

std::string join_csv(const std::vector<double>& values);

/// Splits one line on commas and parses each field as a double.
std::vector<double> parse_csv_row(const std::string& line);

/// Pretty-printed JSON with floats in the same 17-digit form; non-finite
/// numbers become null.
std::string dump_json(const nlohmann::json& value, int indent = 2);

}  // namespace graphon
