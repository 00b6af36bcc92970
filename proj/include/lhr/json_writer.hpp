#pragma once

#include <json.hpp>

#include <string>

namespace lhr {

using Json = nlohmann::ordered_json;

/// Shortest "%.17g" rendering; parses back to the identical double.
std::string format_double(double x);

/// Serializes with every floating-point number printed at 17 significant digits.
/// Non-finite numbers are written as the strings "inf", "-inf", "nan".
std::string dump_json(const Json& j, int indent = 2);

}  // namespace lhr
