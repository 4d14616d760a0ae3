#pragma once

#include <string>

#include <json.hpp>

namespace starcalc {

/// Compact JSON with object keys in sorted order and every floating-point
/// number printed with 17 significant digits. Equal values give equal bytes.
std::string write_json(const nlohmann::json& value);

/// The 17-significant-digit form used for JSON and CSV output.
std::string format17(double v);

} // namespace starcalc
