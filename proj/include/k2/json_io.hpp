#pragma once

#include <json.hpp>

#include <string>
#include <string_view>

#include "k2/numeric.hpp"

namespace k2 {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchemaVersion = "1";

/// Accepts a non-negative JSON integer or a decimal string.
Nat json_nat(const Json& j, std::string_view what);
std::size_t json_size(const Json& j, std::string_view what);
/// Accepts "p/q", "p" or a JSON integer.
Rational json_rational(const Json& j, std::string_view what);

/// Naturals that fit in 64 bits are emitted as numbers, larger ones as strings.
Json nat_json(const Nat& n);
Json rational_json(const Rational& q);

/// Parses a JSON document, mapping parse errors to ValidationError.
Json parse_json(std::string_view text, std::string_view what);

const Json& json_field(const Json& j, const char* key, std::string_view what);

}  // namespace k2
