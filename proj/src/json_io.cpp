#include "k2/json_io.hpp"

#include "k2/errors.hpp"

namespace k2 {

Nat json_nat(const Json& j, std::string_view what) {
  if (j.is_number_unsigned()) return nat(j.get<std::uint64_t>());
  if (j.is_number_integer()) {
    auto v = j.get<std::int64_t>();
    if (v < 0) throw ValidationError(std::string(what) + ": expected a natural");
    return nat(static_cast<std::uint64_t>(v));
  }
  if (j.is_string()) return parse_nat(j.get<std::string>());
  throw ValidationError(std::string(what) + ": expected a natural");
}

std::size_t json_size(const Json& j, std::string_view what) { return to_size(json_nat(j, what)); }

Rational json_rational(const Json& j, std::string_view what) {
  if (j.is_number_integer()) return Rational(Integer(static_cast<long>(j.get<std::int64_t>())));
  if (j.is_string()) return parse_rational(j.get<std::string>());
  throw ValidationError(std::string(what) + ": expected a rational string \"p/q\"");
}

Json nat_json(const Nat& n) {
  if (n >= 0 && n.fits_ulong_p()) return Json(static_cast<std::uint64_t>(n.get_ui()));
  return Json(n.get_str());
}

Json rational_json(const Rational& q) { return Json(to_string(q)); }

Json parse_json(std::string_view text, std::string_view what) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string(what) + ": " + e.what());
  }
}

const Json& json_field(const Json& j, const char* key, std::string_view what) {
  if (!j.is_object() || !j.contains(key)) {
    throw ValidationError(std::string(what) + ": missing field '" + key + "'");
  }
  return j.at(key);
}

}  // namespace k2
