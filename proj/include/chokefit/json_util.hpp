#pragma once

// Helpers for strict config parsing: every key must be known and typed.

#include <initializer_list>
#include <stdexcept>
#include <string>
#include <string_view>

#include "json.hpp"

namespace chokefit::json_util {

/// Throws std::invalid_argument if `j` is not an object or has a key outside
/// `allowed`. `context` prefixes the message, e.g. "fit".
void require_keys(const nlohmann::json& j, std::string_view context,
                  std::initializer_list<std::string_view> allowed);

/// Reads j[key] into `out` when present. Type mismatches throw
/// std::invalid_argument naming context.key.
template <typename T>
void read(const nlohmann::json& j, std::string_view context, const char* key, T& out) {
  auto it = j.find(key);
  if (it == j.end()) return;
  try {
    out = it->template get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string(context) + "." + key + ": " + e.what());
  }
}

/// Reads a finite double.
void read_number(const nlohmann::json& j, std::string_view context, const char* key, double& out);

}  // namespace chokefit::json_util
