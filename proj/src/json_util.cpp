#include "chokefit/json_util.hpp"

#include <algorithm>
#include <cmath>

namespace chokefit::json_util {

void require_keys(const nlohmann::json& j, std::string_view context,
                  std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) throw std::invalid_argument(std::string(context) + ": expected an object");
  for (const auto& item : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
      throw std::invalid_argument("unknown key: " + std::string(context) + "." + item.key());
    }
  }
}

void read_number(const nlohmann::json& j, std::string_view context, const char* key, double& out) {
  auto it = j.find(key);
  if (it == j.end()) return;
  if (!it->is_number()) throw std::invalid_argument(std::string(context) + "." + key + ": expected a number");
  const double v = it->get<double>();
  if (!std::isfinite(v)) throw std::invalid_argument(std::string(context) + "." + key + ": must be finite");
  out = v;
}

}  // namespace chokefit::json_util
