#pragma once

#include <filesystem>
#include <stdexcept>

#include "chokefit/estimation/train.hpp"
#include "json.hpp"

namespace chokefit::physics {

void to_json(nlohmann::json& j, const PhysicalParams& p);
void from_json(const nlohmann::json& j, PhysicalParams& p);

}  // namespace chokefit::physics

namespace chokefit::estimation {

class ResultFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kResultFormat = "chokefit-fit-result";
inline constexpr int kResultVersion = 1;

// Strict JSON bindings: unknown keys and wrong types throw
// std::invalid_argument naming the key. Missing keys keep their defaults.
void to_json(nlohmann::json& j, const PriorSpec& p);
void from_json(const nlohmann::json& j, PriorSpec& p);
void to_json(nlohmann::json& j, const RegularizationConfig& r);
void from_json(const nlohmann::json& j, RegularizationConfig& r);
void to_json(nlohmann::json& j, const FitConfig& f);
void from_json(const nlohmann::json& j, FitConfig& f);
void to_json(nlohmann::json& j, const ModelSetup& s);
void from_json(const nlohmann::json& j, ModelSetup& s);

nlohmann::json result_to_json(const FitResult& result);
/// Throws ResultFormatError on a wrong format tag or version.
FitResult result_from_json(const nlohmann::json& j);

void save_result(const FitResult& result, const std::filesystem::path& path);
FitResult load_result(const std::filesystem::path& path);

}  // namespace chokefit::estimation
