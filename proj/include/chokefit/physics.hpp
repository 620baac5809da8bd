#pragma once

// Mechanistic multiphase choke model (Sachdeva type): gas densities,
// homogeneous mixture density, critical/sub-critical pressure ratio,
// mass flow rate and oil volumetric rate at standard conditions.
//
// Units are SI throughout (Pa, K, kg, m, s). Oil rates are reported in m3/h.

#include <array>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace chokefit::physics {

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct FluidComposition {
  double eta_g = 0.0;  // gas mass fraction
  double eta_o = 0.0;  // oil mass fraction

  [[nodiscard]] double eta_w() const noexcept { return 1.0 - eta_g - eta_o; }
  [[nodiscard]] bool valid() const noexcept;
};

struct ChokeInput {
  double p1 = 0.0;  // upstream pressure [Pa]
  double p2 = 0.0;  // downstream pressure [Pa]
  double t1 = 0.0;  // upstream temperature [K]
  double u = 0.0;   // choke opening, normalized to [0, 1]
  FluidComposition composition;

  [[nodiscard]] bool valid() const noexcept;
};

/// Physical parameters in the fixed order used by every gradient vector.
enum class Param : std::size_t { rho_o = 0, rho_w, kappa, m_g, p_rc, c_d };
inline constexpr std::size_t kNumParams = 6;
inline constexpr std::array<Param, kNumParams> kAllParams = {
    Param::rho_o, Param::rho_w, Param::kappa, Param::m_g, Param::p_rc, Param::c_d};

[[nodiscard]] std::string_view param_name(Param p) noexcept;
[[nodiscard]] std::optional<Param> param_from_name(std::string_view name) noexcept;
[[nodiscard]] constexpr std::size_t index(Param p) noexcept { return static_cast<std::size_t>(p); }

using ParamVector = std::array<double, kNumParams>;

struct PhysicalParams {
  double rho_o = 0.0;  // oil density [kg/m3]
  double rho_w = 0.0;  // water density [kg/m3]
  double kappa = 0.0;  // adiabatic gas expansion coefficient
  double m_g = 0.0;    // molar mass of gas [kg/mol]
  double p_rc = 0.0;   // critical pressure ratio
  double c_d = 1.0;    // discharge coefficient
  // Hybrid models fold the discharge coefficient into the learned area, so
  // c_d is not a parameter and evaluates as 1.
  bool c_d_absorbed = false;

  /// Values used to generate the synthetic benchmark data.
  static PhysicalParams synthetic_truth() noexcept;

  [[nodiscard]] double effective_c_d() const noexcept { return c_d_absorbed ? 1.0 : c_d; }
  [[nodiscard]] double get(Param p) const noexcept;
  void set(Param p, double value) noexcept;
  [[nodiscard]] ParamVector values() const noexcept;
  static PhysicalParams from_values(const ParamVector& v, bool c_d_absorbed = false) noexcept;

  [[nodiscard]] bool valid() const noexcept;
  /// Throws DomainError naming the first violated invariant.
  void validate() const;
};

struct FluidConstants {
  double r_gas = 8.31446;     // universal gas constant [J/(mol K)]
  double z1 = 1.0;            // upstream gas compressibility factor
  double rho_o_st = 800.0;    // oil density at standard conditions [kg/m3]
};

enum class AreaShape {
  quadratic,  // a_max * u^2
  logistic,   // normalized S-curve, used to build structurally mismatched data
};

[[nodiscard]] std::string_view area_shape_name(AreaShape s) noexcept;
[[nodiscard]] std::optional<AreaShape> area_shape_from_name(std::string_view name) noexcept;

struct AreaSpec {
  double a_max = 0.01;  // [m2]
  AreaShape shape = AreaShape::quadratic;
};

/// Raised when the flow equation cannot be evaluated for the given
/// parameters (negative square-root argument, non-finite intermediates).
class EvaluationError : public std::runtime_error {
 public:
  EvaluationError(const std::string& what, const ChokeInput& x, const PhysicalParams& phi);
  const ChokeInput& input() const noexcept { return input_; }
  const PhysicalParams& params() const noexcept { return params_; }

 private:
  ChokeInput input_;
  PhysicalParams params_;
};

[[nodiscard]] double gas_density_upstream(double p1, double t1, double m_g, const FluidConstants& consts);
[[nodiscard]] double gas_density_downstream(double rho_g1, double p_r, double kappa);
[[nodiscard]] double mixture_density(const FluidComposition& comp, double rho_g, double rho_o, double rho_w);
[[nodiscard]] double effective_pressure_ratio(double p1, double p2, double p_rc);
[[nodiscard]] double mechanistic_area(double u, const AreaSpec& spec);
[[nodiscard]] double mass_flow_rate(const ChokeInput& x, const PhysicalParams& phi,
                                    const FluidConstants& consts, double area);
[[nodiscard]] double oil_rate_std(double mdot, double eta_o, double rho_o_st);
[[nodiscard]] double mm_predict(const ChokeInput& x, const PhysicalParams& phi,
                                const FluidConstants& consts, const AreaSpec& spec);

/// Gradient of mm_predict with respect to every physical parameter.
[[nodiscard]] ParamVector mm_param_gradient(const ChokeInput& x, const PhysicalParams& phi,
                                            const FluidConstants& consts, const AreaSpec& spec);

/// Oil rate for an explicit flow area together with its derivatives with
/// respect to the physical parameters and the area. Non-throwing: `ok` is
/// false when the flow equation is infeasible for these parameters. The
/// value is bit-identical to mm_predict when `area` is the mechanistic area.
/// When phi.c_d_absorbed is set, C_D evaluates as 1 and its derivative is 0.
struct RateEvaluation {
  bool ok = false;
  double value = 0.0;       // [m3/h]
  ParamVector d_params{};   // dQ/dphi_i
  double d_area = 0.0;      // dQ/dA [m3/h per m2]
};

[[nodiscard]] RateEvaluation oil_rate_with_gradient(const ChokeInput& x, const PhysicalParams& phi,
                                                    const FluidConstants& consts, double area) noexcept;

/// Value-only counterpart of oil_rate_with_gradient.
[[nodiscard]] std::optional<double> try_oil_rate(const ChokeInput& x, const PhysicalParams& phi,
                                                 const FluidConstants& consts, double area) noexcept;

}  // namespace chokefit::physics
