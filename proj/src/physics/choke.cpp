#include "chokefit/physics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dual.hpp"

namespace chokefit::physics {

namespace {

constexpr double kSecondsPerHour = 3600.0;

// Logistic area curve: steepness and midpoint on the normalized opening.
constexpr double kLogisticSteepness = 10.0;
constexpr double kLogisticMidpoint = 0.5;

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

std::string describe(const ChokeInput& x) {
  std::ostringstream os;
  os << "p1=" << x.p1 << " p2=" << x.p2 << " t1=" << x.t1 << " u=" << x.u
     << " eta_g=" << x.composition.eta_g << " eta_o=" << x.composition.eta_o;
  return os.str();
}

std::string describe(const PhysicalParams& phi) {
  std::ostringstream os;
  os << "rho_o=" << phi.rho_o << " rho_w=" << phi.rho_w << " kappa=" << phi.kappa
     << " m_g=" << phi.m_g << " p_rc=" << phi.p_rc << " c_d=" << phi.effective_c_d();
  return os.str();
}

// Shared kernel for every flow evaluation so that value-only, gradient and
// public paths produce bit-identical results. Returns false when the flow
// equation is infeasible.
template <class T>
bool rate_kernel(const ChokeInput& x, const T& rho_o, const T& rho_w, const T& kappa, const T& m_g,
                 const T& p_rc, const T& c_d, const T& area, const FluidConstants& c, T& mdot,
                 T& q) {
  using detail::exp;
  using detail::expm1;
  using detail::log;
  using detail::sqrt;
  using detail::value_of;
  if (!(value_of(kappa) > 1.0) || !(value_of(rho_o) > 0.0) || !(value_of(rho_w) > 0.0) ||
      !(value_of(m_g) > 0.0) || !(value_of(p_rc) > 0.0) || !(x.p1 > 0.0) || !(x.t1 > 0.0)) {
    return false;
  }
  const double raw = std::min(x.p2 / x.p1, 1.0);
  // Sub-critical branch wins ties at raw == p_rc.
  const T pr = raw >= value_of(p_rc) ? T(raw) : p_rc;

  const double eta_g = x.composition.eta_g;
  const double eta_o = x.composition.eta_o;
  const double eta_w = x.composition.eta_w();

  const T rho_g1 = m_g * (x.p1 / (c.z1 * c.r_gas * x.t1));
  const T log_pr = log(pr);
  const T rho_g2 = rho_g1 * exp(log_pr / kappa);

  const T liquid = eta_o / rho_o + eta_w / rho_w;
  const T inv_rho = eta_g / rho_g2 + liquid;
  // 1/rho_g1 - pr/rho_g2 = (1 - pr^((kappa-1)/kappa)) / rho_g1, written with
  // expm1 so that it stays non-negative as pr -> 1.
  const T gas = kappa / (kappa - 1.0) * eta_g * (-expm1(log_pr * ((kappa - 1.0) / kappa))) / rho_g1;
  const T bracket = gas + liquid * (1.0 - pr);
  const T arg = 2.0 * x.p1 * bracket / (inv_rho * inv_rho);

  const double a = value_of(arg);
  if (!std::isfinite(a) || a < 0.0) return false;
  const T root = a == 0.0 ? T(0.0) : sqrt(arg);
  mdot = c_d * area * root;
  q = eta_o * mdot / c.rho_o_st * kSecondsPerHour;
  return std::isfinite(value_of(q));
}

bool rate_value(const ChokeInput& x, const PhysicalParams& phi, const FluidConstants& c, double area,
                double& mdot, double& q) {
  return rate_kernel<double>(x, phi.rho_o, phi.rho_w, phi.kappa, phi.m_g, phi.p_rc,
                             phi.effective_c_d(), area, c, mdot, q);
}

void require_input(const ChokeInput& x) {
  if (!x.valid()) throw DomainError("invalid choke input: " + describe(x));
}

}  // namespace

bool FluidComposition::valid() const noexcept {
  return std::isfinite(eta_g) && std::isfinite(eta_o) && eta_g >= 0.0 && eta_o >= 0.0 &&
         eta_g <= 1.0 && eta_o <= 1.0 && eta_g + eta_o <= 1.0;
}

bool ChokeInput::valid() const noexcept {
  return positive_finite(p1) && positive_finite(p2) && positive_finite(t1) && std::isfinite(u) &&
         u >= 0.0 && u <= 1.0 && composition.valid();
}

std::string_view param_name(Param p) noexcept {
  switch (p) {
    case Param::rho_o: return "rho_o";
    case Param::rho_w: return "rho_w";
    case Param::kappa: return "kappa";
    case Param::m_g: return "m_g";
    case Param::p_rc: return "p_rc";
    case Param::c_d: return "c_d";
  }
  return "unknown";
}

std::optional<Param> param_from_name(std::string_view name) noexcept {
  for (Param p : kAllParams) {
    if (param_name(p) == name) return p;
  }
  return std::nullopt;
}

PhysicalParams PhysicalParams::synthetic_truth() noexcept {
  return PhysicalParams{760.0, 1010.0, 1.30, 0.021, 0.55, 1.0, false};
}

double PhysicalParams::get(Param p) const noexcept {
  switch (p) {
    case Param::rho_o: return rho_o;
    case Param::rho_w: return rho_w;
    case Param::kappa: return kappa;
    case Param::m_g: return m_g;
    case Param::p_rc: return p_rc;
    case Param::c_d: return c_d;
  }
  return 0.0;
}

void PhysicalParams::set(Param p, double value) noexcept {
  switch (p) {
    case Param::rho_o: rho_o = value; break;
    case Param::rho_w: rho_w = value; break;
    case Param::kappa: kappa = value; break;
    case Param::m_g: m_g = value; break;
    case Param::p_rc: p_rc = value; break;
    case Param::c_d: c_d = value; break;
  }
}

ParamVector PhysicalParams::values() const noexcept {
  return {rho_o, rho_w, kappa, m_g, p_rc, c_d};
}

PhysicalParams PhysicalParams::from_values(const ParamVector& v, bool c_d_absorbed) noexcept {
  return PhysicalParams{v[0], v[1], v[2], v[3], v[4], c_d_absorbed ? 1.0 : v[5], c_d_absorbed};
}

bool PhysicalParams::valid() const noexcept {
  try {
    validate();
  } catch (const DomainError&) {
    return false;
  }
  return true;
}

void PhysicalParams::validate() const {
  if (!positive_finite(rho_o)) throw DomainError("rho_o must be positive");
  if (!positive_finite(rho_w)) throw DomainError("rho_w must be positive");
  if (!std::isfinite(kappa) || kappa <= 1.0) throw DomainError("kappa must exceed 1");
  if (!positive_finite(m_g)) throw DomainError("m_g must be positive");
  if (!std::isfinite(p_rc) || p_rc <= 0.0 || p_rc >= 1.0) throw DomainError("p_rc must lie in (0, 1)");
  if (!c_d_absorbed && !positive_finite(c_d)) throw DomainError("c_d must be positive");
}

std::string_view area_shape_name(AreaShape s) noexcept {
  switch (s) {
    case AreaShape::quadratic: return "quadratic";
    case AreaShape::logistic: return "logistic";
  }
  return "unknown";
}

std::optional<AreaShape> area_shape_from_name(std::string_view name) noexcept {
  if (name == "quadratic") return AreaShape::quadratic;
  if (name == "logistic") return AreaShape::logistic;
  return std::nullopt;
}

EvaluationError::EvaluationError(const std::string& what, const ChokeInput& x,
                                 const PhysicalParams& phi)
    : std::runtime_error(what + " [" + describe(x) + "; " + describe(phi) + "]"),
      input_(x),
      params_(phi) {}

double gas_density_upstream(double p1, double t1, double m_g, const FluidConstants& consts) {
  if (!positive_finite(p1) || !positive_finite(t1) || !positive_finite(m_g) ||
      !positive_finite(consts.z1) || !positive_finite(consts.r_gas)) {
    throw DomainError("gas_density_upstream: inputs must be positive");
  }
  return p1 * m_g / (consts.z1 * consts.r_gas * t1);
}

double gas_density_downstream(double rho_g1, double p_r, double kappa) {
  if (!positive_finite(rho_g1)) throw DomainError("gas_density_downstream: rho_g1 must be positive");
  if (!(p_r > 0.0) || p_r > 1.0) throw DomainError("gas_density_downstream: p_r must lie in (0, 1]");
  if (!(kappa > 1.0)) throw DomainError("gas_density_downstream: kappa must exceed 1");
  return rho_g1 * std::pow(p_r, 1.0 / kappa);
}

double mixture_density(const FluidComposition& comp, double rho_g, double rho_o, double rho_w) {
  if (!comp.valid()) throw DomainError("mixture_density: invalid composition");
  if (!positive_finite(rho_g) || !positive_finite(rho_o) || !positive_finite(rho_w)) {
    throw DomainError("mixture_density: densities must be positive");
  }
  return 1.0 / (comp.eta_g / rho_g + comp.eta_o / rho_o + comp.eta_w() / rho_w);
}

double effective_pressure_ratio(double p1, double p2, double p_rc) {
  if (!positive_finite(p1) || !positive_finite(p2)) {
    throw DomainError("effective_pressure_ratio: pressures must be positive");
  }
  const double raw = std::min(p2 / p1, 1.0);
  return raw >= p_rc ? raw : p_rc;
}

double mechanistic_area(double u, const AreaSpec& spec) {
  if (!std::isfinite(u) || u < 0.0 || u > 1.0) throw DomainError("mechanistic_area: u outside [0, 1]");
  if (!positive_finite(spec.a_max)) throw DomainError("mechanistic_area: a_max must be positive");
  switch (spec.shape) {
    case AreaShape::quadratic:
      return spec.a_max * u * u;
    case AreaShape::logistic: {
      auto s = [](double v) { return 1.0 / (1.0 + std::exp(-kLogisticSteepness * (v - kLogisticMidpoint))); };
      const double lo = s(0.0);
      const double hi = s(1.0);
      return spec.a_max * (s(u) - lo) / (hi - lo);
    }
  }
  throw DomainError("mechanistic_area: unknown shape");
}

double mass_flow_rate(const ChokeInput& x, const PhysicalParams& phi, const FluidConstants& consts,
                      double area) {
  require_input(x);
  phi.validate();
  if (!std::isfinite(area) || area < 0.0) throw DomainError("mass_flow_rate: area must be non-negative");
  double mdot = 0.0;
  double q = 0.0;
  if (!rate_value(x, phi, consts, area, mdot, q)) {
    throw EvaluationError("mass flow equation infeasible (negative square-root argument)", x, phi);
  }
  return mdot;
}

double oil_rate_std(double mdot, double eta_o, double rho_o_st) {
  if (!positive_finite(rho_o_st)) throw DomainError("oil_rate_std: rho_o_st must be positive");
  if (!std::isfinite(mdot) || mdot < 0.0) throw DomainError("oil_rate_std: mdot must be non-negative");
  return eta_o * mdot / rho_o_st * kSecondsPerHour;
}

double mm_predict(const ChokeInput& x, const PhysicalParams& phi, const FluidConstants& consts,
                  const AreaSpec& spec) {
  require_input(x);
  phi.validate();
  const double area = mechanistic_area(x.u, spec);
  double mdot = 0.0;
  double q = 0.0;
  if (!rate_value(x, phi, consts, area, mdot, q)) {
    throw EvaluationError("mass flow equation infeasible (negative square-root argument)", x, phi);
  }
  return q;
}

RateEvaluation oil_rate_with_gradient(const ChokeInput& x, const PhysicalParams& phi,
                                      const FluidConstants& consts, double area) noexcept {
  using D = detail::Dual<kNumParams + 1>;
  constexpr std::size_t kAreaSlot = kNumParams;
  const D rho_o = D::variable(phi.rho_o, index(Param::rho_o));
  const D rho_w = D::variable(phi.rho_w, index(Param::rho_w));
  const D kappa = D::variable(phi.kappa, index(Param::kappa));
  const D m_g = D::variable(phi.m_g, index(Param::m_g));
  const D p_rc = D::variable(phi.p_rc, index(Param::p_rc));
  const D c_d = phi.c_d_absorbed ? D(1.0) : D::variable(phi.c_d, index(Param::c_d));
  const D a = D::variable(area, kAreaSlot);

  D mdot;
  D q;
  RateEvaluation out;
  if (!rate_kernel<D>(x, rho_o, rho_w, kappa, m_g, p_rc, c_d, a, consts, mdot, q)) return out;
  out.ok = true;
  out.value = q.v;
  for (std::size_t i = 0; i < kNumParams; ++i) out.d_params[i] = q.d[i];
  out.d_area = q.d[kAreaSlot];
  for (double g : out.d_params) {
    if (!std::isfinite(g)) out.ok = false;
  }
  if (!std::isfinite(out.d_area)) out.ok = false;
  return out;
}

std::optional<double> try_oil_rate(const ChokeInput& x, const PhysicalParams& phi,
                                   const FluidConstants& consts, double area) noexcept {
  double mdot = 0.0;
  double q = 0.0;
  if (!rate_value(x, phi, consts, area, mdot, q)) return std::nullopt;
  return q;
}

ParamVector mm_param_gradient(const ChokeInput& x, const PhysicalParams& phi,
                              const FluidConstants& consts, const AreaSpec& spec) {
  require_input(x);
  phi.validate();
  const double area = mechanistic_area(x.u, spec);
  const RateEvaluation r = oil_rate_with_gradient(x, phi, consts, area);
  if (!r.ok) throw EvaluationError("mass flow equation infeasible (negative square-root argument)", x, phi);
  return r.d_params;
}

}  // namespace chokefit::physics
