#include "chokefit/estimation/result_io.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include "chokefit/json_util.hpp"

namespace chokefit::estimation {

using nlohmann::json;
using physics::Param;
namespace ju = json_util;

namespace {

// NaN is stored as null (JSON has no NaN).
json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double number_from(const json& j) {
  if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
  if (!j.is_number()) throw ResultFormatError("expected a number");
  return j.get<double>();
}

template <typename E>
E enum_from(const json& j, const char* context, std::optional<E> (*parse)(std::string_view)) {
  if (!j.is_string()) throw std::invalid_argument(std::string(context) + ": expected a string");
  auto v = parse(j.get<std::string>());
  if (!v) throw std::invalid_argument(std::string(context) + ": unknown value '" + j.get<std::string>() + "'");
  return *v;
}

json metrics_to_json(const Metrics& m) {
  return {{"mae", number_or_null(m.mae)}, {"mape", number_or_null(m.mape)}, {"mape_excluded", m.mape_excluded}};
}

Metrics metrics_from_json(const json& j) {
  Metrics m;
  m.mae = number_from(j.at("mae"));
  m.mape = number_from(j.at("mape"));
  m.mape_excluded = j.at("mape_excluded").get<std::size_t>();
  return m;
}

json model_params_to_json(const ModelParams& p, bool with_network) {
  json j{{"mode", mode_name(p.mode)}, {"physical", p.physical}};
  if (with_network && p.network) j["network"] = *p.network;
  return j;
}

ModelParams model_params_from_json(const json& j) {
  ModelParams p;
  p.mode = enum_from<ModelMode>(j.at("mode"), "mode", mode_from_name);
  p.physical = j.at("physical").get<physics::PhysicalParams>();
  if (j.contains("network")) p.network = j.at("network").get<nnet::MlpParams>();
  return p;
}

}  // namespace

void to_json(json& j, const PriorSpec& p) {
  j = json::object();
  for (Param k : physics::kAllParams) j[std::string(physics::param_name(k))] = {{"mu", p[k].mu}, {"sigma", p[k].sigma}};
}

void from_json(const json& j, PriorSpec& p) {
  ju::require_keys(j, "priors", {"rho_o", "rho_w", "kappa", "m_g", "p_rc", "c_d"});
  for (Param k : physics::kAllParams) {
    const std::string name(physics::param_name(k));
    if (!j.contains(name)) continue;
    const json& e = j.at(name);
    const std::string ctx = "priors." + name;
    ju::require_keys(e, ctx, {"mu", "sigma"});
    ju::read_number(e, ctx, "mu", p[k].mu);
    ju::read_number(e, ctx, "sigma", p[k].sigma);
  }
}

void to_json(json& j, const RegularizationConfig& r) {
  j = {{"sigma_eps", r.sigma_eps}, {"lambda", r.lambda}, {"enabled", r.enabled}};
}

void from_json(const json& j, RegularizationConfig& r) {
  ju::require_keys(j, "regularization", {"sigma_eps", "lambda", "enabled"});
  ju::read_number(j, "regularization", "sigma_eps", r.sigma_eps);
  ju::read_number(j, "regularization", "lambda", r.lambda);
  ju::read(j, "regularization", "enabled", r.enabled);
}

void to_json(json& j, const FitConfig& f) {
  json fixed = json::object();
  for (const auto& [p, v] : f.fixed_params) fixed[std::string(physics::param_name(p))] = v;
  j = {{"mode", mode_name(f.mode)},
       {"optimizer", optimizer_name(f.optimizer)},
       {"learning_rate", f.learning_rate},
       {"lr_schedule", schedule_name(f.lr_schedule)},
       {"lr_final_fraction", f.lr_final_fraction},
       {"batch_size", f.batch_size},
       {"epochs", f.epochs},
       {"restarts", f.restarts},
       {"seed", f.seed},
       {"fixed_params", fixed},
       {"scaling", scaling_name(f.scaling)},
       {"threads", f.threads}};
}

void from_json(const json& j, FitConfig& f) {
  constexpr const char* ctx = "fit";
  ju::require_keys(j, ctx,
                   {"mode", "optimizer", "learning_rate", "lr_schedule", "lr_final_fraction", "batch_size", "epochs",
                    "restarts", "seed", "fixed_params", "scaling", "threads"});
  if (j.contains("mode")) f.mode = enum_from<ModelMode>(j["mode"], "fit.mode", mode_from_name);
  if (j.contains("optimizer")) f.optimizer = enum_from<OptimizerKind>(j["optimizer"], "fit.optimizer", optimizer_from_name);
  if (j.contains("lr_schedule")) f.lr_schedule = enum_from<LrSchedule>(j["lr_schedule"], "fit.lr_schedule", schedule_from_name);
  if (j.contains("scaling")) f.scaling = enum_from<ParamScaling>(j["scaling"], "fit.scaling", scaling_from_name);
  ju::read_number(j, ctx, "learning_rate", f.learning_rate);
  ju::read_number(j, ctx, "lr_final_fraction", f.lr_final_fraction);
  ju::read(j, ctx, "batch_size", f.batch_size);
  ju::read(j, ctx, "epochs", f.epochs);
  ju::read(j, ctx, "restarts", f.restarts);
  ju::read(j, ctx, "seed", f.seed);
  ju::read(j, ctx, "threads", f.threads);
  if (j.contains("fixed_params")) {
    const json& fx = j["fixed_params"];
    if (!fx.is_object()) throw std::invalid_argument("fit.fixed_params: expected an object");
    f.fixed_params.clear();
    for (const auto& item : fx.items()) {
      auto p = physics::param_from_name(item.key());
      if (!p) throw std::invalid_argument("unknown key: fit.fixed_params." + item.key());
      double v = 0.0;
      ju::read_number(fx, "fit.fixed_params", item.key().c_str(), v);
      f.fixed_params[*p] = v;
    }
  }
}

void to_json(json& j, const ModelSetup& s) {
  j = {{"consts", {{"r_gas", s.consts.r_gas}, {"z1", s.consts.z1}, {"rho_o_st", s.consts.rho_o_st}}},
       {"area", {{"a_max", s.area.a_max}, {"shape", physics::area_shape_name(s.area.shape)}}},
       {"network", {{"sizes", s.network.sizes}, {"output_scale", s.network.output_scale}}}};
}

void from_json(const json& j, ModelSetup& s) {
  ju::require_keys(j, "model", {"consts", "area", "network"});
  if (j.contains("consts")) {
    const json& c = j["consts"];
    ju::require_keys(c, "model.consts", {"r_gas", "z1", "rho_o_st"});
    ju::read_number(c, "model.consts", "r_gas", s.consts.r_gas);
    ju::read_number(c, "model.consts", "z1", s.consts.z1);
    ju::read_number(c, "model.consts", "rho_o_st", s.consts.rho_o_st);
  }
  if (j.contains("area")) {
    const json& a = j["area"];
    ju::require_keys(a, "model.area", {"a_max", "shape"});
    ju::read_number(a, "model.area", "a_max", s.area.a_max);
    if (a.contains("shape")) {
      s.area.shape = enum_from<physics::AreaShape>(a["shape"], "model.area.shape", physics::area_shape_from_name);
    }
  }
  if (j.contains("network")) {
    const json& n = j["network"];
    ju::require_keys(n, "model.network", {"sizes", "output_scale"});
    ju::read(n, "model.network", "sizes", s.network.sizes);
    ju::read_number(n, "model.network", "output_scale", s.network.output_scale);
  }
}

}  // namespace chokefit::estimation

namespace chokefit::physics {

using nlohmann::json;
namespace ju = json_util;

void to_json(json& j, const PhysicalParams& p) {
  j = json::object();
  for (Param k : physics::kAllParams) j[std::string(physics::param_name(k))] = p.get(k);
  j["c_d_absorbed"] = p.c_d_absorbed;
}

void from_json(const json& j, PhysicalParams& p) {
  ju::require_keys(j, "params", {"rho_o", "rho_w", "kappa", "m_g", "p_rc", "c_d", "c_d_absorbed"});
  for (Param k : physics::kAllParams) {
    const std::string name(physics::param_name(k));
    double v = p.get(k);
    ju::read_number(j, "params", name.c_str(), v);
    p.set(k, v);
  }
  ju::read(j, "params", "c_d_absorbed", p.c_d_absorbed);
}

}  // namespace chokefit::physics

namespace chokefit::estimation {

json result_to_json(const FitResult& result) {
  json restarts = json::array();
  for (const auto& r : result.restarts) {
    json trace = json::array();
    for (double v : r.loss_trace) trace.push_back(number_or_null(v));
    // The initial network is regenerated from the seed on load.
    restarts.push_back({{"index", r.index},
                        {"status", status_name(r.status)},
                        {"message", r.message},
                        {"initial", model_params_to_json(r.initial, false)},
                        {"final", model_params_to_json(r.final_params, true)},
                        {"loss_trace", trace},
                        {"rejected_steps", r.rejected_steps},
                        {"test", metrics_to_json(r.test)}});
  }
  json stats = json::array();
  for (const auto& s : result.summary.stats) {
    stats.push_back({{"name", s.name},
                     {"min", number_or_null(s.min)},
                     {"median", number_or_null(s.median)},
                     {"max", number_or_null(s.max)}});
  }
  return {{"format", kResultFormat},
          {"version", kResultVersion},
          {"config",
           {{"model", result.setup},
            {"fit", result.config},
            {"priors", result.priors},
            {"regularization", result.regularization}}},
          {"train_rows", result.train_rows},
          {"test_rows", result.test_rows},
          {"restarts", restarts},
          {"summary", {{"successful_restarts", result.summary.successful_restarts}, {"stats", stats}}}};
}

FitResult result_from_json(const json& j) {
  if (!j.is_object() || j.value("format", std::string()) != kResultFormat) {
    throw ResultFormatError("not a fit result file");
  }
  const int version = j.value("version", -1);
  if (version != kResultVersion) {
    throw ResultFormatError("unsupported fit result version " + std::to_string(version) + " (expected " +
                            std::to_string(kResultVersion) + ")");
  }
  try {
    FitResult out;
    const json& cfg = j.at("config");
    out.setup = cfg.at("model").get<ModelSetup>();
    out.config = cfg.at("fit").get<FitConfig>();
    out.priors = cfg.at("priors").get<PriorSpec>();
    out.regularization = cfg.at("regularization").get<RegularizationConfig>();
    out.train_rows = j.at("train_rows").get<std::size_t>();
    out.test_rows = j.at("test_rows").get<std::size_t>();
    for (const json& r : j.at("restarts")) {
      RestartRecord rec;
      rec.index = r.at("index").get<std::size_t>();
      rec.status = enum_from<RestartStatus>(r.at("status"), "status", status_from_name);
      rec.message = r.at("message").get<std::string>();
      rec.initial = model_params_from_json(r.at("initial"));
      if (rec.initial.mode == ModelMode::hm) {
        rec.initial.network = initial_params(out.setup, out.priors, out.config, rec.index).network;
      }
      rec.final_params = model_params_from_json(r.at("final"));
      for (const json& v : r.at("loss_trace")) rec.loss_trace.push_back(number_from(v));
      rec.rejected_steps = r.at("rejected_steps").get<std::size_t>();
      rec.test = metrics_from_json(r.at("test"));
      out.restarts.push_back(std::move(rec));
    }
    const json& s = j.at("summary");
    out.summary.successful_restarts = s.at("successful_restarts").get<std::size_t>();
    for (const json& st : s.at("stats")) {
      out.summary.stats.push_back({st.at("name").get<std::string>(), number_from(st.at("min")),
                                   number_from(st.at("median")), number_from(st.at("max"))});
    }
    return out;
  } catch (const json::exception& e) {
    throw ResultFormatError(std::string("malformed fit result: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ResultFormatError(std::string("malformed fit result: ") + e.what());
  }
}

void save_result(const FitResult& result, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << result_to_json(result).dump(1) << '\n';
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

FitResult load_result(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ResultFormatError("cannot open fit result " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ResultFormatError("cannot parse " + path.string() + ": " + e.what());
  }
  return result_from_json(j);
}

}  // namespace chokefit::estimation
