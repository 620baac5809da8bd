#include "chokefit/cli/config.hpp"

#include <cmath>
#include <fstream>

#include "chokefit/estimation/result_io.hpp"
#include "chokefit/json_util.hpp"

namespace chokefit::cli {

using nlohmann::json;
namespace ju = json_util;

namespace {

json interval_json(const data::Interval& iv) { return json::array({iv.lo, iv.hi}); }

void read_interval(const json& j, const std::string& ctx, const char* key, data::Interval& iv) {
  auto it = j.find(key);
  if (it == j.end()) return;
  if (!it->is_array() || it->size() != 2 || !(*it)[0].is_number() || !(*it)[1].is_number()) {
    throw std::invalid_argument(ctx + "." + key + ": expected [lo, hi]");
  }
  iv = {(*it)[0].get<double>(), (*it)[1].get<double>()};
}

json synthetic_json(const data::SyntheticConfig& s) {
  const auto& r = s.ranges;
  return {{"true_params", s.true_params},
          {"area", {{"a_max", s.area.a_max}, {"shape", physics::area_shape_name(s.area.shape)}}},
          {"n_points", s.n_points},
          {"n_test_points", s.n_test_points},
          {"noise_sigma", s.noise_sigma},
          {"ranges",
           {{"p1", interval_json(r.p1)},
            {"pr_raw", interval_json(r.pr_raw)},
            {"t1", interval_json(r.t1)},
            {"u", interval_json(r.u)},
            {"eta_g", interval_json(r.eta_g)},
            {"eta_o", interval_json(r.eta_o)}}}};
}

void read_synthetic(const json& j, data::SyntheticConfig& s) {
  const std::string ctx = "synthetic";
  ju::require_keys(j, ctx, {"true_params", "area", "n_points", "n_test_points", "noise_sigma", "ranges"});
  if (j.contains("true_params")) {
    s.true_params = j["true_params"].get<physics::PhysicalParams>();
    if (s.true_params.c_d_absorbed) throw std::invalid_argument("synthetic.true_params: c_d cannot be absorbed");
  }
  if (j.contains("area")) {
    const json& a = j["area"];
    ju::require_keys(a, "synthetic.area", {"a_max", "shape"});
    ju::read_number(a, "synthetic.area", "a_max", s.area.a_max);
    if (a.contains("shape")) {
      auto sh = a["shape"].is_string() ? physics::area_shape_from_name(a["shape"].get<std::string>()) : std::nullopt;
      if (!sh) throw std::invalid_argument("synthetic.area.shape: expected quadratic or logistic");
      s.area.shape = *sh;
    }
  }
  ju::read(j, ctx, "n_points", s.n_points);
  ju::read(j, ctx, "n_test_points", s.n_test_points);
  ju::read_number(j, ctx, "noise_sigma", s.noise_sigma);
  if (j.contains("ranges")) {
    const json& r = j["ranges"];
    const std::string rc = "synthetic.ranges";
    ju::require_keys(r, rc, {"p1", "pr_raw", "t1", "u", "eta_g", "eta_o"});
    read_interval(r, rc, "p1", s.ranges.p1);
    read_interval(r, rc, "pr_raw", s.ranges.pr_raw);
    read_interval(r, rc, "t1", s.ranges.t1);
    read_interval(r, rc, "u", s.ranges.u);
    read_interval(r, rc, "eta_g", s.ranges.eta_g);
    read_interval(r, rc, "eta_o", s.ranges.eta_o);
  }
}

json schema_json(const data::SchemaConfig& s) {
  return {{"columns",
           {{"timestamp", s.timestamp},
            {"p1", s.p1},
            {"p2", s.p2},
            {"t1", s.t1},
            {"u", s.u},
            {"eta_g", s.eta_g},
            {"eta_o", s.eta_o},
            {"q_o", s.q_o}}},
          {"pressure_factor", s.pressure_factor},
          {"temperature_offset", s.temperature_offset},
          {"choke_factor", s.choke_factor},
          {"rate_factor", s.rate_factor},
          {"max_bad_row_fraction", s.max_bad_row_fraction}};
}

void read_schema(const json& j, data::SchemaConfig& s) {
  const std::string ctx = "schema";
  ju::require_keys(j, ctx,
                   {"columns", "pressure_factor", "temperature_offset", "choke_factor", "rate_factor",
                    "max_bad_row_fraction"});
  if (j.contains("columns")) {
    const json& c = j["columns"];
    const std::string cc = "schema.columns";
    ju::require_keys(c, cc, {"timestamp", "p1", "p2", "t1", "u", "eta_g", "eta_o", "q_o"});
    ju::read(c, cc, "timestamp", s.timestamp);
    ju::read(c, cc, "p1", s.p1);
    ju::read(c, cc, "p2", s.p2);
    ju::read(c, cc, "t1", s.t1);
    ju::read(c, cc, "u", s.u);
    ju::read(c, cc, "eta_g", s.eta_g);
    ju::read(c, cc, "eta_o", s.eta_o);
    ju::read(c, cc, "q_o", s.q_o);
  }
  ju::read_number(j, ctx, "pressure_factor", s.pressure_factor);
  ju::read_number(j, ctx, "temperature_offset", s.temperature_offset);
  ju::read_number(j, ctx, "choke_factor", s.choke_factor);
  ju::read_number(j, ctx, "rate_factor", s.rate_factor);
  ju::read_number(j, ctx, "max_bad_row_fraction", s.max_bad_row_fraction);
}

json split_json(const data::SplitSpec& s) {
  json j = json::object();
  if (s.test_fraction) j["test_fraction"] = *s.test_fraction;
  if (s.cutoff) j["cutoff"] = data::format_timestamp(*s.cutoff);
  if (s.last_days) j["last_days"] = *s.last_days;
  return j;
}

void read_split(const json& j, data::SplitSpec& s) {
  ju::require_keys(j, "split", {"test_fraction", "cutoff", "last_days"});
  if (j.empty()) return;
  s = {};
  if (j.contains("test_fraction")) {
    double f = 0.0;
    ju::read_number(j, "split", "test_fraction", f);
    s.test_fraction = f;
  }
  if (j.contains("cutoff")) {
    if (!j["cutoff"].is_string()) throw std::invalid_argument("split.cutoff: expected a timestamp string");
    s.cutoff = data::parse_timestamp(j["cutoff"].get<std::string>());
    if (!s.cutoff) throw std::invalid_argument("split.cutoff: unparsable timestamp");
  }
  if (j.contains("last_days")) {
    double d = 0.0;
    ju::read_number(j, "split", "last_days", d);
    s.last_days = d;
  }
}

json sweep_json(const SweepConfig& s) {
  return {{"sigma_eps", s.sigma_eps},
          {"lambda", s.lambda},
          {"reference_c_d", s.reference_c_d},
          {"grid_points", s.grid_points}};
}

void read_sweep(const json& j, SweepConfig& s) {
  ju::require_keys(j, "sweep", {"sigma_eps", "lambda", "reference_c_d", "grid_points"});
  ju::read(j, "sweep", "sigma_eps", s.sigma_eps);
  ju::read(j, "sweep", "lambda", s.lambda);
  ju::read_number(j, "sweep", "reference_c_d", s.reference_c_d);
  ju::read(j, "sweep", "grid_points", s.grid_points);
}

json search_json(const SearchConfig& s) {
  return {{"learning_rate", interval_json(s.space.learning_rate)},
          {"lambda", interval_json(s.space.lambda)},
          {"budget", s.budget},
          {"restarts", s.restarts},
          {"validation_fraction", s.validation_fraction}};
}

void read_search(const json& j, SearchConfig& s) {
  ju::require_keys(j, "search", {"learning_rate", "lambda", "budget", "restarts", "validation_fraction"});
  read_interval(j, "search", "learning_rate", s.space.learning_rate);
  read_interval(j, "search", "lambda", s.space.lambda);
  ju::read(j, "search", "budget", s.budget);
  ju::read(j, "search", "restarts", s.restarts);
  ju::read_number(j, "search", "validation_fraction", s.validation_fraction);
}

}  // namespace

void RunConfig::resolve() {
  synthetic.seed = seed;
  synthetic.consts = model.consts;
  fit.seed = seed;
  try {
    synthetic.validate();
    priors.validate();
    regularization.validate();
    fit.validate();
    search.space.validate();
  } catch (const data::DataError& e) {
    throw ConfigError(e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (!(model.consts.z1 > 0.0) || !(model.consts.rho_o_st > 0.0) || !(model.consts.r_gas > 0.0)) {
    throw ConfigError("model.consts: values must be positive");
  }
  if (!(model.area.a_max > 0.0)) throw ConfigError("model.area.a_max must be positive");
  if (!(model.network.output_scale > 0.0)) throw ConfigError("model.network.output_scale must be positive");
  if (model.network.sizes.size() < 2 || model.network.sizes.front() != 1 || model.network.sizes.back() != 1) {
    throw ConfigError("model.network.sizes must start and end with 1");
  }
  const int split_fields = split.test_fraction.has_value() + split.cutoff.has_value() + split.last_days.has_value();
  if (split_fields != 1) throw ConfigError("split: set exactly one of test_fraction, cutoff, last_days");
  if (split.test_fraction && !(*split.test_fraction > 0.0 && *split.test_fraction < 1.0)) {
    throw ConfigError("split.test_fraction must be in (0, 1)");
  }
  if (split.last_days && !(*split.last_days > 0.0)) throw ConfigError("split.last_days must be positive");
  if (sweep.grid_points < 2) throw ConfigError("sweep.grid_points must be at least 2");
  if (sweep.sigma_eps.empty() && sweep.lambda.empty()) throw ConfigError("sweep: no settings given");
  for (double v : sweep.sigma_eps) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError("sweep.sigma_eps entries must be non-negative");
  }
  for (double v : sweep.lambda) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError("sweep.lambda entries must be non-negative");
  }
  if (!(sweep.reference_c_d > 0.0)) throw ConfigError("sweep.reference_c_d must be positive");
  if (search.budget == 0) throw ConfigError("search.budget must be at least 1");
  if (search.restarts == 0) throw ConfigError("search.restarts must be at least 1");
  if (!(search.validation_fraction > 0.0 && search.validation_fraction < 1.0)) {
    throw ConfigError("search.validation_fraction must be in (0, 1)");
  }
  if (!(schema.max_bad_row_fraction >= 0.0 && schema.max_bad_row_fraction <= 1.0)) {
    throw ConfigError("schema.max_bad_row_fraction must be in [0, 1]");
  }
}

RunConfig parse_run_config(const json& j) {
  RunConfig cfg;
  try {
    ju::require_keys(j, "config",
                     {"seed", "output_dir", "synthetic", "model", "priors", "regularization", "fit", "schema",
                      "filter", "split", "sweep", "search"});
    ju::read(j, "config", "seed", cfg.seed);
    if (j.contains("output_dir")) {
      std::string dir;
      ju::read(j, "config", "output_dir", dir);
      cfg.output_dir = dir;
    }
    if (j.contains("synthetic")) read_synthetic(j["synthetic"], cfg.synthetic);
    if (j.contains("model")) cfg.model = j["model"].get<estimation::ModelSetup>();
    if (j.contains("priors")) cfg.priors = j["priors"].get<estimation::PriorSpec>();
    if (j.contains("regularization")) cfg.regularization = j["regularization"].get<estimation::RegularizationConfig>();
    if (j.contains("fit")) {
      if (j["fit"].is_object() && j["fit"].contains("seed")) {
        throw std::invalid_argument("fit.seed: use the top-level seed");
      }
      cfg.fit = j["fit"].get<estimation::FitConfig>();
    }
    if (j.contains("schema")) read_schema(j["schema"], cfg.schema);
    if (j.contains("filter")) {
      ju::require_keys(j["filter"], "filter", {"drop_reverse_pressure"});
      ju::read(j["filter"], "filter", "drop_reverse_pressure", cfg.filter.drop_reverse_pressure);
    }
    if (j.contains("split")) read_split(j["split"], cfg.split);
    if (j.contains("sweep")) read_sweep(j["sweep"], cfg.sweep);
    if (j.contains("search")) read_search(j["search"], cfg.search);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  } catch (const json::exception& e) {
    throw ConfigError(e.what());
  }
  cfg.resolve();
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("cannot parse config file " + path.string() + ": " + e.what());
  }
  return parse_run_config(j);
}

json to_json(const RunConfig& cfg) {
  json fit = cfg.fit;
  fit.erase("seed");
  return {{"seed", cfg.seed},
          {"output_dir", cfg.output_dir.string()},
          {"synthetic", synthetic_json(cfg.synthetic)},
          {"model", cfg.model},
          {"priors", cfg.priors},
          {"regularization", cfg.regularization},
          {"fit", fit},
          {"schema", schema_json(cfg.schema)},
          {"filter", {{"drop_reverse_pressure", cfg.filter.drop_reverse_pressure}}},
          {"split", split_json(cfg.split)},
          {"sweep", sweep_json(cfg.sweep)},
          {"search", search_json(cfg.search)}};
}

}  // namespace chokefit::cli
