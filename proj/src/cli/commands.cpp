#include "chokefit/cli/commands.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "chokefit/estimation/result_io.hpp"

namespace chokefit::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Shared by console tables and summary exports so both show the same digits.
std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string full(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void write_json(const fs::path& path, const json& j) { open_out(path) << j.dump(2) << '\n'; }

void write_resolved_config(const RunConfig& cfg, const fs::path& run_dir) {
  write_json(run_dir / "resolved_config.json", to_json(cfg));
}

json report_json(const data::FilterReport& r) {
  return {{"input_rows", r.input_rows}, {"kept_rows", r.kept_rows}, {"removed", r.removed}};
}

void write_summary_csv(const estimation::FitResult& result, const fs::path& path) {
  auto out = open_out(path);
  out << "statistic,min,median,max\n";
  for (const auto& s : result.summary.stats) {
    out << s.name << ',' << fmt(s.min) << ',' << fmt(s.median) << ',' << fmt(s.max) << '\n';
  }
}

void write_loss_trace(const estimation::FitResult& result, const fs::path& path) {
  auto out = open_out(path);
  out << "restart,epoch,loss\n";
  for (const auto& r : result.restarts) {
    for (std::size_t e = 0; e < r.loss_trace.size(); ++e) out << r.index << ',' << e << ',' << full(r.loss_trace[e]) << '\n';
  }
}

void write_restarts_csv(const estimation::FitResult& result, const fs::path& path) {
  const auto params = estimation::model_parameters(result.config.mode);
  auto out = open_out(path);
  out << "restart,status,test_mae,test_mape,mape_excluded,rejected_steps";
  for (auto p : params) out << ',' << physics::param_name(p);
  out << '\n';
  for (const auto& r : result.restarts) {
    out << r.index << ',' << estimation::status_name(r.status) << ',' << full(r.test.mae) << ',' << full(r.test.mape)
        << ',' << r.test.mape_excluded << ',' << r.rejected_steps;
    for (auto p : params) out << ',' << full(r.final_params.physical.get(p));
    out << '\n';
  }
}

// Per-restart area curves of a fit; the MM curve includes C_D so that both
// modes show the effective flow area.
void write_area_curves(const estimation::FitResult& result, std::size_t points, const fs::path& path) {
  const auto grid = unit_grid(points);
  auto out = open_out(path);
  out << "restart,u,area\n";
  for (const auto& r : result.restarts) {
    if (r.status != estimation::RestartStatus::ok) continue;
    for (double u : grid) {
      const double a = estimation::model_area(u, r.final_params, result.setup) * r.final_params.physical.effective_c_d();
      out << r.index << ',' << full(u) << ',' << full(a) << '\n';
    }
  }
}

std::string stamp_now() {
  const auto now = std::chrono::time_point_cast<std::chrono::seconds>(std::chrono::system_clock::now());
  std::string s = data::format_timestamp(now.time_since_epoch().count());
  std::string out;
  for (char c : s) {
    if (c != '-' && c != ':') out += c;
  }
  return out;
}

}  // namespace

fs::path make_run_dir(const fs::path& output_dir, const std::string& command, bool timestamped) {
  fs::path dir = output_dir;
  if (timestamped) {
    const std::string base = command + "-" + stamp_now();
    dir = output_dir / base;
    for (int n = 1; fs::exists(dir); ++n) dir = output_dir / (base + "-" + std::to_string(n));
  }
  fs::create_directories(dir);
  return dir;
}

GenerateOutcome cmd_generate(const RunConfig& cfg, const fs::path& run_dir, std::ostream& log) {
  GenerateOutcome out;
  std::tie(out.train, out.test) = data::generate_synthetic_split(cfg.synthetic);
  fs::create_directories(run_dir);
  out.train_path = run_dir / "train.csv";
  out.test_path = run_dir / "test.csv";
  data::write_csv(out.train, out.train_path);
  data::write_csv(out.test, out.test_path);
  write_resolved_config(cfg, run_dir);

  const auto& truth = cfg.synthetic.true_params;
  json summary{{"train_rows", out.train.size()},
               {"test_rows", out.test.size()},
               {"seed", cfg.seed},
               {"noise_sigma", cfg.synthetic.noise_sigma},
               {"generator_truth",
                {{"params", truth},
                 {"area",
                  {{"a_max", cfg.synthetic.area.a_max}, {"shape", physics::area_shape_name(cfg.synthetic.area.shape)}}}}}};
  write_json(run_dir / "summary.json", summary);

  log << "wrote " << out.train.size() << " training rows to " << out.train_path.string() << '\n'
      << "wrote " << out.test.size() << " test rows to " << out.test_path.string() << '\n'
      << "generator truth:";
  for (auto p : physics::kAllParams) log << ' ' << physics::param_name(p) << '=' << fmt(truth.get(p));
  log << "\narea: " << physics::area_shape_name(cfg.synthetic.area.shape) << ", a_max=" << fmt(cfg.synthetic.area.a_max)
      << '\n';
  return out;
}

PreparedData prepare_data(const RunConfig& cfg, const fs::path& data_path, const std::optional<fs::path>& test_path) {
  PreparedData out;
  auto loaded = data::load_csv(data_path, cfg.schema);
  out.row_issues = loaded.issues.size();
  data::Dataset all;
  std::tie(all, out.train_report) = data::filter_outliers(loaded.dataset, cfg.filter);
  if (test_path) {
    auto tl = data::load_csv(*test_path, cfg.schema);
    out.row_issues += tl.issues.size();
    data::FilterReport tr;
    std::tie(out.test, tr) = data::filter_outliers(tl.dataset, cfg.filter);
    out.test_report = tr;
    out.train = std::move(all);
  } else {
    std::tie(out.train, out.test) = data::chronological_split(all, cfg.split);
  }
  return out;
}

std::string summary_table(const estimation::FitResult& result) {
  std::ostringstream os;
  char line[160];
  std::snprintf(line, sizeof line, "%-12s %16s %16s %16s\n", "", "min", "median", "max");
  os << line;
  for (const auto& s : result.summary.stats) {
    std::string label = s.name;
    if (auto p = physics::param_from_name(s.name); p && result.config.is_fixed(*p)) label += " (fixed)";
    std::snprintf(line, sizeof line, "%-12s %16s %16s %16s\n", label.c_str(), fmt(s.min).c_str(),
                  fmt(s.median).c_str(), fmt(s.max).c_str());
    os << line;
  }
  os << "successful restarts: " << result.summary.successful_restarts << " of " << result.restarts.size() << '\n';
  return os.str();
}

namespace {

void write_fit_outputs(const estimation::FitResult& result, const fs::path& dir, std::size_t grid_points) {
  estimation::save_result(result, dir / "result.json");
  write_summary_csv(result, dir / "summary.csv");
  write_loss_trace(result, dir / "loss_trace.csv");
  write_restarts_csv(result, dir / "restarts.csv");
  write_area_curves(result, grid_points, dir / "area_curves.csv");
}

}  // namespace

FitOutcome cmd_fit(const RunConfig& cfg, const fs::path& data_path, const std::optional<fs::path>& test_path,
                   const fs::path& run_dir, std::ostream& log) {
  const PreparedData prepared = prepare_data(cfg, data_path, test_path);
  write_resolved_config(cfg, run_dir);
  json reports{{"train", report_json(prepared.train_report)}, {"row_issues", prepared.row_issues}};
  if (prepared.test_report) reports["test"] = report_json(*prepared.test_report);
  write_json(run_dir / "filter_report.json", reports);
  data::write_csv(prepared.test, run_dir / "test.csv");

  log << "fitting " << estimation::mode_name(cfg.fit.mode) << " on " << prepared.train.size() << " rows ("
      << prepared.test.size() << " test rows), " << cfg.fit.restarts << " restarts, regularization "
      << (cfg.regularization.enabled ? "on" : "off") << '\n';
  FitOutcome out;
  out.result = estimation::train(prepared.train, prepared.test, cfg.model, cfg.priors, cfg.regularization, cfg.fit);
  out.result_path = run_dir / "result.json";
  write_fit_outputs(out.result, run_dir, cfg.sweep.grid_points);
  out.table = summary_table(out.result);
  log << out.table;
  return out;
}

EvaluateOutcome cmd_evaluate(const RunConfig& cfg, const fs::path& result_path, const fs::path& data_path,
                             const fs::path& run_dir, std::ostream& log) {
  const estimation::FitResult result = estimation::load_result(result_path);
  auto loaded = data::load_csv(data_path, cfg.schema);
  const auto [ds, report] = data::filter_outliers(loaded.dataset, cfg.filter);
  write_resolved_config(cfg, run_dir);

  EvaluateOutcome out;
  std::vector<double> maes, mapes;
  for (const auto& r : result.restarts) {
    if (r.status != estimation::RestartStatus::ok) continue;
    EvaluateRow row{r.index, estimation::evaluate(ds, r.final_params, result.setup), r.test};
    maes.push_back(row.metrics.mae);
    mapes.push_back(row.metrics.mape);
    out.rows.push_back(row);
  }
  if (out.rows.empty()) throw estimation::TrainingError("fit result has no successful restarts");
  out.median_mae = estimation::median(maes);
  out.median_mape = estimation::median(mapes);

  auto csv = open_out(run_dir / "evaluation.csv");
  csv << "restart,mae,mape,mape_excluded,stored_test_mae,stored_test_mape\n";
  for (const auto& r : out.rows) {
    csv << r.restart << ',' << full(r.metrics.mae) << ',' << full(r.metrics.mape) << ',' << r.metrics.mape_excluded
        << ',' << full(r.stored.mae) << ',' << full(r.stored.mape) << '\n';
  }
  write_json(run_dir / "evaluation.json", {{"rows", ds.size()},
                                           {"filter", report_json(report)},
                                           {"median_mae", out.median_mae},
                                           {"median_mape", out.median_mape}});
  log << "evaluated " << out.rows.size() << " restarts on " << ds.size() << " rows\n"
      << "median MAE " << fmt(out.median_mae) << ", median MAPE " << fmt(out.median_mape) << " %\n";
  return out;
}

std::vector<double> unit_grid(std::size_t points) {
  if (points < 2) throw std::invalid_argument("grid needs at least two points");
  std::vector<double> g(points);
  for (std::size_t k = 0; k < points; ++k) g[k] = static_cast<double>(k) / static_cast<double>(points - 1);
  g.back() = 1.0;
  return g;
}

SweepOutcome cmd_sweep(const RunConfig& cfg, const fs::path& data_path, const std::optional<fs::path>& test_path,
                       const fs::path& run_dir, std::ostream& log) {
  const PreparedData prepared = prepare_data(cfg, data_path, test_path);
  write_resolved_config(cfg, run_dir);

  std::vector<estimation::RegularizationConfig> regs;
  if (!cfg.sweep.sigma_eps.empty()) {
    for (double s : cfg.sweep.sigma_eps) {
      auto r = cfg.regularization;
      r.enabled = s > 0.0;
      if (s > 0.0) r.sigma_eps = s;
      regs.push_back(r);
    }
  } else {
    for (double l : cfg.sweep.lambda) {
      auto r = cfg.regularization;
      r.lambda = l;
      regs.push_back(r);
    }
  }
  estimation::FitConfig fit = cfg.fit;
  fit.mode = estimation::ModelMode::hm;
  fit.fixed_params.erase(physics::Param::c_d);

  const auto grid = unit_grid(cfg.sweep.grid_points);
  SweepOutcome out;
  for (std::size_t k = 0; k < regs.size(); ++k) {
    SweepSetting st;
    st.sigma_eps = regs[k].sigma_eps;
    st.lambda = regs[k].lambda;
    st.regularized = regs[k].enabled;
    log << "setting " << k << ": sigma_eps=" << (st.regularized ? fmt(st.sigma_eps) : std::string("off"))
        << " lambda=" << fmt(st.lambda) << '\n';
    st.result = estimation::train(prepared.train, prepared.test, cfg.model, cfg.priors, regs[k], fit);
    const fs::path dir = run_dir / ("setting_" + std::to_string(k));
    fs::create_directories(dir);
    write_fit_outputs(st.result, dir, cfg.sweep.grid_points);

    st.u = grid;
    for (double u : grid) {
      std::vector<double> at_u;
      for (const auto& r : st.result.restarts) {
        if (r.status == estimation::RestartStatus::ok) at_u.push_back(nnet::forward(u, *r.final_params.network));
      }
      const double learned = estimation::median(at_u);
      const double reference = cfg.sweep.reference_c_d * physics::mechanistic_area(u, cfg.model.area);
      st.learned.push_back(learned);
      st.reference.push_back(reference);
      st.max_deviation = std::max(st.max_deviation, std::abs(learned - reference));
    }
    log << "  median test MAPE " << fmt(st.result.summary.at("mape").median) << " %, max area deviation "
        << fmt(st.max_deviation) << " m2\n";
    out.settings.push_back(std::move(st));
  }

  auto curves = open_out(run_dir / "area_curves.csv");
  curves << "setting,sigma_eps,lambda,regularized,u,area_learned,area_reference\n";
  auto dev = open_out(run_dir / "deviations.csv");
  dev << "setting,sigma_eps,lambda,regularized,max_abs_deviation,median_test_mae,median_test_mape\n";
  for (std::size_t k = 0; k < out.settings.size(); ++k) {
    const auto& st = out.settings[k];
    for (std::size_t i = 0; i < st.u.size(); ++i) {
      curves << k << ',' << full(st.sigma_eps) << ',' << full(st.lambda) << ',' << st.regularized << ','
             << full(st.u[i]) << ',' << full(st.learned[i]) << ',' << full(st.reference[i]) << '\n';
    }
    dev << k << ',' << full(st.sigma_eps) << ',' << full(st.lambda) << ',' << st.regularized << ','
        << full(st.max_deviation) << ',' << full(st.result.summary.at("mae").median) << ','
        << full(st.result.summary.at("mape").median) << '\n';
  }
  return out;
}

estimation::SearchResult cmd_search(const RunConfig& cfg, const fs::path& data_path, const fs::path& run_dir,
                                    std::ostream& log) {
  const PreparedData prepared = prepare_data(cfg, data_path, std::nullopt);
  data::SplitSpec inner{cfg.search.validation_fraction, std::nullopt, std::nullopt};
  const auto [train, validation] = data::chronological_split(prepared.train, inner);
  write_resolved_config(cfg, run_dir);

  estimation::FitConfig base = cfg.fit;
  base.restarts = cfg.search.restarts;
  log << "search: " << cfg.search.budget << " trials, " << train.size() << " training rows, " << validation.size()
      << " validation rows\n";
  auto res = estimation::hyperparameter_search(train, validation, cfg.model, cfg.priors, cfg.regularization, base,
                                               cfg.search.space, cfg.search.budget, cfg.seed);

  auto csv = open_out(run_dir / "trials.csv");
  csv << "trial,learning_rate,lambda,ok,validation_mae,validation_mape,message\n";
  for (const auto& t : res.trials) {
    std::string msg = t.message;
    for (char& c : msg) {
      if (c == ',' || c == '\n') c = ';';
    }
    csv << t.index << ',' << full(t.learning_rate) << ',' << full(t.lambda) << ',' << t.ok << ','
        << full(t.validation_mae) << ',' << full(t.validation_mape) << ',' << msg << '\n';
  }
  const auto& best = res.incumbent();
  write_json(run_dir / "best.json", {{"trial", best.index},
                                     {"learning_rate", best.learning_rate},
                                     {"lambda", best.lambda},
                                     {"validation_mae", best.validation_mae},
                                     {"validation_mape", best.validation_mape}});
  log << "best trial " << best.index << ": learning_rate=" << fmt(best.learning_rate) << " lambda=" << fmt(best.lambda)
      << " validation MAE " << fmt(best.validation_mae) << '\n';
  return res;
}

}  // namespace chokefit::cli
