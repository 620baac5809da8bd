#include <exception>
#include <ostream>

#include "CLI11.hpp"
#include "chokefit/cli/commands.hpp"
#include "chokefit/estimation/result_io.hpp"

namespace chokefit::cli {

namespace fs = std::filesystem;

namespace {

struct Options {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::string mode;
  bool no_reg = false;
  std::vector<std::string> fixes;
  bool no_timestamp = false;
  std::optional<std::size_t> threads;
  std::string data;
  std::string test;
  std::string result;
  std::optional<std::size_t> budget;
};

RunConfig resolve_config(const Options& o) {
  RunConfig cfg = o.config.empty() ? parse_run_config(nlohmann::json::object()) : load_run_config(o.config);
  if (o.seed) cfg.seed = *o.seed;
  if (!o.out.empty()) cfg.output_dir = o.out;
  if (!o.mode.empty()) {
    auto m = estimation::mode_from_name(o.mode);
    if (!m) throw ConfigError("--mode: expected mm or hm");
    cfg.fit.mode = *m;
  }
  if (o.no_reg) cfg.regularization.enabled = false;
  for (const auto& f : o.fixes) {
    const auto eq = f.find('=');
    if (eq == std::string::npos) throw ConfigError("--fix expects name=value, got '" + f + "'");
    auto p = physics::param_from_name(f.substr(0, eq));
    if (!p) throw ConfigError("--fix: unknown parameter '" + f.substr(0, eq) + "'");
    try {
      std::size_t used = 0;
      const double v = std::stod(f.substr(eq + 1), &used);
      if (used != f.size() - eq - 1) throw std::invalid_argument("trailing characters");
      cfg.fit.fixed_params[*p] = v;
    } catch (const std::exception&) {
      throw ConfigError("--fix: bad value in '" + f + "'");
    }
  }
  if (o.threads) cfg.fit.threads = *o.threads;
  if (o.budget) cfg.search.budget = *o.budget;
  cfg.resolve();
  return cfg;
}

std::optional<fs::path> optional_path(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return fs::path(s);
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Mechanistic and hybrid choke-flow model estimation"};
  app.require_subcommand(1);
  Options o;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "JSON run configuration");
    sub->add_option("--out", o.out, "output directory (overrides output_dir)");
    sub->add_option("--seed", o.seed, "top-level seed");
    sub->add_option("--mode", o.mode, "model: mm or hm")->check(CLI::IsMember({"mm", "hm"}));
    sub->add_flag("--no-reg", o.no_reg, "disable regularization");
    sub->add_option("--fix", o.fixes, "hold a physical parameter constant, name=value")->take_all();
    sub->add_flag("--no-timestamp", o.no_timestamp, "write directly into the output directory");
    sub->add_option("--threads", o.threads, "parallel restarts");
  };
  auto* gen = app.add_subcommand("generate", "generate synthetic train/test data");
  add_common(gen);
  auto* fit = app.add_subcommand("fit", "fit a model to a dataset");
  add_common(fit);
  fit->add_option("--data", o.data, "training CSV")->required();
  fit->add_option("--test", o.test, "separate test CSV (default: chronological split)");
  auto* eval = app.add_subcommand("evaluate", "evaluate a stored fit on a dataset");
  add_common(eval);
  eval->add_option("--result", o.result, "result.json of a fit")->required();
  eval->add_option("--data", o.data, "dataset CSV")->required();
  auto* sweep = app.add_subcommand("sweep", "hybrid-model regularization sweep");
  add_common(sweep);
  sweep->add_option("--data", o.data, "training CSV")->required();
  sweep->add_option("--test", o.test, "separate test CSV");
  auto* search = app.add_subcommand("search", "random search over learning rate and lambda");
  add_common(search);
  search->add_option("--data", o.data, "training CSV")->required();
  search->add_option("--budget", o.budget, "number of trials");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    const RunConfig cfg = resolve_config(o);
    auto run_dir = [&](const char* name) { return make_run_dir(cfg.output_dir, name, !o.no_timestamp); };
    if (gen->parsed()) {
      auto dir = run_dir("generate");
      cmd_generate(cfg, dir, out);
    } else if (fit->parsed()) {
      auto dir = run_dir("fit");
      cmd_fit(cfg, o.data, optional_path(o.test), dir, out);
    } else if (eval->parsed()) {
      auto dir = run_dir("evaluate");
      cmd_evaluate(cfg, o.result, o.data, dir, out);
    } else if (sweep->parsed()) {
      auto dir = run_dir("sweep");
      cmd_sweep(cfg, o.data, optional_path(o.test), dir, out);
    } else if (search->parsed()) {
      auto dir = run_dir("search");
      cmd_search(cfg, o.data, dir, out);
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const data::DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const estimation::ResultFormatError& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const estimation::TrainingError& e) {
    err << "training failed: " << e.what() << '\n';
    return kExitTraining;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInternal;
  }
}

}  // namespace chokefit::cli
