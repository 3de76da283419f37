#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <string>

#include "saw/dgp_sim.hpp"
#include "saw/errors.hpp"
#include "saw/panel_data.hpp"
#include "saw/pipeline.hpp"
#include "saw/report.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kEstimationFailure = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

saw::InstrumentMode instrument_mode(const std::string& s) {
  if (s == "self") return saw::InstrumentMode::self;
  if (s == "two-stage" || s == "two_stage") return saw::InstrumentMode::two_stage;
  throw UsageError("unknown instrument mode '" + s + "'");
}

saw::TimeEffects time_effects(const std::string& s) {
  if (s == "unit") return saw::TimeEffects::unit_regressor;
  if (s == "between") return saw::TimeEffects::between;
  throw UsageError("unknown time-effects mode '" + s + "'");
}

struct FitArgs {
  std::string input;
  std::string schema;
  std::string instruments;
  std::string time_effects;
  int variance_case = 4;
  std::optional<double> lambda;
  bool common_jumps = false;
  bool small_n = false;
  std::string out = "saw_out";
  bool plot = false;
};

struct SimArgs {
  int dgp = 1;
  int n = 120;
  int T = 33;
  int reps = 100;
  std::uint64_t seed = 1;
  int jumps = -1;
  unsigned threads = 0;
  std::string instruments = "auto";
  std::string time_effects = "unit";
  std::string noise_param = "variance";
  int variance_case = 4;
  std::optional<double> lambda;
  bool common_jumps = false;
  std::string out = ".";
  std::string export_panel;
};

int cmd_fit(const FitArgs& a) {
  saw::ColumnSchema schema;
  saw::PipelineOptions opts;
  std::string inst_mode = "self";
  std::string te_mode = "unit";
  if (!a.schema.empty()) {
    std::ifstream in(a.schema);
    if (!in) throw UsageError("cannot open schema " + a.schema);
    nlohmann::json cfg;
    try {
      cfg = nlohmann::json::parse(in);
      schema.unit = cfg.value("unit", schema.unit);
      schema.time = cfg.value("time", schema.time);
      schema.outcome = cfg.value("outcome", schema.outcome);
      schema.regressors = cfg.value("regressors", schema.regressors);
      schema.instruments = cfg.value("instruments", schema.instruments);
      inst_mode = cfg.value("instrument_mode", inst_mode);
      te_mode = cfg.value("time_effects", te_mode);
      opts.endogenous = cfg.value("endogenous", opts.endogenous);
    } catch (const nlohmann::json::exception& e) {
      throw UsageError("malformed schema: " + std::string(e.what()));
    }
  }
  if (!a.instruments.empty()) inst_mode = a.instruments;
  if (!a.time_effects.empty()) te_mode = a.time_effects;
  opts.instruments = instrument_mode(inst_mode);
  opts.time_effects = time_effects(te_mode);
  opts.variance_case = a.variance_case;
  opts.common_jumps = a.common_jumps;
  opts.saw.lambda = a.lambda;
  opts.saw.threshold.small_n = a.small_n;

  const saw::PanelDataset panel = saw::load_panel_file(a.input, schema);
  const saw::PipelineResult result = saw::run_pipeline(panel, opts);
  saw::report::write_fit_artifacts(a.out, result, a.plot);

  for (int p = 0; p < result.jumps.P(); ++p) {
    std::cout << panel.regressor_names[p] << ": " << result.jumps.regressors[p].count() << " jump(s)";
    for (int tau : result.jumps.regressors[p].tau) std::cout << ' ' << panel.time_labels[tau - 1];
    std::cout << '\n';
  }
  std::cout << "artifacts written to " << a.out << '\n';
  return kOk;
}

int cmd_simulate(const SimArgs& a) {
  saw::DgpSpec spec;
  spec.dgp = a.dgp;
  spec.n = a.n;
  spec.T = a.T;
  spec.seed = a.seed;
  spec.jumps = a.jumps;
  if (a.noise_param == "variance") spec.noise_param = saw::NoiseParam::variance;
  else if (a.noise_param == "sd") spec.noise_param = saw::NoiseParam::sd;
  else throw UsageError("unknown noise parameterisation '" + a.noise_param + "'");

  saw::MonteCarloOptions mc;
  mc.threads = a.threads;
  if (a.instruments == "auto") {
    mc.pipeline.instruments = a.dgp == 2 ? saw::InstrumentMode::two_stage : saw::InstrumentMode::self;
  } else {
    mc.pipeline.instruments = instrument_mode(a.instruments);
  }
  mc.pipeline.time_effects = time_effects(a.time_effects);
  mc.pipeline.variance_case = a.variance_case;
  mc.pipeline.common_jumps = a.common_jumps;
  mc.pipeline.saw.lambda = a.lambda;

  try {
    if (!a.export_panel.empty()) {
      std::ofstream out(a.export_panel);
      if (!out) throw saw::Error(saw::ErrorCode::IoError, "cannot write " + a.export_panel);
      saw::write_panel_csv(out, saw::generate(spec).panel);
    }
    const saw::McResult result = saw::run_monte_carlo(spec, a.reps, mc);
    std::filesystem::create_directories(a.out);
    std::ofstream table(std::filesystem::path(a.out) / "mc_table.csv");
    std::ofstream summary(std::filesystem::path(a.out) / "summary.txt");
    if (!table || !summary) throw saw::Error(saw::ErrorCode::IoError, "cannot write to " + a.out);
    saw::report::write_mc_table(table, result);
    saw::report::write_mc_summary(summary, result);
    saw::report::write_mc_summary(std::cout, result);
  } catch (const saw::Error& e) {
    if (e.code() == saw::ErrorCode::InvalidArgument) throw UsageError(e.what());
    throw;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structural-break estimation for panel data with wavelet-based jump detection"};
  app.require_subcommand(1);

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "Estimate jump locations and segment coefficients");
  fit_cmd->add_option("--input", fit.input, "long-format CSV (unit,time,y,x1..xP[,z1..zQ])")->required();
  fit_cmd->add_option("--schema", fit.schema, "JSON file with column roles and modes");
  fit_cmd->add_option("--instruments", fit.instruments, "self | two-stage");
  fit_cmd->add_option("--time-effects", fit.time_effects, "unit | between");
  fit_cmd->add_option("--variance-case", fit.variance_case, "post-SAW covariance case")->check(CLI::Range(1, 4));
  fit_cmd->add_option("--lambda", fit.lambda, "threshold override")->check(CLI::NonNegativeNumber);
  fit_cmd->add_flag("--common-jumps", fit.common_jumps, "refit every regressor on the union of jumps");
  fit_cmd->add_flag("--small-n", fit.small_n, "threshold correction for a small cross-section");
  fit_cmd->add_option("--out", fit.out, "output directory");
  fit_cmd->add_flag("--plot", fit.plot, "write one SVG per regressor");

  SimArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo run of a built-in design");
  sim_cmd->add_option("--dgp", sim.dgp, "design 1..6");
  sim_cmd->add_option("--n", sim.n, "number of units");
  sim_cmd->add_option("--T", sim.T, "number of periods");
  sim_cmd->add_option("--reps", sim.reps, "replications");
  sim_cmd->add_option("--seed", sim.seed, "master seed");
  sim_cmd->add_option("--jumps", sim.jumps, "jump count for designs 2-5");
  sim_cmd->add_option("--threads", sim.threads, "worker threads (0 = all cores)");
  sim_cmd->add_option("--instruments", sim.instruments, "auto | self | two-stage");
  sim_cmd->add_option("--time-effects", sim.time_effects, "unit | between");
  sim_cmd->add_option("--noise-param", sim.noise_param, "read N(0,v) as variance | sd");
  sim_cmd->add_option("--variance-case", sim.variance_case, "post-SAW covariance case")->check(CLI::Range(1, 4));
  sim_cmd->add_option("--lambda", sim.lambda, "threshold override")->check(CLI::NonNegativeNumber);
  sim_cmd->add_flag("--common-jumps", sim.common_jumps, "refit on the union of jumps");
  sim_cmd->add_option("--out", sim.out, "output directory for mc_table.csv and summary.txt");
  sim_cmd->add_option("--export-panel", sim.export_panel, "also write the master-seed panel as CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: Usage: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (*fit_cmd) return cmd_fit(fit);
    return cmd_simulate(sim);
  } catch (const UsageError& e) {
    std::cerr << "error: Usage: " << e.what() << '\n';
    return kUsage;
  } catch (const saw::Error& e) {
    std::cerr << "error: " << saw::to_string(e.code()) << ": " << e.what() << '\n';
    return kEstimationFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: Internal: " << e.what() << '\n';
    return kEstimationFailure;
  }
}
