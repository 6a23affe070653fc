// ionlight command-line front end: scenario configs in, CSV/JSON out.
//
// Exit codes: 0 success, 2 configuration or input error, 3 numerical
// non-convergence.
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "ionlight/calibration.hpp"
#include "ionlight/dynamics.hpp"
#include "ionlight/scenario.hpp"
#include "ionlight/util.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct CommonArgs {
  std::string config_path;
  std::string out_path;
  unsigned threads = 1;
  double tolerance = std::numeric_limits<double>::quiet_NaN();
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "Scenario config file")
      ->required();
  cmd->add_option("--out", args.out_path, "Output file (default: stdout)");
  cmd->add_option("--threads", args.threads, "Worker thread count")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--tolerance", args.tolerance,
                  "Per-subcommand tolerance override (see --help of the "
                  "subcommand)");
}

void emit(const std::string& out_path, const std::string& payload) {
  if (out_path.empty()) {
    std::cout << payload;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out)
    throw ionlight::scenario::ConfigError("cannot open output file " +
                                          out_path);
  out << payload;
  if (!out)
    throw std::runtime_error("failed writing output file " + out_path);
}

int run_delayed_gate(const CommonArgs& args) {
  auto cfg = ionlight::scenario::load_config(args.config_path);
  if (!std::isnan(args.tolerance)) {
    if (!(args.tolerance > 0.0) || args.tolerance >= 1.0)
      throw ionlight::scenario::ConfigError(
          "--tolerance (thermal truncation tail) must lie in (0, 1)");
    cfg.run.tail = args.tolerance;
  }
  const auto curve = ionlight::scenario::run_delayed_gate(cfg, args.threads);
  emit(args.out_path, curve.csv());
  return 0;
}

int run_truncation_report(const CommonArgs& args) {
  const auto cfg = ionlight::scenario::load_config(args.config_path);
  emit(args.out_path,
       ionlight::scenario::run_truncation_report(cfg, args.tolerance));
  return 0;
}

int run_fit(const CommonArgs& args) {
  auto cfg = ionlight::scenario::load_config(args.config_path);
  if (!std::isnan(args.tolerance)) {
    if (!(args.tolerance > 0.0))
      throw ionlight::scenario::ConfigError(
          "--tolerance (simplex convergence size) must be positive");
    cfg.fit.simplex_tol = args.tolerance;
  }
  const auto out = ionlight::scenario::run_fit(cfg);

  nlohmann::json j;
  j["generator"] = "ionlight fit 1.0.0";
  j["config"] = ionlight::util::hex64(cfg.hash);
  j["ndot_per_s"] = out.heating.ndot;
  j["p_up_offset"] = out.heating.p_up_offset;
  j["chi2"] = out.heating.chi2;
  j["residual_norm"] = std::sqrt(out.heating.chi2);
  j["iterations"] = out.heating.iterations;
  j["converged"] = out.heating.converged;
  j["curvature"] = {
      {out.heating.curvature[0][0], out.heating.curvature[0][1]},
      {out.heating.curvature[1][0], out.heating.curvature[1][1]}};
  j["base_area"] = out.base_area;
  j["eta"] = out.model.eta;
  j["xi"] = out.model.xi;
  j["nbar0"] = out.model.nbar0;
  j["simplex_tol"] = cfg.fit.simplex_tol;
  emit(args.out_path, j.dump(2) + "\n");
  return out.heating.converged ? 0 : kExitNumerical;
}

int run_power_law(const CommonArgs& args) {
  const auto cfg = ionlight::scenario::load_config(args.config_path);
  const auto out = ionlight::scenario::run_power_law(cfg);

  nlohmann::json j;
  j["generator"] = "ionlight power-law 1.0.0";
  j["config"] = ionlight::util::hex64(cfg.hash);
  j["amplitude"] = out.fit.amplitude;
  j["exponent"] = out.fit.exponent;
  j["residual_norm"] = out.fit.residual_norm;
  j["points"] = out.points;
  emit(args.out_path, j.dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "ionlight: addressed-beam gate curves, operator truncation reports, "
      "and heating-rate fits for trapped-ion chains"};
  app.set_version_flag("--version", "ionlight 1.0.0");
  app.require_subcommand(1);

  CommonArgs dg_args, tr_args, fit_args, pl_args;
  auto* dg = app.add_subcommand(
      "delayed-gate",
      "Bright-state probability curves for static, recalibrated, and "
      "composite-pulse gates over a heating ramp (CSV). --tolerance "
      "overrides the thermal truncation tail.");
  add_common(dg, dg_args);
  auto* tr = app.add_subcommand(
      "truncation-report",
      "Keep/drop table for the operator-series factors of the configured "
      "beam and trap (CSV). --tolerance overrides the keep threshold.");
  add_common(tr, tr_args);
  auto* fit = app.add_subcommand(
      "fit",
      "Joint heating-rate fit to measured gate curves (JSON). --tolerance "
      "overrides the simplex convergence size.");
  add_common(fit, fit_args);
  auto* pl = app.add_subcommand(
      "power-law",
      "Power-law fit of heating rate versus trap frequency (JSON). "
      "--tolerance is accepted for interface uniformity and unused.");
  add_common(pl, pl_args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (dg->parsed()) return run_delayed_gate(dg_args);
    if (tr->parsed()) return run_truncation_report(tr_args);
    if (fit->parsed()) return run_fit(fit_args);
    if (pl->parsed()) return run_power_law(pl_args);
  } catch (const ionlight::scenario::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ionlight::dynamics::ConvergenceError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
