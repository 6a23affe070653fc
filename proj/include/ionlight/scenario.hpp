#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ionlight/beam.hpp"
#include "ionlight/calibration.hpp"

// Scenario ingestion and end-to-end runs: a strict key-value config format,
// the delayed-gate curve generator, the operator-truncation report, and the
// file-driven fitting entry points used by the command-line tool.
namespace ionlight::scenario {

// Malformed or inconsistent configuration or data-file input; the CLI maps
// this to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SequenceChoice { single, sk1, tycko, all };
enum class PhaseErrorModel { none, per_gate, per_pulse };
enum class GridKind { none, delay, nbar };

struct TrapSection {
  int ions = 1;
  std::string species = "yb171";
  double axial_com = 0.0;    // rad/s
  double horizontal = 0.0;   // rad/s
  double vertical = 0.0;     // rad/s
  // Mode amplitude at the addressed ion; 0 means derive it from the chain
  // normal modes.
  double axial_projection = 0.0;
};

struct AddressingSection {
  double offset_x = 0.0;     // m, transverse offset along the chain axis
  double offset_z = 0.0;     // m, transverse offset along the loose axis
  double position_y = 0.0;   // m, ion position along the propagation axis
  int ion = -1;              // addressed ion index; -1 means chain center
  // "co" or "counter"; when present it must agree with the beam directions.
  std::string geometry;
};

struct RunSection {
  bool nbar0_doppler = true;
  double nbar0 = 0.0;            // used when nbar0_doppler is false
  double ndot = 0.0;             // quanta/s; needed with a delay grid
  GridKind grid = GridKind::none;
  std::vector<double> grid_values;  // delays (s) or occupations
  SequenceChoice sequence = SequenceChoice::single;
  PhaseErrorModel phase_error_model = PhaseErrorModel::none;
  double phase_error = 0.0;      // rad per gate
  double tail = 1e-6;            // thermal truncation for the gate model
};

struct FitSection {
  std::string static_data;     // CSV: delta_t_s, p_up[, p_up_sigma]
  std::string optimized_data;  // CSV: delta_t_s, p_up[, p_up_sigma], omega_t_opt
  std::string rate_data;       // CSV: omega_rad_s, ndot_per_s
  double sigma = 0.01;
  double ndot_scale = 1e5;
  int max_iterations = 10000;
  double simplex_tol = 1e-6;
};

struct TruncationSection {
  double threshold = 1e-2;  // keep terms contributing at least this fraction
  double epsilon = 0.05;    // off-dominant mode projection saturation
  double tail = 1e-3;       // thermal-cutoff tail for the operator norms
};

struct ScenarioConfig {
  std::string version;
  beam::BeamGeometry beam1;
  beam::BeamGeometry beam2;
  TrapSection trap;
  AddressingSection addressing;
  RunSection run;
  FitSection fit;
  TruncationSection truncation;
  std::string base_dir;    // data paths resolve against this
  std::uint64_t hash = 0;  // FNV-1a of the exact config text
};

// Parses the strict INI-style format: `[section]` headers, `key = value`
// lines, `#`/`;` comments.  Unknown sections or keys, unparsable values, or
// both grid kinds at once raise ConfigError.
ScenarioConfig parse_config(const std::string& text,
                            const std::string& base_dir = "");
ScenarioConfig load_config(const std::string& path);

// Single-mode reduction the delayed-gate model runs on: the probed axial
// mode seen through the combined transverse profile of both beams.
struct GateModel {
  double eta = 0.0;    // Lamb-Dicke factor of the probed mode
  double xi = 0.0;     // addressing offset in combined-waist units
  double nbar0 = 0.0;  // initial occupation
};
GateModel derive_gate_model(const ScenarioConfig& config);

struct CurveOutput {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::pair<std::string, std::string>> metadata;
  // Deterministic serialization: `# key=value` lines, a header row, then
  // one comma-separated row per grid point with shortest round-trip floats.
  std::string csv() const;
};

// Thermal init, heating map, gate or sequence, measurement: one row per
// grid point with columns nbar, p_up_static, p_up_optimized, rabi_ratio and
// optionally p_up_sk1 / p_up_tycko.  Grid points are evaluated over at most
// `threads` workers and assembled by index, so the bytes are identical for
// every thread count.
CurveOutput run_delayed_gate(const ScenarioConfig& config, unsigned threads);

// Keep/drop report for the operator-series factors implied by the
// configured beam and trap, one row per retained-or-dropped term.  A
// non-finite `threshold_override` (e.g. NaN) keeps the configured value.
std::string run_truncation_report(const ScenarioConfig& config,
                                  double threshold_override);

struct FitOutput {
  calibration::HeatingFitResult heating;
  double base_area = 0.0;  // zero-delay optimum used to normalize areas
  GateModel model;
};
// Loads the static and optimized measurement tables named by the config and
// runs the joint heating fit.
FitOutput run_fit(const ScenarioConfig& config);

struct PowerLawOutput {
  calibration::PowerLawFit fit;
  std::size_t points = 0;
};
PowerLawOutput run_power_law(const ScenarioConfig& config);

}  // namespace ionlight::scenario
