#include "ionlight/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <utility>

#include "ionlight/calibration.hpp"
#include "ionlight/constants.hpp"
#include "ionlight/dynamics.hpp"
#include "ionlight/expansion.hpp"
#include "ionlight/modes.hpp"
#include "ionlight/util.hpp"

namespace ionlight::scenario {
namespace {

constexpr const char* kToolVersion = "1.0.0";

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void fail(const std::string& message) {
  throw ConfigError(message);
}

double to_double(const std::string& value, const std::string& path) {
  const std::string v = trim(value);
  if (v.empty()) fail("value for " + path + " is empty");
  char* end = nullptr;
  const double parsed = std::strtod(v.c_str(), &end);
  if (end != v.c_str() + v.size() || !std::isfinite(parsed))
    fail("cannot parse '" + v + "' for " + path + " as a number");
  return parsed;
}

int to_int(const std::string& value, const std::string& path) {
  const double d = to_double(value, path);
  const double r = std::round(d);
  if (std::abs(d - r) > 1e-9 || std::abs(r) > 1e9)
    fail("value for " + path + " must be an integer");
  return static_cast<int>(r);
}

// One parsed `key = value` line.
struct RawItem {
  std::string value;
  int line = 0;
};
using Section = std::map<std::string, RawItem>;

const std::set<std::string> kSections = {"beam1",      "beam2", "trap",
                                         "addressing", "run",   "fit",
                                         "truncation"};

// Splits the config text into sections of unique keys; structural problems
// (unknown sections, duplicate keys, lines without '=') fail here.
std::map<std::string, Section> tokenize(const std::string& text) {
  std::map<std::string, Section> sections;
  sections[""];  // top level
  std::istringstream in(text);
  std::string line;
  std::string current;  // "" = top level
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto comment = line.find_first_of("#;");
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        fail("line " + std::to_string(line_no) + ": unterminated section header");
      const std::string name = trim(line.substr(1, line.size() - 2));
      if (!kSections.count(name))
        fail("line " + std::to_string(line_no) + ": unknown section [" + name +
             "]");
      if (sections.count(name))
        fail("line " + std::to_string(line_no) + ": duplicate section [" +
             name + "]");
      sections[name];
      current = name;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      fail("line " + std::to_string(line_no) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      fail("line " + std::to_string(line_no) + ": empty key");
    auto& section = sections[current];
    if (section.count(key))
      fail("line " + std::to_string(line_no) + ": duplicate key " +
           (current.empty() ? key : current + "." + key));
    section[key] = {value, line_no};
  }
  return sections;
}

// Pulls typed values out of one section and rejects leftovers by name.
class SectionReader {
 public:
  SectionReader(std::map<std::string, Section>& sections,
                const std::string& name)
      : name_(name) {
    const auto it = sections.find(name);
    if (it != sections.end()) items_ = &it->second;
  }

  bool present() const { return items_ != nullptr; }
  bool has(const std::string& key) const {
    return items_ && items_->count(key);
  }

  // Rejects any key outside the allowed set; called before value extraction
  // so a typo is reported as the typo, not as a missing required key.
  void allow(std::initializer_list<const char*> keys) {
    if (!items_) return;
    const std::set<std::string> ok(keys.begin(), keys.end());
    for (const auto& [key, item] : *items_)
      if (!ok.count(key))
        fail("unknown key " + path(key) + " (line " +
             std::to_string(item.line) + ")");
  }

  const std::string* raw(const std::string& key) {
    if (!items_) return nullptr;
    const auto it = items_->find(key);
    if (it == items_->end()) return nullptr;
    return &it->second.value;
  }
  double number(const std::string& key, double fallback) {
    const auto* v = raw(key);
    return v ? to_double(*v, path(key)) : fallback;
  }
  int integer(const std::string& key, int fallback) {
    const auto* v = raw(key);
    return v ? to_int(*v, path(key)) : fallback;
  }
  std::string text(const std::string& key, std::string fallback) {
    const auto* v = raw(key);
    return v ? *v : fallback;
  }
  double required_number(const std::string& key) {
    const auto* v = raw(key);
    if (!v) fail("missing required key " + path(key));
    return to_double(*v, path(key));
  }
  std::string path(const std::string& key) const {
    return name_.empty() ? key : name_ + "." + key;
  }

 private:
  std::string name_;
  const Section* items_ = nullptr;
};

beam::BeamGeometry read_beam(std::map<std::string, Section>& sections,
                             const std::string& name) {
  SectionReader r(sections, name);
  if (!r.present()) fail("missing section [" + name + "]");
  r.allow({"power_w", "wavelength_m", "waist_x_m", "waist_z_m", "focal_y_x_m",
           "focal_y_z_m", "phase0_rad", "direction"});
  beam::BeamGeometry b;
  b.power = r.number("power_w", b.power);
  b.wavelength = r.required_number("wavelength_m");
  b.waist_x = r.required_number("waist_x_m");
  b.waist_z = r.required_number("waist_z_m");
  b.focal_y_x = r.number("focal_y_x_m", 0.0);
  b.focal_y_z = r.number("focal_y_z_m", 0.0);
  b.phase0 = r.number("phase0_rad", 0.0);
  const int direction = r.integer("direction", 1);
  if (direction != 1 && direction != -1)
    fail(r.path("direction") + " must be 1 or -1");
  b.propagation_sign = direction;
  try {
    b.validate();
  } catch (const std::exception& err) {
    fail("[" + name + "] " + err.what());
  }
  return b;
}

TrapSection read_trap(std::map<std::string, Section>& sections) {
  SectionReader r(sections, "trap");
  if (!r.present()) fail("missing section [trap]");
  r.allow({"ions", "species", "axial_com_hz", "horizontal_hz", "vertical_hz",
           "axial_projection"});
  TrapSection t;
  t.ions = r.integer("ions", 1);
  t.species = r.text("species", t.species);
  t.axial_com = 2.0 * constants::pi * r.required_number("axial_com_hz");
  t.horizontal = 2.0 * constants::pi * r.number("horizontal_hz", 0.0);
  t.vertical = 2.0 * constants::pi * r.number("vertical_hz", 0.0);
  t.axial_projection = r.number("axial_projection", 0.0);
  if (t.ions < 1) fail("trap.ions must be at least 1");
  if (t.species != "yb171")
    fail("unsupported trap.species '" + t.species + "' (expected yb171)");
  if (t.axial_com <= 0.0) fail("trap.axial_com_hz must be positive");
  if (t.axial_projection < 0.0 || t.axial_projection > 1.0)
    fail("trap.axial_projection must lie in [0, 1]");
  if (t.ions > 1 && t.axial_projection == 0.0 &&
      (t.horizontal <= 0.0 || t.vertical <= 0.0))
    fail("trap.horizontal_hz and trap.vertical_hz are required to derive the "
         "chain modes; set trap.axial_projection to skip the derivation");
  return t;
}

AddressingSection read_addressing(std::map<std::string, Section>& sections,
                                  const ScenarioConfig& cfg) {
  SectionReader r(sections, "addressing");
  AddressingSection a;
  if (!r.present()) return a;
  r.allow({"offset_x_m", "offset_z_m", "position_y_m", "ion", "geometry"});
  a.offset_x = r.number("offset_x_m", 0.0);
  a.offset_z = r.number("offset_z_m", 0.0);
  a.position_y = r.number("position_y_m", 0.0);
  a.ion = r.integer("ion", -1);
  a.geometry = r.text("geometry", "");
  if (a.ion != -1 && (a.ion < 0 || a.ion >= cfg.trap.ions))
    fail("addressing.ion must name an ion in [0, " +
         std::to_string(cfg.trap.ions) + ")");
  if (!a.geometry.empty()) {
    const bool same =
        cfg.beam1.propagation_sign == cfg.beam2.propagation_sign;
    if (a.geometry == "co") {
      if (!same)
        fail("addressing.geometry = co contradicts opposite beam directions");
    } else if (a.geometry == "counter") {
      if (same)
        fail("addressing.geometry = counter contradicts equal beam "
             "directions");
    } else {
      fail("addressing.geometry must be 'co' or 'counter'");
    }
  }
  return a;
}

std::vector<double> linear_grid(double lo, double hi, int count) {
  std::vector<double> values(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i)
    values[static_cast<std::size_t>(i)] =
        lo + (hi - lo) * static_cast<double>(i) / (count - 1);
  values.front() = lo;
  values.back() = hi;
  return values;
}

RunSection read_run(std::map<std::string, Section>& sections) {
  SectionReader r(sections, "run");
  RunSection run;
  if (!r.present()) return run;
  r.allow({"nbar0", "ndot_per_s", "delay_min_s", "delay_max_s", "delay_count",
           "nbar_min", "nbar_max", "nbar_count", "nbar_spacing", "sequence",
           "phase_error_model", "phase_error_rad", "tail"});

  if (r.has("nbar0")) {
    const std::string v = *r.raw("nbar0");
    if (v == "doppler") {
      run.nbar0_doppler = true;
    } else {
      run.nbar0_doppler = false;
      run.nbar0 = to_double(v, "run.nbar0");
      if (run.nbar0 < 0.0) fail("run.nbar0 must be non-negative");
    }
  }
  run.ndot = r.number("ndot_per_s", 0.0);
  if (run.ndot < 0.0) fail("run.ndot_per_s must be non-negative");

  const bool has_delay = r.has("delay_min_s") || r.has("delay_max_s") ||
                         r.has("delay_count");
  const bool has_nbar =
      r.has("nbar_min") || r.has("nbar_max") || r.has("nbar_count");
  if (has_delay && has_nbar)
    fail("[run] defines both a delay grid and an nbar grid; configure at "
         "most one");
  const std::string spacing = r.text("nbar_spacing", "log");
  if (spacing != "lin" && spacing != "log")
    fail("run.nbar_spacing must be 'lin' or 'log'");
  if (has_delay) {
    const double lo = r.required_number("delay_min_s");
    const double hi = r.required_number("delay_max_s");
    const int count = static_cast<int>(r.required_number("delay_count"));
    if (count < 2) fail("run.delay_count must be at least 2");
    if (!(hi > lo) || lo < 0.0)
      fail("run delay grid needs 0 <= delay_min_s < delay_max_s");
    run.grid = GridKind::delay;
    run.grid_values = linear_grid(lo, hi, count);
  } else if (has_nbar) {
    const double lo = r.required_number("nbar_min");
    const double hi = r.required_number("nbar_max");
    const int count = static_cast<int>(r.required_number("nbar_count"));
    if (count < 2) fail("run.nbar_count must be at least 2");
    if (!(hi > lo) || lo < 0.0)
      fail("run nbar grid needs 0 <= nbar_min < nbar_max");
    run.grid = GridKind::nbar;
    if (spacing == "log") {
      if (lo <= 0.0) fail("run.nbar_min must be positive for log spacing");
      run.grid_values = linear_grid(std::log(lo), std::log(hi), count);
      for (auto& v : run.grid_values) v = std::exp(v);
      run.grid_values.front() = lo;
      run.grid_values.back() = hi;
    } else {
      run.grid_values = linear_grid(lo, hi, count);
    }
  }

  const std::string seq = r.text("sequence", "single");
  if (seq == "single")
    run.sequence = SequenceChoice::single;
  else if (seq == "sk1")
    run.sequence = SequenceChoice::sk1;
  else if (seq == "tycko")
    run.sequence = SequenceChoice::tycko;
  else if (seq == "all")
    run.sequence = SequenceChoice::all;
  else
    fail("run.sequence must be one of single, sk1, tycko, all");

  const std::string pm = r.text("phase_error_model", "none");
  if (pm == "none")
    run.phase_error_model = PhaseErrorModel::none;
  else if (pm == "per_gate")
    run.phase_error_model = PhaseErrorModel::per_gate;
  else if (pm == "per_pulse")
    run.phase_error_model = PhaseErrorModel::per_pulse;
  else
    fail("run.phase_error_model must be one of none, per_gate, per_pulse");
  run.phase_error = r.number("phase_error_rad", 0.0);

  run.tail = r.number("tail", run.tail);
  if (!(run.tail > 0.0) || run.tail >= 1.0)
    fail("run.tail must lie in (0, 1)");
  return run;
}

FitSection read_fit(std::map<std::string, Section>& sections) {
  SectionReader r(sections, "fit");
  FitSection f;
  if (!r.present()) return f;
  r.allow({"static_data", "optimized_data", "rate_data", "sigma",
           "ndot_scale", "max_iterations", "simplex_tol"});
  f.static_data = r.text("static_data", "");
  f.optimized_data = r.text("optimized_data", "");
  f.rate_data = r.text("rate_data", "");
  f.sigma = r.number("sigma", f.sigma);
  f.ndot_scale = r.number("ndot_scale", f.ndot_scale);
  f.max_iterations = r.integer("max_iterations", f.max_iterations);
  f.simplex_tol = r.number("simplex_tol", f.simplex_tol);
  if (!(f.sigma > 0.0)) fail("fit.sigma must be positive");
  if (!(f.ndot_scale > 0.0)) fail("fit.ndot_scale must be positive");
  if (f.max_iterations < 1) fail("fit.max_iterations must be positive");
  if (!(f.simplex_tol > 0.0)) fail("fit.simplex_tol must be positive");
  return f;
}

TruncationSection read_truncation(std::map<std::string, Section>& sections) {
  SectionReader r(sections, "truncation");
  TruncationSection t;
  if (!r.present()) return t;
  r.allow({"threshold", "epsilon", "tail"});
  t.threshold = r.number("threshold", t.threshold);
  t.epsilon = r.number("epsilon", t.epsilon);
  t.tail = r.number("tail", t.tail);
  if (!(t.threshold > 0.0)) fail("truncation.threshold must be positive");
  if (t.epsilon < 0.0 || t.epsilon > 1.0)
    fail("truncation.epsilon must lie in [0, 1]");
  if (!(t.tail > 0.0) || t.tail >= 1.0)
    fail("truncation.tail must lie in (0, 1)");
  return t;
}

int addressed_ion(const ScenarioConfig& cfg) {
  return cfg.addressing.ion >= 0 ? cfg.addressing.ion
                                 : (cfg.trap.ions - 1) / 2;
}

// Inverse combined transverse waist sqrt(1/w1^2 + 1/w2^2) along the chain:
// the product of the two Gaussian envelopes has this effective width.
double combined_inverse_waist(const ScenarioConfig& cfg) {
  const double w1 = cfg.beam1.waist_x;
  const double w2 = cfg.beam2.waist_x;
  return std::sqrt(1.0 / (w1 * w1) + 1.0 / (w2 * w2));
}

std::string metadata_header(const char* tool, const ScenarioConfig& cfg) {
  std::string out;
  out += std::string("# generator=ionlight ") + tool + " " + kToolVersion +
         "\n";
  out += "# config=" + util::hex64(cfg.hash) + "\n";
  return out;
}

// --- CSV ingestion -----------------------------------------------------------

std::filesystem::path resolve(const ScenarioConfig& cfg,
                              const std::string& entry) {
  std::filesystem::path p(entry);
  if (p.is_relative() && !cfg.base_dir.empty())
    p = std::filesystem::path(cfg.base_dir) / p;
  return p;
}

using Columns = std::map<std::string, std::vector<double>>;

Columns read_columns(const std::filesystem::path& path,
                     const std::vector<std::string>& known,
                     const std::vector<std::string>& required) {
  std::ifstream in(path);
  if (!in) fail("cannot open data file " + path.string());
  const std::string where = path.filename().string();

  Columns table;
  std::vector<std::string> order;
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped.front() == '#') continue;
    std::vector<std::string> fields;
    std::istringstream fl(stripped);
    std::string field;
    while (std::getline(fl, field, ',')) fields.push_back(trim(field));
    if (!header_seen) {
      for (const auto& name : fields) {
        if (std::find(known.begin(), known.end(), name) == known.end())
          fail(where + " line " + std::to_string(line_no) +
               ": unknown column '" + name + "'");
        if (table.count(name))
          fail(where + " line " + std::to_string(line_no) +
               ": duplicate column '" + name + "'");
        table[name];
        order.push_back(name);
      }
      header_seen = true;
      continue;
    }
    if (fields.size() != order.size())
      fail(where + " line " + std::to_string(line_no) + ": expected " +
           std::to_string(order.size()) + " fields, found " +
           std::to_string(fields.size()));
    for (std::size_t c = 0; c < fields.size(); ++c) {
      const std::string& v = fields[c];
      char* end = nullptr;
      const double parsed = std::strtod(v.c_str(), &end);
      if (v.empty() || end != v.c_str() + v.size() || !std::isfinite(parsed))
        fail(where + " line " + std::to_string(line_no) +
             ": cannot parse '" + v + "' as a number");
      table[order[c]].push_back(parsed);
    }
  }
  if (!header_seen) fail(where + ": missing header row");
  for (const auto& name : required)
    if (!table.count(name))
      fail(where + " is missing required column '" + name + "'");
  if (table.begin()->second.empty()) fail(where + ": no data rows");
  return table;
}

}  // namespace

ScenarioConfig parse_config(const std::string& text,
                            const std::string& base_dir) {
  auto sections = tokenize(text);

  ScenarioConfig cfg;
  cfg.base_dir = base_dir;
  cfg.hash = util::fnv1a64(text);

  SectionReader top(sections, "");
  top.allow({"version"});
  cfg.version = top.text("version", "");
  if (cfg.version.empty()) fail("missing required top-level key 'version'");
  if (cfg.version != "1")
    fail("unsupported config version '" + cfg.version + "' (expected 1)");

  cfg.beam1 = read_beam(sections, "beam1");
  cfg.beam2 = read_beam(sections, "beam2");
  cfg.trap = read_trap(sections);
  cfg.addressing = read_addressing(sections, cfg);
  cfg.run = read_run(sections);
  cfg.fit = read_fit(sections);
  cfg.truncation = read_truncation(sections);
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  const auto parent = std::filesystem::path(path).parent_path();
  return parse_config(buf.str(), parent.string());
}

GateModel derive_gate_model(const ScenarioConfig& cfg) {
  const double mass = constants::yb171_mass;
  double omega = cfg.trap.axial_com;
  double projection = 1.0;
  if (cfg.trap.axial_projection > 0.0) {
    projection = cfg.trap.axial_projection;
  } else if (cfg.trap.ions > 1) {
    const auto chain = modes::chain_normal_modes(
        cfg.trap.ions, mass, cfg.trap.axial_com, cfg.trap.horizontal,
        cfg.trap.vertical);
    int probe = -1;
    for (int m = 0; m < chain.mode_count(); ++m) {
      if (chain.direction[static_cast<std::size_t>(m)] !=
          modes::ModeDirection::axial)
        continue;
      if (probe < 0 || chain.frequencies[static_cast<std::size_t>(m)] <
                           chain.frequencies[static_cast<std::size_t>(probe)])
        probe = m;
    }
    if (probe < 0) fail("chain normal modes expose no axial mode");
    omega = chain.frequencies[static_cast<std::size_t>(probe)];
    projection =
        std::abs(chain.projection(probe, modes::kAxisX, addressed_ion(cfg)));
  }

  const double inv = combined_inverse_waist(cfg);
  GateModel model;
  model.eta = modes::zero_point_spread(mass, omega) * projection * inv;
  model.xi = cfg.addressing.offset_x * inv;
  model.nbar0 = cfg.run.nbar0_doppler
                    ? modes::doppler_nbar(constants::yb171_linewidth, omega)
                    : cfg.run.nbar0;
  return model;
}

std::string CurveOutput::csv() const {
  std::string out;
  for (const auto& [key, value] : metadata)
    out += "# " + key + "=" + value + "\n";
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (c) out += ',';
    out += columns[c];
  }
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += util::format_double(row[c]);
    }
    out += '\n';
  }
  return out;
}

CurveOutput run_delayed_gate(const ScenarioConfig& cfg, unsigned threads) {
  if (cfg.run.grid == GridKind::none)
    fail("[run] needs a delay or nbar grid for the delayed-gate curve");
  const GateModel model = derive_gate_model(cfg);
  const double tail = cfg.run.tail;

  std::vector<double> nbars = cfg.run.grid_values;
  if (cfg.run.grid == GridKind::delay)
    for (auto& v : nbars) v = model.nbar0 + cfg.run.ndot * v;

  const bool with_sk1 = cfg.run.sequence == SequenceChoice::sk1 ||
                        cfg.run.sequence == SequenceChoice::all;
  const bool with_tycko = cfg.run.sequence == SequenceChoice::tycko ||
                          cfg.run.sequence == SequenceChoice::all;
  const double slew = cfg.run.phase_error_model == PhaseErrorModel::none
                          ? 0.0
                          : cfg.run.phase_error;
  const auto indexing =
      cfg.run.phase_error_model == PhaseErrorModel::per_pulse
          ? dynamics::SlewIndexing::by_pulse
          : dynamics::SlewIndexing::by_gate;
  const auto sk1 = dynamics::sk1_sequence();
  const auto tycko = dynamics::tycko_sequence();

  const auto base =
      calibration::optimize_rabi(model.nbar0, model.eta, model.xi, tail);

  CurveOutput out;
  out.columns = {"nbar", "p_up_static", "p_up_optimized", "rabi_ratio"};
  if (with_sk1) out.columns.push_back("p_up_sk1");
  if (with_tycko) out.columns.push_back("p_up_tycko");
  out.rows.assign(nbars.size(), {});

  util::parallel_for(nbars.size(), threads, [&](std::size_t i) {
    const double nbar = nbars[i];
    const auto opt =
        calibration::optimize_rabi(nbar, model.eta, model.xi, tail);
    auto& row = out.rows[i];
    row.reserve(out.columns.size());
    row.push_back(nbar);
    row.push_back(
        dynamics::p_up(nbar, model.eta, model.xi, base.omega0_t, tail));
    row.push_back(opt.p_up);
    row.push_back(opt.omega0_t / base.omega0_t);
    if (with_sk1)
      row.push_back(dynamics::sequence_p_up(sk1, nbar, model.eta, model.xi,
                                            opt.omega0_t, slew, indexing,
                                            tail));
    if (with_tycko)
      row.push_back(dynamics::sequence_p_up(tycko, nbar, model.eta, model.xi,
                                            opt.omega0_t, slew, indexing,
                                            tail));
  });

  out.metadata = {
      {"generator", std::string("ionlight delayed-gate ") + kToolVersion},
      {"config", util::hex64(cfg.hash)},
      {"eta", util::format_double(model.eta)},
      {"xi", util::format_double(model.xi)},
      {"nbar0", util::format_double(model.nbar0)},
      {"tail", util::format_double(tail)},
  };
  return out;
}

std::string run_truncation_report(const ScenarioConfig& cfg,
                                  double threshold_override) {
  const double threshold = std::isfinite(threshold_override)
                               ? threshold_override
                               : cfg.truncation.threshold;
  if (!(threshold > 0.0)) fail("truncation threshold must be positive");
  if (cfg.trap.horizontal <= 0.0 || cfg.trap.vertical <= 0.0)
    fail("trap.horizontal_hz and trap.vertical_hz are required for the "
         "truncation report");

  const double mass = constants::yb171_mass;
  const std::vector<double> freqs = {cfg.trap.axial_com, cfg.trap.horizontal,
                                     cfg.trap.vertical};
  std::vector<double> zeta(3);
  std::vector<int> cutoff(3);
  for (int p = 0; p < 3; ++p) {
    zeta[static_cast<std::size_t>(p)] =
        modes::zero_point_spread(mass, freqs[static_cast<std::size_t>(p)]);
    cutoff[static_cast<std::size_t>(p)] = expansion::thermal_cutoff(
        modes::doppler_nbar(constants::yb171_linewidth,
                            freqs[static_cast<std::size_t>(p)]),
        cfg.truncation.tail);
  }

  // Mode p moves dominantly along axis p (x, y, z); every off-dominant
  // projection saturates the alignment bound epsilon.
  const double eps = cfg.truncation.epsilon;
  const auto weight = [&](int axis, double scale) {
    std::vector<double> c(3);
    for (int p = 0; p < 3; ++p)
      c[static_cast<std::size_t>(p)] = zeta[static_cast<std::size_t>(p)] *
                                       (p == axis ? 1.0 : eps) * scale;
    return c;
  };

  const auto& b = cfg.beam1;
  const double wx = b.waist(beam::Axis::x);
  const double wz = b.waist(beam::Axis::z);
  const double yRx = b.rayleigh_range(beam::Axis::x);
  const double yRz = b.rayleigh_range(beam::Axis::z);
  const int sign = b.propagation_sign >= 0 ? 1 : -1;

  const double n_gx = expansion::substitution_norm(weight(0, 1.0 / wx), cutoff);
  const double n_gz = expansion::substitution_norm(weight(2, 1.0 / wz), cutoff);
  const double n_lx =
      expansion::substitution_norm(weight(1, 1.0 / yRx), cutoff);
  const double n_lz =
      expansion::substitution_norm(weight(1, 1.0 / yRz), cutoff);
  const double n_b =
      expansion::substitution_norm(weight(1, b.wavevector()), cutoff);

  const double gx0 = std::abs(cfg.addressing.offset_x) / wx;
  const double gz0 = std::abs(cfg.addressing.offset_z) / wz;
  const double lx0 = (cfg.addressing.position_y - b.focal_y(beam::Axis::x)) / yRx;
  const double lz0 = (cfg.addressing.position_y - b.focal_y(beam::Axis::z)) / yRz;

  std::vector<expansion::FunctionSpec> fns;
  const auto add = [&](std::string name,
                       std::vector<expansion::SeriesTerm> terms, double pn,
                       double qn, bool exact = false) {
    expansion::FunctionSpec fs;
    fs.name = std::move(name);
    fs.terms = std::move(terms);
    fs.p_norm = {pn};
    fs.q_norm = {qn};
    fs.exact = exact;
    fns.push_back(std::move(fs));
  };
  add("A1x", expansion::a1_terms(lx0, 4), n_lx, 0.0);
  add("A1z", expansion::a1_terms(lz0, 4), n_lz, 0.0);
  add("A2x", expansion::a2_terms(lx0, gx0, 4, 8), n_lx, n_gx);
  add("A2z", expansion::a2_terms(lz0, gz0, 4, 8), n_lz, n_gz);
  add("B0", expansion::b0_terms(sign, 8), n_b, 0.0, true);
  add("B1x", expansion::b1_terms(sign, lx0, 4), n_lx, 0.0);
  add("B1z", expansion::b1_terms(sign, lz0, 4), n_lz, 0.0);
  add("B2x", expansion::b2_terms(sign, lx0, gx0, 4, 6), n_lx, n_gx);
  add("B2z", expansion::b2_terms(sign, lz0, gz0, 4, 6), n_lz, n_gz);

  expansion::TruncationPolicy policy;
  policy.threshold = threshold;
  policy.scenario_names = {"doppler"};
  const auto rows = expansion::truncation_report(fns, policy);

  std::string out = metadata_header("truncation-report", cfg);
  out += "# threshold=" + util::format_double(threshold) + "\n";
  out += "function,power_p,power_q,coefficient";
  for (const auto& name : policy.scenario_names)
    out += ",contribution_" + name;
  out += ",kept\n";
  for (const auto& row : rows) {
    out += row.function + ',' + std::to_string(row.power_p) + ',' +
           std::to_string(row.power_q) + ',' +
           util::format_double(row.coefficient_magnitude);
    for (const double c : row.contribution)
      out += ',' + util::format_double(c);
    out += row.kept ? ",1\n" : ",0\n";
  }
  return out;
}

FitOutput run_fit(const ScenarioConfig& cfg) {
  if (cfg.fit.static_data.empty() || cfg.fit.optimized_data.empty())
    fail("[fit] static_data and optimized_data are required for the heating "
         "fit");
  const auto st =
      read_columns(resolve(cfg, cfg.fit.static_data),
                   {"delta_t_s", "p_up", "p_up_sigma"}, {"delta_t_s", "p_up"});
  const auto op = read_columns(
      resolve(cfg, cfg.fit.optimized_data),
      {"delta_t_s", "p_up", "p_up_sigma", "omega_t_opt"},
      {"delta_t_s", "p_up", "omega_t_opt"});

  const auto& ts = st.at("delta_t_s");
  const auto& to = op.at("delta_t_s");
  if (ts.size() != to.size())
    fail("static and optimized delay grids disagree: " +
         std::to_string(ts.size()) + " vs " + std::to_string(to.size()) +
         " rows");
  for (std::size_t j = 0; j < ts.size(); ++j) {
    const double scale = std::max({std::abs(ts[j]), std::abs(to[j]), 1e-12});
    if (std::abs(ts[j] - to[j]) > 1e-9 * scale)
      fail("static and optimized delay grids disagree at row " +
           std::to_string(j + 1));
  }

  calibration::HeatingData data;
  data.delay = ts;
  data.p_up_static = st.at("p_up");
  data.p_up_optimized = op.at("p_up");
  const auto& area = op.at("omega_t_opt");
  if (!(area.front() > 0.0))
    fail("omega_t_opt must be positive at the first delay");
  data.rabi_ratio.resize(area.size());
  for (std::size_t j = 0; j < area.size(); ++j)
    data.rabi_ratio[j] = area[j] / area.front();
  if (st.count("p_up_sigma")) data.sigma_static = st.at("p_up_sigma");
  if (op.count("p_up_sigma")) data.sigma_optimized = op.at("p_up_sigma");

  const GateModel model = derive_gate_model(cfg);
  calibration::HeatingFitConfig fit_cfg;
  fit_cfg.nbar0 = model.nbar0;
  fit_cfg.eta = model.eta;
  fit_cfg.xi = model.xi;
  fit_cfg.sigma = cfg.fit.sigma;
  fit_cfg.ndot_scale = cfg.fit.ndot_scale;
  fit_cfg.simplex_tol = cfg.fit.simplex_tol;
  fit_cfg.max_iterations = cfg.fit.max_iterations;
  fit_cfg.tail = cfg.run.tail;

  FitOutput out;
  out.heating = calibration::fit_heating(data, fit_cfg);
  out.base_area = calibration::optimize_rabi(model.nbar0, model.eta, model.xi,
                                             fit_cfg.tail)
                      .omega0_t;
  out.model = model;
  return out;
}

PowerLawOutput run_power_law(const ScenarioConfig& cfg) {
  if (cfg.fit.rate_data.empty())
    fail("[fit] rate_data is required for the power-law fit");
  const auto table =
      read_columns(resolve(cfg, cfg.fit.rate_data),
                   {"omega_rad_s", "ndot_per_s"}, {"omega_rad_s", "ndot_per_s"});
  PowerLawOutput out;
  out.fit = calibration::fit_power_law(table.at("omega_rad_s"),
                                       table.at("ndot_per_s"));
  out.points = table.at("omega_rad_s").size();
  return out;
}

}  // namespace ionlight::scenario
