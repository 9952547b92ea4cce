#pragma once

// Batch driver behind the bellscope command-line tool. Each command runs one
// module pipeline over a parameter sweep and writes <command>.csv and
// <command>.json into the output directory.

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "bellscope/cat_prep.hpp"
#include "bellscope/erasure.hpp"
#include "bellscope/parallel.hpp"
#include "bellscope/root_binning.hpp"
#include "bellscope/sign_binning.hpp"

namespace bellscope::app {

enum class ExitStatus : int { success = 0, config_error = 2, numerical_failure = 3 };

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Command { sign_ghz, sign_optimize, root_max, cat_vw, psi3_curve, noise_sweep, prep_fidelity };

inline const std::map<std::string, Command>& command_names() {
  static const std::map<std::string, Command> names{
      {"sign-ghz", Command::sign_ghz},       {"sign-optimize", Command::sign_optimize},
      {"root-max", Command::root_max},       {"cat-vw", Command::cat_vw},
      {"psi3-curve", Command::psi3_curve},   {"noise-sweep", Command::noise_sweep},
      {"prep-fidelity", Command::prep_fidelity}};
  return names;
}

inline std::string command_name(Command c) {
  for (const auto& [name, value] : command_names()) {
    if (value == c) return name;
  }
  return "unknown";
}

inline Command parse_command(const std::string& name) {
  auto it = command_names().find(name);
  if (it == command_names().end()) throw ConfigError("unknown command: " + name);
  return it->second;
}

/// Parameters arrive as raw strings keyed by flag name (without dashes) and
/// are validated against the command's schema before anything runs.
struct RunConfig {
  Command command = Command::sign_ghz;
  std::map<std::string, std::string> parameters;
  int jobs = 1;
  std::filesystem::path out_dir = ".";
};

// ---- parameter parsing ------------------------------------------------------

inline double parse_real(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ConfigError("--" + key + ": not a number: \"" + text + "\"");
  }
  if (used != text.size() || !std::isfinite(v)) throw ConfigError("--" + key + ": not a number: \"" + text + "\"");
  return v;
}

inline int parse_int(const std::string& key, const std::string& text) {
  const double v = parse_real(key, text);
  if (v != std::floor(v) || std::abs(v) > 1e6) throw ConfigError("--" + key + ": not an integer: \"" + text + "\"");
  return static_cast<int>(v);
}

/// "start:stop:step" (inclusive start; stop included when it lies on the
/// grid) or a single value.
inline std::vector<double> parse_range(const std::string& key, const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ':')) parts.push_back(part);
  if (!text.empty() && text.back() == ':') parts.emplace_back();
  if (parts.size() == 1) return {parse_real(key, parts[0])};
  if (parts.size() != 3) throw ConfigError("--" + key + ": expected start:stop:step, got \"" + text + "\"");
  const double start = parse_real(key, parts[0]);
  const double stop = parse_real(key, parts[1]);
  const double step = parse_real(key, parts[2]);
  if (!(step > 0.0)) throw ConfigError("--" + key + ": step must be positive");
  if (stop < start) throw ConfigError("--" + key + ": stop is below start");
  const auto count = static_cast<long long>(std::floor((stop - start) / step + 1e-9)) + 1;
  if (count > 100000) throw ConfigError("--" + key + ": range has too many points");
  std::vector<double> out;
  for (long long i = 0; i < count; ++i) out.push_back(start + static_cast<double>(i) * step);
  return out;
}

inline std::vector<int> parse_int_range(const std::string& key, const std::string& text) {
  std::vector<int> out;
  for (double v : parse_range(key, text)) {
    const double r = std::round(v);
    if (std::abs(v - r) > 1e-9) throw ConfigError("--" + key + ": range must contain integers");
    out.push_back(static_cast<int>(r));
  }
  return out;
}

inline Labeling parse_labeling_choice(const std::string& text, bool& best) {
  best = false;
  if (text == "x-unprimed") return Labeling::x_unprimed;
  if (text == "p-unprimed") return Labeling::p_unprimed;
  if (text == "best") {
    best = true;
    return Labeling::p_unprimed;
  }
  throw ConfigError("--labeling: expected x-unprimed, p-unprimed or best");
}

inline numerics::EigenConstraint parse_constraint(const std::string& text) {
  if (text == "none") return numerics::EigenConstraint::none;
  if (text == "nonneg") return numerics::EigenConstraint::nonnegative;
  throw ConfigError("--constraint: expected none or nonneg");
}

inline const std::set<std::string>& allowed_parameters(Command c) {
  static const std::map<Command, std::set<std::string>> schema{
      {Command::sign_ghz, {"m"}},
      {Command::sign_optimize, {"m", "d", "constraint"}},
      {Command::root_max, {"m", "theta", "labeling"}},
      {Command::cat_vw, {"alpha", "labeling", "tol"}},
      {Command::psi3_curve, {"alpha", "labeling", "tol"}},
      {Command::noise_sweep, {"m", "p", "tol"}},
      {Command::prep_fidelity, {"alpha", "x0"}}};
  return schema.at(c);
}

class Parameters {
 public:
  explicit Parameters(const RunConfig& config) : values_(config.parameters), command_(config.command) {
    const auto& allowed = allowed_parameters(command_);
    for (const auto& [key, value] : values_) {
      if (!allowed.contains(key)) {
        throw ConfigError("--" + key + " is not a parameter of " + command_name(command_));
      }
    }
  }

  std::string text(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }

  bool has(const std::string& key) const { return values_.contains(key); }

 private:
  std::map<std::string, std::string> values_;
  Command command_;
};

// ---- output -----------------------------------------------------------------

/// 12 significant digits, '.' decimal separator, one header line.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header) : header_(std::move(header)) {
    out_.imbue(std::locale::classic());
    out_ << std::setprecision(12);
    for (std::size_t i = 0; i < header_.size(); ++i) out_ << (i ? "," : "") << header_[i];
    out_ << '\n';
  }

  template <typename... Values>
  void row(const Values&... values) {
    if (sizeof...(values) != header_.size()) throw std::logic_error("CsvWriter: column count mismatch");
    std::size_t i = 0;
    ((out_ << (i++ ? "," : "") << values), ...);
    out_ << '\n';
  }

  std::string str() const { return out_.str(); }

 private:
  std::vector<std::string> header_;
  std::ostringstream out_;
};

struct CommandOutput {
  std::string csv;
  nlohmann::json results;
  nlohmann::json inputs;
  nlohmann::json tolerances;
};

// ---- commands -----------------------------------------------------------------

inline CommandOutput run_sign_ghz(const Parameters& params, int) {
  const auto ms = parse_int_range("m", params.text("m", "3"));
  CsvWriter csv({"m", "bell_factor", "closed_form", "violates"});
  nlohmann::json rows = nlohmann::json::array();
  for (int m : ms) {
    if (m < 2) throw ConfigError("--m: GHZ-like angles need m >= 2");
    const double bell = bell_factor_sign(FockCorrelatedState::ghz(m), ghz_like_angles(m));
    const double closed = ghz_bell_closed_form(m);
    csv.row(m, bell, closed, bell > 2.0 ? 1 : 0);
    rows.push_back({{"m", m}, {"bell_factor", bell}, {"closed_form", closed}});
  }
  CommandOutput out;
  out.csv = csv.str();
  out.inputs = {{"m", ms}};
  out.results = {{"bell_factor", rows.front()["bell_factor"]}, {"rows", rows}};
  out.tolerances = nlohmann::json::object();
  return out;
}

inline CommandOutput run_sign_optimize(const Parameters& params, int) {
  const int m = parse_int("m", params.text("m", "3"));
  const int d = parse_int("d", params.text("d", "20"));
  const std::string constraint_text = params.text("constraint", "none");
  const auto constraint = parse_constraint(constraint_text);
  if (m < 2) throw ConfigError("--m must be at least 2");
  if (d < 2) throw ConfigError("--d must be at least 2");
  const auto angles = default_angles(m);
  const auto optimum = optimize_state(m, d, angles, constraint);
  CsvWriter csv({"r", "c_r"});
  for (int r = 0; r < d; ++r) csv.row(r, optimum.state.coefficient(r));
  CommandOutput out;
  out.csv = csv.str();
  out.inputs = {{"m", m}, {"d", d}, {"constraint", constraint_text},
                {"angles", {{"unprimed", angles.unprimed}, {"primed", angles.primed}}}};
  out.results = {{"bell_factor", optimum.bell},
                 {"violates", optimum.bell > 2.0},
                 {"residual", optimum.residual},
                 {"coefficients", optimum.state.coefficients()}};
  out.tolerances = {{"eigen_residual", constraint == numerics::EigenConstraint::none ? 1e-10 : 1e-8}};
  return out;
}

inline CommandOutput run_root_max(const Parameters& params, int) {
  const int m_max = parse_int("m", params.text("m", "8"));
  if (m_max < 2) throw ConfigError("--m must be at least 2");
  bool best = false;
  const Labeling labeling = parse_labeling_choice(params.text("labeling", "best"), best);
  const std::optional<double> theta =
      params.has("theta") ? std::optional<double>(parse_real("theta", params.text("theta", "0"))) : std::nullopt;
  CsvWriter csv({"m", "theta", "bell_factor", "quantum_bound"});
  nlohmann::json rows = nlohmann::json::array();
  for (int m = 2; m <= m_max; ++m) {
    const double phase = theta.value_or(optimal_phase(m));
    const RootBinningSpec spec(1.0, 1.0, phase, m);
    const double bell = best ? bell_factor_root_best_labeling(spec) : bell_factor_root(spec, labeling);
    csv.row(m, phase, bell, quantum_bound(m));
    rows.push_back({{"m", m}, {"theta", phase}, {"bell_factor", bell}, {"quantum_bound", quantum_bound(m)}});
  }
  CommandOutput out;
  out.csv = csv.str();
  out.inputs = {{"m", m_max}, {"labeling", params.text("labeling", "best")}};
  if (theta) out.inputs["theta"] = *theta;
  out.results = {{"bell_factor", rows.back()["bell_factor"]}, {"rows", rows}};
  out.tolerances = nlohmann::json::object();
  return out;
}

inline double labeled_value(double x_value, double p_value, bool best, Labeling labeling) {
  if (best) return std::max(x_value, p_value);
  return labeling == Labeling::x_unprimed ? x_value : p_value;
}

inline CommandOutput run_cat_vw(const Parameters& params, int jobs) {
  const auto alphas = parse_range("alpha", params.text("alpha", "6"));
  const double tol = parse_real("tol", params.text("tol", "1e-9"));
  bool best = false;
  const Labeling labeling = parse_labeling_choice(params.text("labeling", "best"), best);
  for (double a : alphas) {
    if (!(a > 0.0)) throw ConfigError("--alpha values must be positive");
  }
  struct Row {
    double V, W, m2, m3;
  };
  auto rows = parallel_map<Row>(alphas.size(), jobs, [&](std::size_t i) {
    const auto vw = overlaps_VW(cat_pair(alphas[i]), tol);
    const double v = std::min(vw.V, 1.0);
    const double w = std::min(vw.W, 1.0);
    const double m2 = labeled_value(bell_factor_root_max_theta(v, w, 2, Labeling::x_unprimed),
                                    bell_factor_root_max_theta(v, w, 2, Labeling::p_unprimed), best, labeling);
    const RootBinningSpec spec3(v, w, 0.0, 3);
    const double m3 = labeled_value(bell_factor_root(spec3, Labeling::x_unprimed),
                                    bell_factor_root(spec3, Labeling::p_unprimed), best, labeling);
    return Row{vw.V, vw.W, m2, m3};
  });
  CsvWriter csv({"alpha", "V", "W", "bell_m2_theta_max", "bell_m3_theta0"});
  nlohmann::json json_rows = nlohmann::json::array();
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    csv.row(alphas[i], rows[i].V, rows[i].W, rows[i].m2, rows[i].m3);
    json_rows.push_back({{"alpha", alphas[i]}, {"V", rows[i].V}, {"W", rows[i].W},
                         {"bell_m2_theta_max", rows[i].m2}, {"bell_m3_theta0", rows[i].m3}});
  }
  CommandOutput out;
  out.csv = csv.str();
  out.inputs = {{"alpha", alphas}, {"labeling", params.text("labeling", "best")}};
  out.results = {{"V", rows.front().V}, {"W", rows.front().W}, {"rows", json_rows}};
  out.tolerances = {{"quadrature", tol}};
  return out;
}

inline CommandOutput run_psi3_curve(const Parameters& params, int jobs) {
  const auto alphas = parse_range("alpha", params.text("alpha", "0.5:3.0:0.05"));
  const double tol = parse_real("tol", params.text("tol", "1e-12"));
  bool best = false;
  const Labeling labeling = parse_labeling_choice(params.text("labeling", "best"), best);
  for (double a : alphas) {
    if (!(a > 0.0)) throw ConfigError("--alpha values must be positive");
  }
  struct Row {
    Psi3BellResult direct;
    double theta0 = 0.0;
    double theta_max = 0.0;
  };
  auto rows = parallel_map<Row>(alphas.size(), jobs, [&](std::size_t i) {
    Row row;
    row.direct = direct_bell_psi3(alphas[i], tol);
    // Product-form reference state with the same cat pair, from V and W.
    const auto vw = overlaps_VW(cat_pair(alphas[i]), 1e-9);
    const double v = std::min(vw.V, 1.0);
    const double w = std::min(vw.W, 1.0);
    const RootBinningSpec spec(v, w, 0.0, 3);
    row.theta0 = labeled_value(bell_factor_root(spec, Labeling::x_unprimed),
                               bell_factor_root(spec, Labeling::p_unprimed), best, labeling);
    row.theta_max = labeled_value(bell_factor_root_max_theta(v, w, 3, Labeling::x_unprimed),
                                  bell_factor_root_max_theta(v, w, 3, Labeling::p_unprimed), best, labeling);
    return row;
  });
  CsvWriter csv({"alpha", "bell_factor", "bell_x_unprimed", "bell_p_unprimed", "product_state_theta0",
                 "product_state_theta_max", "probability_sum_min", "probability_sum_max"});
  std::optional<double> crossing;
  double min_total = 1e300;
  double max_total = -1e300;
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    const auto& r = rows[i];
    const double bell = labeled_value(r.direct.bell_x_unprimed, r.direct.bell_p_unprimed, best, labeling);
    csv.row(alphas[i], bell, r.direct.bell_x_unprimed, r.direct.bell_p_unprimed, r.theta0, r.theta_max,
            r.direct.min_total, r.direct.max_total);
    min_total = std::min(min_total, r.direct.min_total);
    max_total = std::max(max_total, r.direct.max_total);
    if (!crossing && i > 0) {
      const auto& prev = rows[i - 1];
      const double prev_bell = labeled_value(prev.direct.bell_x_unprimed, prev.direct.bell_p_unprimed, best, labeling);
      if (prev_bell <= 2.0 && bell > 2.0) {
        crossing = alphas[i - 1] + (2.0 - prev_bell) * (alphas[i] - alphas[i - 1]) / (bell - prev_bell);
      }
    }
  }
  const auto& last = rows.back().direct;
  CommandOutput out;
  out.csv = csv.str();
  out.inputs = {{"alpha", alphas}, {"labeling", params.text("labeling", "best")}};
  out.results = {{"crossing_alpha", crossing ? nlohmann::json(*crossing) : nlohmann::json(nullptr)},
                 {"bell_factor_at_last_alpha", labeled_value(last.bell_x_unprimed, last.bell_p_unprimed, best, labeling)},
                 {"probability_sum_min", min_total},
                 {"probability_sum_max", max_total}};
  out.tolerances = {{"quadrature", tol}, {"overlaps", 1e-9}};
  return out;
}

inline CommandOutput run_noise_sweep(const Parameters& params, int jobs) {
  const auto ms = parse_int_range("m", params.text("m", "2:10:1"));
  const auto ps = parse_range("p", params.text("p", "0:0.2:0.01"));
  const double tol = parse_real("tol", params.text("tol", "1e-12"));
  for (int m : ms) {
    if (m < 2 || m > 16) throw ConfigError("--m values must lie in [2, 16]");
  }
  for (double p : ps) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("--p values must lie in [0, 1]");
  }
  std::vector<std::pair<int, double>> grid;
  for (int m : ms) {
    for (double p : ps) grid.emplace_back(m, p);
  }
  auto values = parallel_map<double>(grid.size(), jobs, [&](std::size_t i) {
    const auto [m, p] = grid[i];
    return noisy_bell_direct(FockCorrelatedState::ghz(m), ghz_like_angles(m), p, tol);
  });
  CsvWriter csv({"m", "p", "bell_factor", "violates"});
  for (std::size_t i = 0; i < grid.size(); ++i) csv.row(grid[i].first, grid[i].second, values[i], values[i] > 2.0 ? 1 : 0);
  nlohmann::json thresholds = nlohmann::json::array();
  for (int m : ms) {
    const auto t = p_max_ghz(m);
    thresholds.push_back({{"m", m}, {"p_max", t.p_max}, {"violates", t.violates}});
  }
  CommandOutput out;
  out.csv = csv.str();
  out.inputs = {{"m", ms}, {"p", ps}};
  out.results = {{"p_max", thresholds}, {"p_max_limit", 1.0 - 0.5 * std::sqrt(std::numbers::pi)}};
  out.tolerances = {{"quadrature", tol}};
  return out;
}

inline CommandOutput run_prep_fidelity(const Parameters& params, int jobs) {
  const auto alphas = parse_range("alpha", params.text("alpha", "1:4:1"));
  for (double a : alphas) {
    if (!(a > 0.0)) throw ConfigError("--alpha values must be positive");
  }
  const std::optional<double> fixed_x0 =
      params.has("x0") ? std::optional<double>(parse_real("x0", params.text("x0", "0"))) : std::nullopt;
  struct Row {
    double x0 = 0.0;
    PipelineResult sum_first;
    PipelineResult difference_first;
  };
  auto rows = parallel_map<Row>(alphas.size(), jobs, [&](std::size_t i) {
    Row row;
    if (fixed_x0) {
      row.x0 = *fixed_x0;
      row.sum_first = generation_pipeline(alphas[i], row.x0, PortConvention::sum_first);
    } else {
      const auto opt = optimal_conditioning(alphas[i], PortConvention::sum_first);
      row.x0 = opt.x0;
      row.sum_first = opt.result;
    }
    row.difference_first = generation_pipeline(alphas[i], row.x0, PortConvention::difference_first);
    return row;
  });
  CsvWriter csv({"alpha", "x0", "fidelity", "density"});
  nlohmann::json json_rows = nlohmann::json::array();
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    const auto& r = rows[i];
    csv.row(alphas[i], r.x0, r.sum_first.fidelity, r.sum_first.density);
    json_rows.push_back({{"alpha", alphas[i]},
                         {"x0", r.x0},
                         {"fidelity", r.sum_first.fidelity},
                         {"fidelity_flipped_target", r.sum_first.fidelity_flipped},
                         {"density", r.sum_first.density},
                         {"alternate_ports",
                          {{"fidelity", r.difference_first.fidelity},
                           {"fidelity_flipped_target", r.difference_first.fidelity_flipped},
                           {"density", r.difference_first.density}}}});
  }
  CommandOutput out;
  out.csv = csv.str();
  out.inputs = {{"alpha", alphas}};
  if (fixed_x0) out.inputs["x0"] = *fixed_x0;
  out.results = {{"rows", json_rows}};
  out.tolerances = {{"brent_bits", 40}};
  return out;
}

inline CommandOutput dispatch(const RunConfig& config) {
  const Parameters params(config);
  switch (config.command) {
    case Command::sign_ghz: return run_sign_ghz(params, config.jobs);
    case Command::sign_optimize: return run_sign_optimize(params, config.jobs);
    case Command::root_max: return run_root_max(params, config.jobs);
    case Command::cat_vw: return run_cat_vw(params, config.jobs);
    case Command::psi3_curve: return run_psi3_curve(params, config.jobs);
    case Command::noise_sweep: return run_noise_sweep(params, config.jobs);
    case Command::prep_fidelity: return run_prep_fidelity(params, config.jobs);
  }
  throw ConfigError("unhandled command");
}

/// Runs one command and writes its CSV and JSON summary. Returns the process
/// exit status; diagnostics go to `log`.
inline ExitStatus run(const RunConfig& config, std::ostream& log) {
  const auto started = std::chrono::steady_clock::now();
  CommandOutput output;
  try {
    if (config.jobs < 1) throw ConfigError("--jobs must be at least 1");
    output = dispatch(config);
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << '\n';
    return ExitStatus::config_error;
  } catch (const NumericalError& e) {
    log << "numerical failure: " << e.what() << '\n';
    return ExitStatus::numerical_failure;
  } catch (const std::invalid_argument& e) {
    log << "config error: " << e.what() << '\n';
    return ExitStatus::config_error;
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

  const std::string name = command_name(config.command);
  std::error_code ec;
  std::filesystem::create_directories(config.out_dir, ec);
  if (ec) {
    log << "config error: cannot create output directory " << config.out_dir << ": " << ec.message() << '\n';
    return ExitStatus::config_error;
  }
  nlohmann::json summary = {{"command", name},
                            {"inputs", output.inputs},
                            {"results", output.results},
                            {"tolerances", output.tolerances},
                            {"jobs", config.jobs},
                            {"wall_time_seconds", seconds}};
  std::ofstream csv(config.out_dir / (name + ".csv"), std::ios::binary);
  std::ofstream json(config.out_dir / (name + ".json"), std::ios::binary);
  if (!csv || !json) {
    log << "config error: cannot write into " << config.out_dir << '\n';
    return ExitStatus::config_error;
  }
  csv << output.csv;
  json << summary.dump(2) << '\n';
  return ExitStatus::success;
}

}  // namespace bellscope::app
