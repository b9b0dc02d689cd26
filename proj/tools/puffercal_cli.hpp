//
// Copyright 2026 The puffercal Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// Command-line front end. run_cli() takes the argument list and two streams
// so tests can drive it in-process.
//
// Exit codes: 0 success, 2 configuration error, 3 solver failure,
// 4 verification failure.

#ifndef PUFFERCAL_TOOLS_PUFFERCAL_CLI_HPP_
#define PUFFERCAL_TOOLS_PUFFERCAL_CLI_HPP_

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "puffercal/puffercal.hpp"

namespace puffercal::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitSolver = 3;
inline constexpr int kExitVerify = 4;

// Parses "0.5,1,2", "1.2:3:0.2" (inclusive) and "inf" tokens.
inline std::vector<double> parse_grid(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream stream(text);
  std::string token;
  while (std::getline(stream, token, ',')) {
    const std::string_view t = trim(token);
    if (t.empty()) continue;
    auto number = [&](std::string_view s) {
      const std::string_view v = trim(s);
      if (v == "inf" || v == "+inf") return kInf;
      return detail::parse_number(v, what);
    };
    const auto first = t.find(':');
    if (first == std::string_view::npos) {
      out.push_back(number(t));
      continue;
    }
    const auto second = t.find(':', first + 1);
    if (second == std::string_view::npos) {
      throw Error(ErrorCode::kInvalidArgument, what + " range must be start:stop:step");
    }
    const double start = number(t.substr(0, first));
    const double stop = number(t.substr(first + 1, second - first - 1));
    const double step = number(t.substr(second + 1));
    if (!(step > 0.0) || !std::isfinite(start) || !std::isfinite(stop) || stop < start) {
      throw Error(ErrorCode::kInvalidArgument, "bad " + what + " range '" + std::string(t) + "'");
    }
    const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9));
    if (count > 100000) throw Error(ErrorCode::kInvalidArgument, what + " range is too long");
    for (long k = 0; k <= count; ++k) {
      // Round away binary noise such as 1.2000000000000002.
      out.push_back(std::round((start + static_cast<double>(k) * step) * 1e12) / 1e12);
    }
  }
  if (out.empty()) throw Error(ErrorCode::kInvalidArgument, what + " grid is empty");
  return out;
}

struct Request {
  std::string scenario = "point-mass";
  std::string data_dir;
  std::string alpha_text;
  std::string epsilon_text;
  std::vector<std::string> mechanisms;
  std::string cost = "abs";
  std::string rate = "reciprocal";
  std::string format = "csv";
  std::string out_dir;
  std::string group_by = "epsilon";
  double tol = 1e-9;
  std::uint64_t seed = 0;
  int jobs = 1;
  double delta = 1.0;
  std::optional<double> parameter;
  double scale = 1.0;
  std::uint64_t mc_samples = 0;
  bool verify = false;
};

struct Scenario {
  std::string name;
  ScenarioSet set;
  std::vector<std::string> assumptions;
};

inline std::string default_data_dir() {
  if (const char* env = std::getenv("PUFFERCAL_DATA_DIR"); env && *env) return env;
  return "data/uci";
}

inline int default_jobs() {
  if (const char* env = std::getenv("PUFFERCAL_JOBS"); env && *env) {
    try {
      return std::max(1, std::stoi(env));
    } catch (const std::exception&) {
      return 1;
    }
  }
  return 1;
}

inline Scenario resolve_scenario(const Request& req) {
  const std::string& name = req.scenario;
  if (name == "point-mass") {
    if (!(req.delta > 0.0) || !std::isfinite(req.delta)) {
      throw Error(ErrorCode::kInvalidArgument, "--delta must be positive");
    }
    return {name,
            ScenarioSet::create({{DiscreteDistribution::point_mass(0.0),
                                  DiscreteDistribution::point_mass(req.delta),
                                  "delta0|delta" + format_double(req.delta)}}),
            {}};
  }
  if (name == "identical") {
    const auto d = DiscreteDistribution::create({0.0, 1.0}, {0.5, 0.5});
    return {name, ScenarioSet::create({{d, d, "uniform01|uniform01"}}), {}};
  }
  const std::filesystem::path data_dir = req.data_dir.empty() ? default_data_dir() : req.data_dir;
  if (auto config = find_builtin(name)) {
    return {name, ScenarioSet::create({load_scenario(*config, data_dir)}), config->assumptions};
  }
  const std::filesystem::path path(name);
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorCode::kIoError, "unknown scenario '" + name +
                                         "' (expected adult, heart, student, point-mass, "
                                         "identical or a JSON file)");
  }
  const std::filesystem::path base = path.has_parent_path() ? path.parent_path() : ".";
  return {path.stem().string(), load_scenario_file(path, req.data_dir.empty() ? base : data_dir),
          {}};
}

struct Cell {
  MechanismChoice mechanism;
  double alpha;
  double epsilon;
};

inline std::vector<Cell> build_cells(const Request& req) {
  const std::vector<double> alphas = parse_grid(req.alpha_text, "alpha");
  const std::vector<double> epsilons = parse_grid(req.epsilon_text, "epsilon");
  std::vector<std::string> names = req.mechanisms;
  if (names.empty()) names.push_back("laplace");
  std::vector<Cell> cells;
  for (const auto& name : names) {
    MechanismChoice choice = MechanismChoice::parse(name);
    choice.cost = Cost::parse(req.cost);
    choice.rate = Rate::parse(req.rate);
    for (double a : alphas) {
      for (double e : epsilons) {
        PrivacySpec::create(a, e);  // validates the cell
        cells.push_back({choice, a, e});
      }
    }
  }
  return cells;
}

inline std::string cell_name(const Cell& c) {
  return "mechanism=" + c.mechanism.name() + ", alpha=" + format_double(c.alpha) +
         ", epsilon=" + format_double(c.epsilon);
}

// Tabular output shared by all commands.
class Output {
 public:
  explicit Output(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  void add(std::vector<nlohmann::ordered_json> row) { rows_.push_back(std::move(row)); }
  const std::vector<std::vector<nlohmann::ordered_json>>& rows() const { return rows_; }

  static nlohmann::ordered_json num(double v) {
    if (std::isfinite(v)) return v;
    return format_double(v);
  }

  std::string csv() const {
    std::string s;
    for (std::size_t k = 0; k < columns_.size(); ++k) s += (k ? "," : "") + columns_[k];
    s += '\n';
    for (const auto& row : rows_) {
      for (std::size_t k = 0; k < row.size(); ++k) {
        if (k) s += ',';
        s += cell_text(row[k]);
      }
      s += '\n';
    }
    return s;
  }

  std::string json(const std::string& command, const Scenario& scenario) const {
    nlohmann::ordered_json doc;
    doc["command"] = command;
    doc["scenario"] = scenario.name;
    doc["assumptions"] = scenario.assumptions;
    doc["columns"] = columns_;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& row : rows_) {
      nlohmann::ordered_json r;
      for (std::size_t k = 0; k < row.size(); ++k) r[columns_[k]] = row[k];
      rows.push_back(std::move(r));
    }
    doc["rows"] = std::move(rows);
    return dump(doc) + "\n";
  }

 private:
  static std::string cell_text(const nlohmann::ordered_json& v) {
    if (v.is_number_float()) return format_double(v.get<double>());
    if (v.is_string()) {
      const std::string s = v.get<std::string>();
      if (s.find_first_of(",\"\n") == std::string::npos) return s;
      std::string q = "\"";
      for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
      return q + "\"";
    }
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    return v.dump();
  }

  // nlohmann already prints doubles in shortest round-trip form.
  static std::string dump(const nlohmann::ordered_json& doc) { return doc.dump(2); }

  std::vector<std::string> columns_;
  std::vector<std::vector<nlohmann::ordered_json>> rows_;
};

class CommandError : public std::runtime_error {
 public:
  CommandError(int code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
  int code() const { return code_; }

 private:
  int code_;
};

inline int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNoRoot:
    case ErrorCode::kNotMonotone:
    case ErrorCode::kFunctionalOverflow:
    case ErrorCode::kIntegrationFailure:
    case ErrorCode::kInfeasibleEvenAtInfinity:
      return kExitSolver;
    default:
      return kExitConfig;
  }
}

struct CellResult {
  std::vector<CalibrationResult> per_pair;
  CalibrationResult overall;
};

inline std::vector<CellResult> calibrate_cells(const std::vector<Cell>& cells,
                                               const ScenarioSet& scenarios, const Request& req) {
  CalibrateOptions options;
  options.solve.rel_tol = req.tol;
  std::vector<CellResult> results(cells.size());
  parallel_for(cells.size(), req.jobs, [&](std::size_t k) {
    const Cell& cell = cells[k];
    try {
      const PrivacySpec spec = PrivacySpec::create(cell.alpha, cell.epsilon);
      results[k].per_pair = calibrate_each_pair(scenarios, cell.mechanism, spec, options);
      std::size_t best = 0;
      for (std::size_t p = 1; p < results[k].per_pair.size(); ++p) {
        if (results[k].per_pair[p].parameter > results[k].per_pair[best].parameter) best = p;
      }
      results[k].overall = results[k].per_pair[best];
    } catch (const Error& e) {
      throw CommandError(exit_code_for(e.code()),
                         std::string(to_string(e.code())) + " at " + cell_name(cell) + ": " +
                             e.detail());
    }
  });
  return results;
}

inline void write_output(const Request& req, const std::string& command, const Scenario& scenario,
                         const Output& table, const std::string& stem, std::ostream& out) {
  const std::string text = req.format == "json" ? table.json(command, scenario) : table.csv();
  if (req.out_dir.empty()) {
    out << text;
    return;
  }
  std::filesystem::create_directories(req.out_dir);
  const std::filesystem::path path =
      std::filesystem::path(req.out_dir) / (stem + (req.format == "json" ? ".json" : ".csv"));
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error(ErrorCode::kIoError, "cannot write '" + path.string() + "'");
  file << text;
  out << path.string() << '\n';
}

inline std::string sanitize(std::string s) {
  for (char& c : s) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '.' && c != '-' && c != '_') c = '_';
  }
  return s;
}

inline VerifyOptions verify_options(const Request& req) {
  VerifyOptions v;
  v.mc_samples = req.mc_samples;
  v.seed = req.seed;
  return v;
}

// Re-verifies every calibrated cell; returns false if any pair fails.
inline bool closed_loop_ok(const std::vector<Cell>& cells, const std::vector<CellResult>& results,
                           const ScenarioSet& scenarios, const Request& req, std::ostream& err) {
  std::vector<char> ok(cells.size(), 1);
  parallel_for(cells.size(), req.jobs, [&](std::size_t k) {
    if (cells[k].mechanism.kind == MechanismKind::kExponential &&
        !satisfies_metric_axioms(cells[k].mechanism.cost)) {
      return;
    }
    const PrivacySpec spec = PrivacySpec::create(cells[k].alpha, cells[k].epsilon);
    const auto mech = mechanism_for(cells[k].mechanism, results[k].overall.parameter);
    for (const auto& r : verify_rpp(scenarios, mech, spec, verify_options(req))) {
      if (!r.pass) ok[k] = 0;
    }
  });
  bool all = true;
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (!ok[k]) {
      err << "verification failed at " << cell_name(cells[k]) << '\n';
      all = false;
    }
  }
  return all;
}

inline int cmd_calibrate(const Request& req, std::ostream& out, std::ostream& err) {
  const Scenario scenario = resolve_scenario(req);
  const std::vector<Cell> cells = build_cells(req);
  const std::vector<CellResult> results = calibrate_cells(cells, scenario.set, req);
  Output table({"mechanism", "alpha", "epsilon", "pair", "label", "parameter", "variance",
                "log_functional", "log_target", "binding", "no_noise", "experimental",
                "iterations"});
  for (std::size_t k = 0; k < cells.size(); ++k) {
    for (const CalibrationResult& r : results[k].per_pair) {
      table.add({cells[k].mechanism.name(), Output::num(cells[k].alpha),
                 Output::num(cells[k].epsilon), r.binding_pair_index, r.binding_label,
                 Output::num(r.parameter), Output::num(variance_for(cells[k].mechanism, r.parameter)),
                 Output::num(r.log_functional), Output::num(r.log_target),
                 r.binding_pair_index == results[k].overall.binding_pair_index, r.no_noise_needed,
                 r.experimental, r.iterations});
    }
  }
  write_output(req, "calibrate", scenario, table, "calibrate", out);
  if (req.verify && !closed_loop_ok(cells, results, scenario.set, req, err)) return kExitVerify;
  return kExitOk;
}

inline int cmd_verify(const Request& req, std::ostream& out, std::ostream& err) {
  const Scenario scenario = resolve_scenario(req);
  const std::vector<Cell> cells = build_cells(req);
  std::vector<double> parameters(cells.size());
  if (req.parameter) {
    if (!(*req.parameter >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "--parameter must be >= 0");
    std::fill(parameters.begin(), parameters.end(), *req.parameter);
  } else {
    const std::vector<CellResult> results = calibrate_cells(cells, scenario.set, req);
    for (std::size_t k = 0; k < cells.size(); ++k) parameters[k] = results[k].overall.parameter;
  }
  for (double& p : parameters) p *= req.scale;

  std::vector<std::vector<VerificationReport>> reports(cells.size());
  parallel_for(cells.size(), req.jobs, [&](std::size_t k) {
    const PrivacySpec spec = PrivacySpec::create(cells[k].alpha, cells[k].epsilon);
    reports[k] = verify_rpp(scenario.set, mechanism_for(cells[k].mechanism, parameters[k]), spec,
                            verify_options(req));
  });
  Output table({"mechanism", "alpha", "epsilon", "pair", "label", "parameter", "divergence_ij",
                "divergence_ji", "slack", "chernoff_bound", "mc_breach_estimate", "mc_half_width",
                "sample_count", "seed", "pass", "inconclusive"});
  bool all_pass = true;
  for (std::size_t k = 0; k < cells.size(); ++k) {
    for (const VerificationReport& r : reports[k]) {
      all_pass = all_pass && r.pass;
      if (!r.pass) {
        err << (r.inconclusive ? "inconclusive: " : "fail: ") << cell_name(cells[k])
            << ", pair=" << r.label << (r.message.empty() ? "" : " (" + r.message + ")") << '\n';
      }
      table.add({cells[k].mechanism.name(), Output::num(cells[k].alpha),
                 Output::num(cells[k].epsilon), r.pair_index, r.label, Output::num(parameters[k]),
                 Output::num(r.divergence_ij), Output::num(r.divergence_ji), Output::num(r.slack),
                 Output::num(r.chernoff_bound), Output::num(r.mc_breach_estimate),
                 Output::num(r.mc_half_width), r.sample_count, r.seed, r.pass, r.inconclusive});
    }
  }
  write_output(req, "verify", scenario, table, "verify", out);
  return all_pass ? kExitOk : kExitVerify;
}

inline int cmd_sweep(const Request& req, std::ostream& out, std::ostream& err) {
  if (req.group_by != "epsilon" && req.group_by != "alpha") {
    throw Error(ErrorCode::kInvalidArgument, "--group-by must be epsilon or alpha");
  }
  const Scenario scenario = resolve_scenario(req);
  const std::vector<Cell> cells = build_cells(req);
  const std::vector<CellResult> results = calibrate_cells(cells, scenario.set, req);
  const std::vector<std::string> columns = {"alpha", "epsilon", "mechanism", "parameter",
                                            "variance"};
  auto row = [&](std::size_t k) -> std::vector<nlohmann::ordered_json> {
    const double p = results[k].overall.parameter;
    return {Output::num(cells[k].alpha), Output::num(cells[k].epsilon), cells[k].mechanism.name(),
            Output::num(p), Output::num(variance_for(cells[k].mechanism, p))};
  };
  if (req.out_dir.empty()) {
    Output table(columns);
    for (std::size_t k = 0; k < cells.size(); ++k) table.add(row(k));
    write_output(req, "sweep", scenario, table, "sweep", out);
  } else {
    // One file per figure panel: fixed epsilon (curves over alpha) or fixed
    // alpha (curves over epsilon).
    std::map<double, Output> figures;
    for (std::size_t k = 0; k < cells.size(); ++k) {
      const double key = req.group_by == "epsilon" ? cells[k].epsilon : cells[k].alpha;
      figures.try_emplace(key, columns).first->second.add(row(k));
    }
    for (const auto& [key, table] : figures) {
      const std::string stem = sanitize(scenario.name) + "_" +
                               (req.group_by == "epsilon" ? "eps" : "alpha") + format_double(key);
      write_output(req, "sweep", scenario, table, stem, out);
    }
  }
  if (req.verify && !closed_loop_ok(cells, results, scenario.set, req, err)) return kExitVerify;
  return kExitOk;
}

inline int cmd_breach(const Request& req, std::ostream& out, std::ostream& /*err*/) {
  const Scenario scenario = resolve_scenario(req);
  const std::vector<Cell> cells = build_cells(req);
  if (req.mc_samples < 1000) throw Error(ErrorCode::kInvalidArgument, "--mc-samples must be >= 1000");
  std::vector<double> parameters(cells.size());
  if (req.parameter) {
    std::fill(parameters.begin(), parameters.end(), *req.parameter);
  } else {
    const std::vector<CellResult> results = calibrate_cells(cells, scenario.set, req);
    for (std::size_t k = 0; k < cells.size(); ++k) parameters[k] = results[k].overall.parameter;
  }
  for (double& p : parameters) p *= req.scale;

  struct Row {
    double divergence = 0.0;
    double chernoff = kInf;
    BreachEstimate mc;
    std::uint64_t seed = 0;
  };
  const std::size_t pairs = scenario.set.size();
  std::vector<Row> rows(cells.size() * pairs);
  parallel_for(rows.size(), req.jobs, [&](std::size_t idx) {
    const std::size_t k = idx / pairs;
    const std::size_t p = idx % pairs;
    const PrivacySpec spec = PrivacySpec::create(cells[k].alpha, cells[k].epsilon);
    const ScenarioPair& pair = scenario.set[p];
    const auto mech = mechanism_for(cells[k].mechanism, parameters[k]);
    Row& r = rows[idx];
    r.seed = derive_seed(req.seed, p);
    if (!mech) {
      r.divergence = renyi_divergence_discrete(pair.p_i, pair.p_j, spec.alpha());
      r.mc.samples = req.mc_samples;
      r.mc.estimate = pair.p_i == pair.p_j ? 0.0 : kInf;
    } else {
      r.divergence = renyi_divergence_numeric(pair.p_i, pair.p_j, *mech, spec.alpha());
      r.mc = monte_carlo_breach(pair.p_i, pair.p_j, *mech, spec.epsilon(), req.mc_samples, r.seed);
    }
    if (!spec.sub_unit() && !spec.infinite_order()) r.chernoff = chernoff_breach_bound(r.divergence, spec);
  });
  Output table({"mechanism", "alpha", "epsilon", "pair", "label", "parameter", "divergence_ij",
                "chernoff_bound", "mc_breach_estimate", "mc_half_width", "sample_count", "seed"});
  for (std::size_t idx = 0; idx < rows.size(); ++idx) {
    const std::size_t k = idx / pairs;
    const std::size_t p = idx % pairs;
    const Row& r = rows[idx];
    table.add({cells[k].mechanism.name(), Output::num(cells[k].alpha), Output::num(cells[k].epsilon),
               p, scenario.set[p].label, Output::num(parameters[k]), Output::num(r.divergence),
               Output::num(r.chernoff), Output::num(r.mc.estimate), Output::num(r.mc.half_width),
               r.mc.samples, r.seed});
  }
  write_output(req, "breach", scenario, table, "breach", out);
  return kExitOk;
}

inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Noise calibration for Renyi pufferfish privacy", "puffercal"};
  app.require_subcommand(1);
  Request req;
  req.jobs = default_jobs();

  auto common = [&req](CLI::App* sub, bool needs_grid) {
    sub->add_option("--scenario", req.scenario,
                    "adult, heart, student, point-mass, identical or a JSON scenario file")
        ->capture_default_str();
    sub->add_option("--data-dir", req.data_dir, "directory holding the UCI files");
    auto* a = sub->add_option("--alpha", req.alpha_text, "Renyi orders: list, start:stop:step, inf");
    auto* e = sub->add_option("--epsilon", req.epsilon_text, "privacy levels: list or range");
    if (needs_grid) {
      a->required();
      e->required();
    }
    sub->add_option("--mechanism", req.mechanisms,
                    "laplace, gaussian, exponential, winf, baseline-laplace, baseline-gaussian "
                    "(repeatable)")
        ->delimiter(',');
    sub->add_option("--cost", req.cost, "exponential cost: abs, squared, sqrt, power:p")
        ->capture_default_str();
    sub->add_option("--rate", req.rate, "exponential rate: reciprocal, reciprocal-power:k")
        ->capture_default_str();
    sub->add_option("--format", req.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    sub->add_option("--out", req.out_dir, "output directory (default: stdout)");
    sub->add_option("--tol", req.tol, "solver relative tolerance")->capture_default_str();
    sub->add_option("--seed", req.seed, "random seed")->capture_default_str();
    sub->add_option("--jobs", req.jobs, "worker threads (default $PUFFERCAL_JOBS or 1)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--delta", req.delta, "point-mass distance")->capture_default_str();
  };

  CLI::App* calibrate = app.add_subcommand("calibrate", "solve noise parameters");
  common(calibrate, true);
  calibrate->add_flag("--verify", req.verify, "re-verify every parameter");

  CLI::App* verify = app.add_subcommand("verify", "check D_alpha <= epsilon numerically");
  common(verify, true);
  verify->add_option("--parameter", req.parameter, "use this parameter instead of calibrating");
  verify->add_option("--scale", req.scale, "multiply the parameter by this factor");
  verify->add_option("--mc-samples", req.mc_samples, "Monte-Carlo breach samples (0 = off)");

  CLI::App* sweep = app.add_subcommand("sweep", "parameter curves over alpha / epsilon grids");
  common(sweep, true);
  sweep->add_option("--group-by", req.group_by, "one output file per epsilon or per alpha")
      ->capture_default_str();
  sweep->add_flag("--verify", req.verify, "re-verify every parameter");

  CLI::App* breach = app.add_subcommand("breach", "Monte-Carlo breach probability vs. Chernoff bound");
  common(breach, true);
  req.mc_samples = 0;
  breach->add_option("--parameter", req.parameter, "use this parameter instead of calibrating");
  breach->add_option("--scale", req.scale, "multiply the parameter by this factor");
  breach->add_option("--mc-samples", req.mc_samples, "Monte-Carlo samples (>= 1000)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  if (breach->parsed() && req.mc_samples == 0) req.mc_samples = 100000;

  try {
    if (calibrate->parsed()) return cmd_calibrate(req, out, err);
    if (verify->parsed()) return cmd_verify(req, out, err);
    if (sweep->parsed()) return cmd_sweep(req, out, err);
    return cmd_breach(req, out, err);
  } catch (const CommandError& e) {
    err << "error: " << e.what() << '\n';
    return e.code();
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
}

}  // namespace puffercal::cli

#endif  // PUFFERCAL_TOOLS_PUFFERCAL_CLI_HPP_
