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

// Tabular input: CSV tables, secret-conditioned empirical distributions and
// the JSON exchange format for distributions and scenario configs.

#ifndef PUFFERCAL_INGEST_HPP_
#define PUFFERCAL_INGEST_HPP_

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "puffercal/calibrate.hpp"
#include "puffercal/dist.hpp"
#include "puffercal/error.hpp"
#include "puffercal/numeric.hpp"

namespace puffercal {

struct CsvOptions {
  char delimiter = ',';
  // When empty the first non-comment line is the header.
  std::vector<std::string> column_names;
  // Lines starting with this prefix are skipped; empty disables.
  std::string comment_prefix = "|";
};

class Table {
 public:
  Table(std::vector<std::string> columns, std::vector<std::vector<std::string>> rows)
      : columns_(std::move(columns)), rows_(std::move(rows)) {}

  const std::vector<std::string>& columns() const { return columns_; }
  const std::vector<std::vector<std::string>>& rows() const { return rows_; }
  std::size_t row_count() const { return rows_.size(); }

  std::optional<std::size_t> column_index(std::string_view name) const {
    for (std::size_t k = 0; k < columns_.size(); ++k) {
      if (columns_[k] == name) return k;
    }
    return std::nullopt;
  }

  void append(const Table& other) {
    if (other.columns_ != columns_) {
      throw Error(ErrorCode::kParseError, "tables have different columns");
    }
    rows_.insert(rows_.end(), other.rows_.begin(), other.rows_.end());
  }

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

namespace detail {

// Splits one record. Double quotes group fields and "" is a literal quote.
inline std::vector<std::string> split_record(std::string_view line, char delimiter,
                                             std::size_t line_number) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t k = 0; k < line.size(); ++k) {
    const char c = line[k];
    if (quoted) {
      if (c == '"') {
        if (k + 1 < line.size() && line[k + 1] == '"') {
          field.push_back('"');
          ++k;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == delimiter) {
      fields.push_back(std::string(trim(field)));
      field.clear();
    } else {
      field.push_back(c);
    }
  }
  if (quoted) {
    throw Error(ErrorCode::kParseError,
                "row " + std::to_string(line_number) + ": unterminated quoted field");
  }
  fields.push_back(std::string(trim(field)));
  return fields;
}

}  // namespace detail

// Parses CSV text. Errors name the 1-based line number.
inline Table parse_table(std::string_view text, const CsvOptions& options = {}) {
  std::vector<std::string> columns = options.column_names;
  std::vector<std::vector<std::string>> rows;
  std::size_t line_number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (trim(line).empty()) continue;
    if (!options.comment_prefix.empty() && line.starts_with(options.comment_prefix)) continue;
    std::vector<std::string> fields = detail::split_record(line, options.delimiter, line_number);
    if (columns.empty()) {
      columns = std::move(fields);
      continue;
    }
    if (fields.size() != columns.size()) {
      throw Error(ErrorCode::kParseError,
                  "row " + std::to_string(line_number) + ": expected " +
                      std::to_string(columns.size()) + " fields, got " +
                      std::to_string(fields.size()) + " (column " +
                      std::to_string(std::min(fields.size(), columns.size()) + 1) + ")");
    }
    rows.push_back(std::move(fields));
  }
  if (columns.empty()) throw Error(ErrorCode::kParseError, "no header row");
  if (rows.empty()) throw Error(ErrorCode::kParseError, "table has no data rows");
  return Table(std::move(columns), std::move(rows));
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::kIoError, "cannot read '" + path.string() + "'");
  return buffer.str();
}

inline Table load_table(const std::filesystem::path& path, const CsvOptions& options = {}) {
  const std::string text = read_file(path);
  try {
    return parse_table(text, options);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.detail());
  }
}

// Loads and concatenates several files with the same columns.
inline Table load_tables(const std::vector<std::filesystem::path>& paths,
                         const CsvOptions& options = {}) {
  if (paths.empty()) throw Error(ErrorCode::kInvalidArgument, "no dataset files given");
  Table table = load_table(paths.front(), options);
  for (std::size_t k = 1; k < paths.size(); ++k) table.append(load_table(paths[k], options));
  return table;
}

struct ScenarioConfig {
  std::string name;
  std::vector<std::string> dataset_paths;
  std::string x_attribute;
  std::string secret_attribute;
  std::string value_i;
  std::string value_j;
  std::map<std::string, double> numeric_coding;
  bool drop_missing = true;
  CsvOptions csv;
  std::string fetch_note;
  std::vector<std::string> assumptions;
};

enum class SecretSide { kI, kJ };

inline void validate_config(const ScenarioConfig& config, const Table& table) {
  if (config.x_attribute == config.secret_attribute) {
    throw Error(ErrorCode::kInvalidArgument, "x_attribute and secret_attribute must differ");
  }
  for (const std::string& column : {config.x_attribute, config.secret_attribute}) {
    if (!table.column_index(column)) {
      throw Error(ErrorCode::kInvalidArgument, "column '" + column + "' not found");
    }
  }
  if (trim(config.value_i) == trim(config.value_j)) {
    throw Error(ErrorCode::kInvalidArgument, "value_i and value_j must differ");
  }
}

inline bool is_missing(std::string_view cell) {
  const std::string_view t = trim(cell);
  return t.empty() || t == "?";
}

// P(X | secret = value_i or value_j) as an empirical distribution.
inline DiscreteDistribution conditional_distribution(const Table& table,
                                                     const ScenarioConfig& config,
                                                     SecretSide which) {
  validate_config(config, table);
  const std::size_t x_col = *table.column_index(config.x_attribute);
  const std::size_t s_col = *table.column_index(config.secret_attribute);
  const std::string_view wanted = trim(which == SecretSide::kI ? config.value_i : config.value_j);
  std::vector<double> samples;
  for (std::size_t r = 0; r < table.row_count(); ++r) {
    const auto& row = table.rows()[r];
    if (trim(row[s_col]) != wanted) continue;
    const std::string_view cell = trim(row[x_col]);
    if (is_missing(cell)) {
      if (config.drop_missing) continue;
      throw Error(ErrorCode::kInvalidValue, "missing '" + config.x_attribute + "' in data row " +
                                                std::to_string(r + 1));
    }
    double value = 0.0;
    try {
      value = detail::parse_number(cell, config.x_attribute);
    } catch (const Error&) {
      const auto it = config.numeric_coding.find(std::string(cell));
      if (it == config.numeric_coding.end()) {
        if (config.drop_missing) continue;
        throw Error(ErrorCode::kUnknownCategory,
                    "no numeric coding for '" + std::string(cell) + "' in column '" +
                        config.x_attribute + "'");
      }
      value = it->second;
    }
    samples.push_back(value);
  }
  if (samples.empty()) {
    throw Error(ErrorCode::kEmptyConditional,
                "no rows with " + config.secret_attribute + " = '" + std::string(wanted) + "'");
  }
  return build_empirical(samples);
}

inline std::vector<std::string> adult_columns() {
  return {"age",           "workclass",     "fnlwgt",       "education",      "education-num",
          "marital-status", "occupation",   "relationship", "race",           "sex",
          "capital-gain",  "capital-loss",  "hours-per-week", "native-country", "income"};
}

// The three UCI scenarios. Paths are relative to a data directory; nothing
// is downloaded here (see tools/fetch_datasets.py).
inline std::vector<ScenarioConfig> builtin_scenarios() {
  std::vector<ScenarioConfig> out;

  ScenarioConfig adult;
  adult.name = "adult";
  adult.dataset_paths = {"adult/adult.data", "adult/adult.test"};
  adult.x_attribute = "education-num";
  adult.secret_attribute = "relationship";
  adult.value_i = "Husband";
  adult.value_j = "Not-in-family";
  adult.csv.column_names = adult_columns();
  adult.fetch_note =
      "https://archive.ics.uci.edu/ml/machine-learning-databases/adult/adult.data and adult.test";
  adult.assumptions = {"education encoded by the ordinal education-num column",
                       "adult.data and adult.test concatenated",
                       "'?' cells treated as missing and dropped"};
  out.push_back(adult);

  ScenarioConfig heart;
  heart.name = "heart";
  heart.dataset_paths = {"heart/heart.csv"};
  heart.x_attribute = "oldpeak";
  heart.secret_attribute = "fbs";
  heart.value_i = "0";
  heart.value_j = "1";
  heart.fetch_note = "Cleveland heart disease table with a header row (303 records)";
  heart.assumptions = {"Cleveland subset with header row", "'?' cells treated as missing"};
  out.push_back(heart);

  ScenarioConfig student;
  student.name = "student";
  student.dataset_paths = {"student/student-mat.csv"};
  student.x_attribute = "G3";
  student.secret_attribute = "guardian";
  student.value_i = "mother";
  student.value_j = "father";
  student.csv.delimiter = ';';
  student.fetch_note =
      "https://archive.ics.uci.edu/ml/machine-learning-databases/00320/student.zip "
      "(student-mat.csv)";
  student.assumptions = {"mathematics course table", "'?' cells treated as missing"};
  out.push_back(student);
  return out;
}

inline std::optional<ScenarioConfig> find_builtin(std::string_view name) {
  for (auto& c : builtin_scenarios()) {
    if (c.name == name) return c;
  }
  return std::nullopt;
}

// Loads the config's files from `data_dir` and builds the secret pair.
inline ScenarioPair load_scenario(const ScenarioConfig& config,
                                  const std::filesystem::path& data_dir) {
  std::vector<std::filesystem::path> paths;
  for (const auto& p : config.dataset_paths) {
    const std::filesystem::path path(p);
    paths.push_back(path.is_absolute() ? path : data_dir / path);
  }
  const Table table = load_tables(paths, config.csv);
  ScenarioPair pair{conditional_distribution(table, config, SecretSide::kI),
                    conditional_distribution(table, config, SecretSide::kJ),
                    config.name + ":" + config.secret_attribute + "=" + config.value_i + "|" +
                        config.value_j};
  return pair;
}

// {"atoms":[...],"masses":[...],"label":"..."} with shortest round-trip
// numbers.
inline std::string distribution_to_json(const DiscreteDistribution& dist,
                                        std::string_view label = "") {
  std::string out = "{\"atoms\":[";
  for (std::size_t k = 0; k < dist.size(); ++k) {
    if (k) out += ',';
    out += format_double(dist.atoms()[k]);
  }
  out += "],\"masses\":[";
  for (std::size_t k = 0; k < dist.size(); ++k) {
    if (k) out += ',';
    out += format_double(dist.masses()[k]);
  }
  out += "],\"label\":";
  out += nlohmann::json(std::string(label)).dump();
  out += '}';
  return out;
}

inline DiscreteDistribution distribution_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("atoms") || !j.contains("masses")) {
    throw Error(ErrorCode::kParseError, "distribution needs 'atoms' and 'masses'");
  }
  try {
    return DiscreteDistribution::create(j.at("atoms").get<std::vector<double>>(),
                                        j.at("masses").get<std::vector<double>>());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("distribution: ") + e.what());
  }
}

inline DiscreteDistribution parse_distribution_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, e.what());
  }
  return distribution_from_json(j);
}

namespace detail {

inline ScenarioConfig config_from_json(const nlohmann::json& j) {
  ScenarioConfig c;
  try {
    c.name = j.value("name", std::string("custom"));
    if (j.contains("dataset_paths")) {
      c.dataset_paths = j.at("dataset_paths").get<std::vector<std::string>>();
    } else {
      c.dataset_paths = {j.at("dataset_path").get<std::string>()};
    }
    c.x_attribute = j.at("x_attribute").get<std::string>();
    c.secret_attribute = j.at("secret_attribute").get<std::string>();
    c.value_i = j.at("value_i").get<std::string>();
    c.value_j = j.at("value_j").get<std::string>();
    if (j.contains("numeric_coding")) {
      c.numeric_coding = j.at("numeric_coding").get<std::map<std::string, double>>();
    }
    c.drop_missing = j.value("drop_missing", true);
    const std::string delimiter = j.value("delimiter", std::string(","));
    if (delimiter.size() != 1) throw Error(ErrorCode::kParseError, "delimiter must be one character");
    c.csv.delimiter = delimiter[0];
    if (j.contains("column_names")) {
      c.csv.column_names = j.at("column_names").get<std::vector<std::string>>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("scenario config: ") + e.what());
  }
  return c;
}

}  // namespace detail

// A scenario file is either
//   {"pairs": [{"label": ..., "p_i": {dist}, "p_j": {dist}}, ...]}  or
//   {"scenarios": [config, ...]}  or a single config object.
// Relative dataset paths resolve against `base_dir`.
inline ScenarioSet load_scenario_file(const std::filesystem::path& path,
                                      const std::filesystem::path& base_dir) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, path.string() + ": " + e.what());
  }
  std::vector<ScenarioPair> pairs;
  if (j.contains("pairs")) {
    std::size_t k = 0;
    for (const auto& p : j.at("pairs")) {
      const std::string label = p.value("label", "pair" + std::to_string(k));
      if (!p.contains("p_i") || !p.contains("p_j")) {
        throw Error(ErrorCode::kParseError, "pair '" + label + "' needs p_i and p_j");
      }
      pairs.push_back({distribution_from_json(p.at("p_i")), distribution_from_json(p.at("p_j")),
                       label});
      ++k;
    }
  } else if (j.contains("scenarios")) {
    for (const auto& c : j.at("scenarios")) {
      pairs.push_back(load_scenario(detail::config_from_json(c), base_dir));
    }
  } else {
    pairs.push_back(load_scenario(detail::config_from_json(j), base_dir));
  }
  return ScenarioSet::create(std::move(pairs));
}

}  // namespace puffercal

#endif  // PUFFERCAL_INGEST_HPP_
