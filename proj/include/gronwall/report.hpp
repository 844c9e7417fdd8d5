#pragma once

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "gronwall/estimate.hpp"

namespace gronwall {

inline constexpr int kReportSchemaVersion = 1;

inline void to_json(nlohmann::json& j, const Method& m) {
  j = nlohmann::json{
      {"kind", m.kind == EstimatorKind::Clt ? "clt" : "median-of-means"},
      {"blocks", m.blocks}};
}

inline void from_json(const nlohmann::json& j, Method& m) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "clt") {
    m.kind = EstimatorKind::Clt;
  } else if (kind == "median-of-means") {
    m.kind = EstimatorKind::MedianOfMeans;
  } else {
    throw std::invalid_argument("unknown estimator kind: " + kind);
  }
  m.blocks = j.at("blocks").get<std::size_t>();
}

inline void to_json(nlohmann::json& j, const EstimateWithCI& e) {
  j = nlohmann::json{{"mean", e.mean},
                     {"half_width", e.half_width},
                     {"n", e.n},
                     {"confidence", e.confidence},
                     {"method", e.method}};
}

inline void from_json(const nlohmann::json& j, EstimateWithCI& e) {
  j.at("mean").get_to(e.mean);
  j.at("half_width").get_to(e.half_width);
  j.at("n").get_to(e.n);
  j.at("confidence").get_to(e.confidence);
  j.at("method").get_to(e.method);
}

inline void to_json(nlohmann::json& j, const Verdict& v) {
  j = to_string(v);
}

inline void from_json(const nlohmann::json& j, Verdict& v) {
  const auto s = j.get<std::string>();
  if (s == "PASS") {
    v = Verdict::Pass;
  } else if (s == "FAIL") {
    v = Verdict::Fail;
  } else if (s == "INCONCLUSIVE") {
    v = Verdict::Inconclusive;
  } else {
    throw std::invalid_argument("unknown verdict: " + s);
  }
}

inline void to_json(nlohmann::json& j, const InequalityReport& r) {
  j = nlohmann::json{{"schema_version", kReportSchemaVersion},
                     {"name", r.name},
                     {"lhs", r.lhs},
                     {"rhs", r.rhs},
                     {"constant", r.constant},
                     {"margin", r.margin},
                     {"verdict", r.verdict},
                     {"bias_notes", r.bias_notes}};
}

inline void from_json(const nlohmann::json& j, InequalityReport& r) {
  j.at("name").get_to(r.name);
  j.at("lhs").get_to(r.lhs);
  j.at("rhs").get_to(r.rhs);
  j.at("constant").get_to(r.constant);
  j.at("margin").get_to(r.margin);
  j.at("verdict").get_to(r.verdict);
  j.at("bias_notes").get_to(r.bias_notes);
}

inline bool operator==(const Method& a, const Method& b) {
  return a.kind == b.kind && a.blocks == b.blocks;
}

inline bool operator==(const EstimateWithCI& a, const EstimateWithCI& b) {
  return a.mean == b.mean && a.half_width == b.half_width && a.n == b.n &&
         a.confidence == b.confidence && a.method == b.method;
}

inline bool operator==(const InequalityReport& a, const InequalityReport& b) {
  return a.name == b.name && a.lhs == b.lhs && a.rhs == b.rhs &&
         a.constant == b.constant && a.margin == b.margin &&
         a.verdict == b.verdict && a.bias_notes == b.bias_notes;
}

/// Shortest-round-trip decimal form, stable across runs.
inline std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

/// Column-labelled string table; the CSV surface of every experiment.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row) {
    if (row.size() != columns.size())
      throw std::invalid_argument("Table: row width mismatch");
    rows.push_back(std::move(row));
  }
};

inline std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline std::string to_csv(const Table& table) {
  std::string out;
  for (std::size_t j = 0; j < table.columns.size(); ++j) {
    if (j) out += ',';
    out += csv_escape(table.columns[j]);
  }
  out += "\r\n";
  for (const auto& row : table.rows) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out += ',';
      out += csv_escape(row[j]);
    }
    out += "\r\n";
  }
  return out;
}

inline void write_text_file(const std::string& path,
                            const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os << content;
  if (!os) throw std::runtime_error("write failed: " + path);
}

/// Flattens a report into a one-row table (CSV view of a report file).
inline Table report_table(const std::vector<InequalityReport>& reports) {
  Table t;
  t.columns = {"name",       "lhs_mean",  "lhs_half_width", "rhs_mean",
               "rhs_half_width", "constant", "margin",     "verdict",
               "n",          "bias_notes"};
  for (const auto& r : reports) {
    t.add_row({r.name, format_double(r.lhs.mean),
               format_double(r.lhs.half_width), format_double(r.rhs.mean),
               format_double(r.rhs.half_width), format_double(r.constant),
               format_double(r.margin), to_string(r.verdict),
               std::to_string(r.lhs.n), r.bias_notes});
  }
  return t;
}

}  // namespace gronwall
