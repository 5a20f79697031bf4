#pragma once

// File formats: JSON scenario / mechanism / leakage-report documents and the
// CSV tables emitted by the experiment harness. Numeric formatting is fixed so
// repeated runs are byte-identical.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "pml/core.hpp"
#include "pml/experiments.hpp"
#include "pml/leakage.hpp"
#include "pml/optimizer.hpp"

namespace pml {

using json = nlohmann::json;

inline std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

inline RealTable real_table_from_json(const json& arr, const char* what) {
  if (!arr.is_array() || arr.empty() || !arr[0].is_array())
    throw std::invalid_argument(std::string(what) + ": expected a 2-D array");
  const std::size_t rows = arr.size(), cols = arr[0].size();
  RealTable table(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (!arr[i].is_array() || arr[i].size() != cols)
      throw std::invalid_argument(std::string(what) + ": ragged rows");
    for (std::size_t j = 0; j < cols; ++j) table(i, j) = arr[i][j].get<double>();
  }
  return table;
}

inline json real_table_to_json(const RealTable& table) {
  json arr = json::array();
  for (std::size_t i = 0; i < table.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < table.cols(); ++j) row.push_back(table(i, j));
    arr.push_back(std::move(row));
  }
  return arr;
}

inline Scenario scenario_from_json(const json& doc) {
  if (!doc.contains("prior")) throw std::invalid_argument("scenario: missing 'prior'");
  Prior prior(doc.at("prior").get<std::vector<double>>());

  const bool has_values = doc.contains("utility_values");
  const bool has_order = doc.contains("utility_order");
  if (!has_values && !has_order)
    throw std::invalid_argument("scenario: need 'utility_values' or 'utility_order'");

  std::optional<UtilityValues> values;
  if (has_values) values.emplace(real_table_from_json(doc.at("utility_values"), "utility_values"));

  std::optional<UtilityOrder> order;
  if (has_order) {
    const auto& arr = doc.at("utility_order");
    if (!arr.is_array() || arr.empty()) throw std::invalid_argument("utility_order: expected a 2-D array");
    IntTable table(arr.size(), arr[0].size());
    for (std::size_t i = 0; i < arr.size(); ++i) {
      if (!arr[i].is_array() || arr[i].size() != table.cols())
        throw std::invalid_argument("utility_order: ragged rows");
      for (std::size_t j = 0; j < table.cols(); ++j) table(i, j) = arr[i][j].get<int>();
    }
    order.emplace(std::move(table));
  }
  if (!order) order = order_from_values(*values);

  std::optional<Labels> labels;
  if (doc.contains("labels")) {
    Labels l;
    if (doc["labels"].contains("inputs"))
      l.inputs = doc["labels"]["inputs"].get<std::vector<std::string>>();
    if (doc["labels"].contains("outputs"))
      l.outputs = doc["labels"]["outputs"].get<std::vector<std::string>>();
    labels = std::move(l);
  }
  return Scenario(std::move(prior), std::move(*order), std::move(values), std::move(labels));
}

inline json scenario_to_json(const Scenario& scenario) {
  json doc;
  doc["prior"] = scenario.prior.probs();
  if (scenario.values) doc["utility_values"] = real_table_to_json(scenario.values->table());
  {
    json arr = json::array();
    for (std::size_t i = 0; i < scenario.order.inputs(); ++i) {
      json row = json::array();
      for (std::size_t j = 0; j < scenario.order.outputs(); ++j)
        row.push_back(scenario.order(i, j));
      arr.push_back(std::move(row));
    }
    doc["utility_order"] = std::move(arr);
  }
  if (scenario.labels) {
    doc["labels"] = {{"inputs", scenario.labels->inputs}, {"outputs", scenario.labels->outputs}};
  }
  return doc;
}

inline json mechanism_to_json(const Mechanism& mech, const std::string& builder = "",
                              const json& parameters = json::object()) {
  json doc;
  doc["probs"] = real_table_to_json(mech.table());
  if (!builder.empty()) doc["builder"] = builder;
  if (!parameters.empty()) doc["parameters"] = parameters;
  return doc;
}

inline Mechanism mechanism_from_json(const json& doc) {
  if (!doc.contains("probs")) throw std::invalid_argument("mechanism: missing 'probs'");
  return Mechanism(real_table_from_json(doc.at("probs"), "probs"));
}

inline json leakage_report_to_json(const LeakageReport& report) {
  json doc;
  json outputs = json::array();
  for (const auto& out : report.per_output) {
    outputs.push_back({{"output", out.output},
                       {"pml", out.pml},
                       {"support_term", out.support_term},
                       {"residual_term", out.residual_term},
                       {"input_support", out.input_support}});
  }
  doc["per_output"] = std::move(outputs);
  doc["worst_case"] = report.worst_case;
  doc["argmax_output"] = report.argmax_output;
  return doc;
}

inline json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("parse error in " + path + ": " + e.what());
  }
  return doc;
}

inline void save_json_file(const std::string& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << doc.dump(2) << "\n";
}

inline std::string fig1_csv(const std::vector<RunRecord>& records) {
  std::ostringstream os;
  os << "eps,mechanism,sample_min,det_min,clamped\n";
  for (const auto& r : records)
    os << format_real(r.eps) << "," << r.mechanism_name << "," << format_real(r.sample_min_utility)
       << "," << format_real(r.deterministic_min_utility) << "," << (r.clamped ? 1 : 0) << "\n";
  return os.str();
}

inline std::string sweep_csv(const std::vector<SweepRecord>& records) {
  std::ostringstream os;
  os << "p_min,h,mode,min_eps,naive\n";
  for (const auto& r : records) {
    os << format_real(r.p_min) << "," << r.h << "," << mode_name(r.mode) << ",";
    os << (r.failed ? "error" : format_real(r.min_eps));
    os << "," << (r.naive ? 1 : 0) << "\n";
  }
  return os.str();
}

inline std::string curve_csv(const std::vector<CurveEntry>& curve,
                             const std::vector<std::string>& witness_files) {
  std::ostringstream os;
  os << "h,min_eps_nats,mode,witness_file\n";
  for (std::size_t k = 0; k < curve.size(); ++k) {
    const auto& entry = curve[k];
    os << entry.h << ",";
    if (entry.point)
      os << format_real(entry.point->min_eps) << "," << mode_name(entry.point->mode);
    else
      os << "error,error";
    os << "," << (k < witness_files.size() ? witness_files[k] : "") << "\n";
  }
  return os.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << content;
}

}  // namespace pml
