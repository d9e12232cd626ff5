// Copyright 2026 The lyrnet Authors.
// SPDX-License-Identifier: Apache-2.0

#include "lyrnet/eval/report.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"
#include "lyrnet/error.hpp"

namespace lyrnet::eval {

using json = nlohmann::ordered_json;

TaskReport make_task_report(std::string task, std::vector<std::string> class_names,
                            const ConfusionMatrix& confusion) {
  if (class_names.size() != confusion.n_classes()) {
    throw ContractError("make_task_report: class names do not match confusion matrix");
  }
  TaskReport r;
  r.task = std::move(task);
  r.class_names = std::move(class_names);
  r.per_class = per_class_metrics(confusion);
  r.accuracy = accuracy(confusion);
  r.macro_precision = macro_precision(confusion);
  r.macro_recall = macro_recall(confusion);
  r.macro_f1 = macro_f1(confusion);
  r.micro_precision = micro_precision(confusion);
  r.micro_recall = micro_recall(confusion);
  r.micro_f1 = micro_f1(confusion);
  r.n_examples = confusion.total();
  r.confusion = confusion;
  return r;
}

const TaskReport& EvaluationReport::task(std::string_view name) const {
  for (const auto& t : tasks) {
    if (t.task == name) return t;
  }
  throw ContractError("report has no task '" + std::string(name) + "'");
}

namespace {

json task_to_json(const TaskReport& t) {
  json j;
  j["task"] = t.task;
  j["n_examples"] = t.n_examples;
  j["accuracy"] = t.accuracy;
  j["macro_precision"] = t.macro_precision;
  j["macro_recall"] = t.macro_recall;
  j["macro_f1"] = t.macro_f1;
  j["micro_precision"] = t.micro_precision;
  j["micro_recall"] = t.micro_recall;
  j["micro_f1"] = t.micro_f1;
  json classes = json::array();
  for (std::size_t c = 0; c < t.per_class.size(); ++c) {
    json pc;
    pc["class"] = t.class_names[c];
    pc["precision"] = t.per_class[c].precision;
    pc["recall"] = t.per_class[c].recall;
    pc["f1"] = t.per_class[c].f1;
    pc["support"] = t.per_class[c].support;
    classes.push_back(std::move(pc));
  }
  j["per_class"] = std::move(classes);
  json rows = json::array();
  const std::size_t n = t.confusion.n_classes();
  for (std::size_t g = 0; g < n; ++g) {
    json row = json::array();
    for (std::size_t p = 0; p < n; ++p) row.push_back(t.confusion.count(g, p));
    rows.push_back(std::move(row));
  }
  j["confusion"] = std::move(rows);
  return j;
}

TaskReport task_from_json(const json& j) {
  TaskReport t;
  t.task = j.at("task").get<std::string>();
  t.n_examples = j.at("n_examples").get<std::size_t>();
  t.accuracy = j.at("accuracy").get<double>();
  t.macro_precision = j.at("macro_precision").get<double>();
  t.macro_recall = j.at("macro_recall").get<double>();
  t.macro_f1 = j.at("macro_f1").get<double>();
  t.micro_precision = j.at("micro_precision").get<double>();
  t.micro_recall = j.at("micro_recall").get<double>();
  t.micro_f1 = j.at("micro_f1").get<double>();
  for (const auto& pc : j.at("per_class")) {
    t.class_names.push_back(pc.at("class").get<std::string>());
    t.per_class.push_back({pc.at("precision").get<double>(), pc.at("recall").get<double>(),
                           pc.at("f1").get<double>(), pc.at("support").get<std::size_t>()});
  }
  const auto& rows = j.at("confusion");
  t.confusion = ConfusionMatrix(rows.size());
  for (std::size_t g = 0; g < rows.size(); ++g) {
    if (rows[g].size() != rows.size()) throw DataError("report: confusion matrix is not square");
    for (std::size_t p = 0; p < rows.size(); ++p) {
      const auto c = rows[g][p].get<std::size_t>();
      if (c > 0) t.confusion.add(g, p, c);
    }
  }
  return t;
}

}  // namespace

std::string to_json(const EvaluationReport& report) {
  json j;
  j["n_examples"] = report.n_examples;
  j["agreement_rate"] = report.agreement_rate;
  json summary = json::object();
  for (const auto& t : report.tasks) {
    json s;
    s["accuracy"] = t.accuracy;
    s["precision"] = t.macro_precision;
    s["recall"] = t.macro_recall;
    s["macro_f1"] = t.macro_f1;
    summary[t.task] = std::move(s);
  }
  j["summary"] = std::move(summary);
  json tasks = json::array();
  for (const auto& t : report.tasks) tasks.push_back(task_to_json(t));
  j["tasks"] = std::move(tasks);
  return j.dump(2) + "\n";
}

EvaluationReport report_from_json(std::string_view text) {
  try {
    const json j = json::parse(text);
    EvaluationReport r;
    r.n_examples = j.at("n_examples").get<std::size_t>();
    r.agreement_rate = j.at("agreement_rate").get<double>();
    for (const auto& t : j.at("tasks")) r.tasks.push_back(task_from_json(t));
    return r;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed evaluation report: ") + e.what());
  }
}

const MetricStats& AggregatedReport::get(std::string_view task, std::string_view metric) const {
  for (const auto& m : metrics) {
    if (m.task == task && m.metric == metric) return m.stats;
  }
  throw ContractError("aggregated report has no " + std::string(task) + "." + std::string(metric));
}

namespace {

// Values are sorted first so the result does not depend on report order.
MetricStats stats_of(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= static_cast<double>(values.size());
  return {mean, std::sqrt(var)};
}

}  // namespace

AggregatedReport multi_split_average(std::span<const EvaluationReport> reports) {
  if (reports.empty()) throw ContractError("multi_split_average: no reports");
  const auto& first = reports.front();
  for (const auto& r : reports) {
    bool same = r.tasks.size() == first.tasks.size();
    for (std::size_t t = 0; same && t < r.tasks.size(); ++t) {
      same = r.tasks[t].task == first.tasks[t].task &&
             r.tasks[t].class_names == first.tasks[t].class_names;
    }
    if (!same) throw ContractError("multi_split_average: reports have mismatched task structures");
  }

  using Getter = double TaskReport::*;
  const std::pair<const char*, Getter> fields[] = {
      {"accuracy", &TaskReport::accuracy},       {"precision", &TaskReport::macro_precision},
      {"recall", &TaskReport::macro_recall},     {"macro_f1", &TaskReport::macro_f1},
      {"micro_f1", &TaskReport::micro_f1},
  };
  AggregatedReport out;
  out.n_reports = reports.size();
  for (std::size_t t = 0; t < first.tasks.size(); ++t) {
    for (const auto& [name, field] : fields) {
      std::vector<double> values;
      for (const auto& r : reports) values.push_back(r.tasks[t].*field);
      out.metrics.push_back({first.tasks[t].task, name, stats_of(values)});
    }
  }
  std::vector<double> agreement;
  for (const auto& r : reports) agreement.push_back(r.agreement_rate);
  out.agreement_rate = stats_of(agreement);
  return out;
}

std::string to_json(const AggregatedReport& report) {
  json j;
  j["n_reports"] = report.n_reports;
  json tasks = json::object();
  for (const auto& m : report.metrics) {
    tasks[m.task][m.metric] = {{"mean", m.stats.mean}, {"std", m.stats.stddev}};
  }
  j["tasks"] = std::move(tasks);
  j["agreement_rate"] = {{"mean", report.agreement_rate.mean}, {"std", report.agreement_rate.stddev}};
  return j.dump(2) + "\n";
}

}  // namespace lyrnet::eval
