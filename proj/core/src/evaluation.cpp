// SPDX-License-Identifier: Apache-2.0

#include "bigfive/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <unordered_map>

#include <json.hpp>

#include "text_util.hpp"

namespace bigfive {

using ojson = nlohmann::ordered_json;

std::string_view to_string(ProcessedOutputFormula f) noexcept {
  return f == ProcessedOutputFormula::SUM_OF_ABS ? "sum_of_abs" : "abs_difference";
}

std::optional<ProcessedOutputFormula> parse_formula(std::string_view s) noexcept {
  if (s == "sum_of_abs") return ProcessedOutputFormula::SUM_OF_ABS;
  if (s == "abs_difference") return ProcessedOutputFormula::ABS_DIFFERENCE;
  return std::nullopt;
}

double processed_output(const RawTraitScore& s, ProcessedOutputFormula formula) {
  if (!std::isfinite(s.positive) || !std::isfinite(s.negative)) {
    throw ContractViolation("processed_output needs finite scores");
  }
  if (formula == ProcessedOutputFormula::ABS_DIFFERENCE) return std::fabs(s.positive - s.negative);
  return std::fabs(s.positive) + std::fabs(s.negative);
}

PredictionRecord make_prediction(std::string message_id, const TraitScores& scores,
                                 ProcessedOutputFormula formula) {
  PredictionRecord p;
  p.message_id = std::move(message_id);
  p.scores = scores;
  for (auto t : kAllTraits) {
    p.predicted_polarity[t] = decide_polarity(scores[t]);
    p.processed_output[t] = processed_output(scores[t], formula);
  }
  return p;
}

std::vector<PredictionRecord> predict(const TrainedModelBundle& bundle,
                                      std::span<const DatasetRecord> records,
                                      ProcessedOutputFormula formula) {
  std::vector<PredictionRecord> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    out.push_back(make_prediction(r.message.id, bundle.score(r.message.text), formula));
  }
  return out;
}

std::string to_json_line(const PredictionRecord& p) {
  ojson scores = ojson::object(), predicted = ojson::object(), processed = ojson::object();
  for (auto t : kAllTraits) {
    const std::string key(to_string(t));
    scores[key] = {p.scores[t].positive, p.scores[t].negative};
    predicted[key] = to_string(p.predicted_polarity[t]);
    processed[key] = p.processed_output[t];
  }
  ojson j;
  j["message_id"] = p.message_id;
  j["scores"] = std::move(scores);
  j["predicted_polarity"] = std::move(predicted);
  j["processed_output"] = std::move(processed);
  return j.dump();
}

PredictionRecord prediction_from_json(std::string_view line, std::size_t line_no) {
  try {
    const ojson j = ojson::parse(line);
    PredictionRecord p;
    p.message_id = j.at("message_id").get<std::string>();
    for (auto t : kAllTraits) {
      const std::string key(to_string(t));
      const auto& s = j.at("scores").at(key);
      p.scores[t] = {s.at(0).get<double>(), s.at(1).get<double>()};
      auto pol = parse_polarity(j.at("predicted_polarity").at(key).get<std::string>());
      if (!pol) throw ParseError("bad predicted_polarity." + key, line_no);
      p.predicted_polarity[t] = *pol;
      p.processed_output[t] = j.at("processed_output").at(key).get<double>();
    }
    return p;
  } catch (const ojson::exception& e) {
    throw ParseError(std::string("bad prediction record: ") + e.what(), line_no);
  }
}

void save_predictions(std::span<const PredictionRecord> predictions,
                      const std::filesystem::path& path) {
  std::string out;
  for (const auto& p : predictions) {
    out += to_json_line(p);
    out += '\n';
  }
  detail::write_file_atomic(path, out);
}

std::vector<PredictionRecord> load_predictions(const std::filesystem::path& path) {
  const std::string raw = detail::read_file(path);
  std::vector<PredictionRecord> out;
  std::size_t line_no = 0;
  for (auto line : detail::split_lines(raw)) {
    ++line_no;
    if (!detail::trim(line).empty()) out.push_back(prediction_from_json(line, line_no));
  }
  return out;
}

GoldLabel gold_from_message(const LabeledMessage& m) {
  if (!m.labeled()) throw ContractViolation("message '" + m.id + "' has no gold label");
  GoldLabel g;
  g.message_id = m.id;
  g.polarity[*m.trait] = *m.polarity;
  g.provenance = GoldProvenance::GENERATED;
  return g;
}

std::map<std::string, AnnotationSummary> binarize_annotations(
    std::span<const AnnotationRecord> records) {
  struct Sums {
    TraitMap<double> rating{0.0};
    TraitMap<double> difficulty{0.0};
    std::size_t n = 0;
  };
  std::map<std::string, Sums> sums;
  for (const auto& r : records) {
    validate(r);
    auto& s = sums[r.message_id];
    for (auto t : kAllTraits) {
      s.rating[t] += r.ratings[t];
      s.difficulty[t] += r.difficulty[t];
    }
    ++s.n;
  }

  std::map<std::string, AnnotationSummary> out;
  for (const auto& [id, s] : sums) {
    AnnotationSummary a;
    a.annotators = s.n;
    a.gold.message_id = id;
    a.gold.provenance = GoldProvenance::ANNOTATED;
    const double n = static_cast<double>(s.n);
    for (auto t : kAllTraits) {
      a.mean_rating[t] = s.rating[t] / n;
      a.mean_difficulty[t] = s.difficulty[t] / n;
      a.gold.polarity[t] =
          a.mean_rating[t] >= kPositiveThreshold ? Polarity::POSITIVE : Polarity::NEGATIVE;
    }
    out.emplace(id, std::move(a));
  }
  return out;
}

ReportRow accuracy_by_trait(std::span<const PredictionRecord> predictions,
                            std::span<const GoldLabel> golds, std::string model,
                            std::string dataset,
                            const std::function<bool(std::string_view)>& include) {
  std::unordered_map<std::string_view, const PredictionRecord*> by_id;
  by_id.reserve(predictions.size());
  for (const auto& p : predictions) by_id.emplace(p.message_id, &p);

  TraitMap<std::size_t> correct(0), total(0);
  for (const auto& g : golds) {
    if (include && !include(g.message_id)) continue;
    auto it = by_id.find(g.message_id);
    if (it == by_id.end()) {
      throw ContractViolation("no prediction for gold message '" + g.message_id + "'");
    }
    for (auto t : kAllTraits) {
      if (!g.polarity[t]) continue;
      ++total[t];
      if (it->second->predicted_polarity[t] == *g.polarity[t]) ++correct[t];
    }
  }

  ReportRow row;
  row.model = std::move(model);
  row.dataset = std::move(dataset);
  row.counts = total;
  double sum = 0.0;
  std::size_t present = 0;
  for (auto t : kAllTraits) {
    if (total[t] == 0) continue;
    row.accuracy[t] = static_cast<double>(correct[t]) / static_cast<double>(total[t]);
    sum += *row.accuracy[t];
    ++present;
  }
  if (present > 0) row.average = sum / static_cast<double>(present);
  return row;
}

namespace {

constexpr std::string_view kReportHeader =
    "model,dataset,EXT,AGR,OPE,CON,NEU,Avg,n_EXT,n_AGR,n_OPE,n_CON,n_NEU";

std::string cell(const std::optional<double>& v) {
  return v ? detail::format_double(*v) : std::string{};
}

std::string fixed3(const std::optional<double>& v) {
  if (!v) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", *v);
  return buf;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

std::string pad_left(std::string s, std::size_t width) {
  if (s.size() < width) s.insert(0, width - s.size(), ' ');
  return s;
}

}  // namespace

std::string report_to_csv(const EvaluationReport& report) {
  std::string out(kReportHeader);
  out += '\n';
  for (const auto& row : report.rows) {
    out += detail::csv_field(row.model) + ',' + detail::csv_field(row.dataset);
    for (auto t : kAllTraits) out += ',' + cell(row.accuracy[t]);
    out += ',' + cell(row.average);
    for (auto t : kAllTraits) out += ',' + std::to_string(row.counts[t]);
    out += '\n';
  }
  return out;
}

EvaluationReport report_from_csv(std::string_view csv) {
  EvaluationReport report;
  const auto lines = detail::split_lines(csv);
  if (lines.empty() || detail::trim(lines[0]) != kReportHeader) {
    throw ParseError("report CSV must start with header '" + std::string(kReportHeader) + "'", 1);
  }
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (detail::trim(lines[i]).empty()) continue;
    const auto f = detail::parse_csv_line(lines[i]);
    if (f.size() != 13) throw ParseError("expected 13 columns", i + 1);
    try {
      ReportRow row;
      row.model = f[0];
      row.dataset = f[1];
      for (std::size_t k = 0; k < kTraitCount; ++k) {
        if (!f[2 + k].empty()) row.accuracy[kAllTraits[k]] = detail::parse_double(f[2 + k]);
        row.counts[kAllTraits[k]] = static_cast<std::size_t>(std::stoull(f[8 + k]));
      }
      if (!f[7].empty()) row.average = detail::parse_double(f[7]);
      report.rows.push_back(std::move(row));
    } catch (const ParseError& e) {
      throw ParseError(e.what(), i + 1);
    } catch (const std::exception& e) {
      throw ParseError(std::string("bad count: ") + e.what(), i + 1);
    }
  }
  return report;
}

std::string report_to_text(const EvaluationReport& report) {
  std::size_t model_w = 5, dataset_w = 7;
  for (const auto& row : report.rows) {
    model_w = std::max(model_w, row.model.size());
    dataset_w = std::max(dataset_w, row.dataset.size());
  }
  std::string out = pad("Model", model_w) + "  " + pad("Dataset", dataset_w);
  for (auto t : kAllTraits) out += "  " + pad_left(std::string(to_string(t)), 5);
  out += "  " + pad_left("Avg", 5) + "\n";
  for (const auto& row : report.rows) {
    out += pad(row.model, model_w) + "  " + pad(row.dataset, dataset_w);
    for (auto t : kAllTraits) out += "  " + pad_left(fixed3(row.accuracy[t]), 5);
    out += "  " + pad_left(fixed3(row.average), 5) + "\n";
  }
  return out;
}

TraitMap<CorrelationResult> difficulty_correlation(
    std::span<const PredictionRecord> predictions,
    const std::map<std::string, AnnotationSummary>& annotations) {
  TraitMap<std::vector<double>> difficulty, confidence;
  for (const auto& p : predictions) {
    auto it = annotations.find(p.message_id);
    if (it == annotations.end()) continue;
    for (auto t : kAllTraits) {
      difficulty[t].push_back(it->second.mean_difficulty[t]);
      confidence[t].push_back(p.processed_output[t]);
    }
  }
  TraitMap<CorrelationResult> out;
  for (auto t : kAllTraits) {
    try {
      out[t] = pearson(difficulty[t], confidence[t]);
    } catch (const StatisticsError& e) {
      throw StatisticsError(std::string(to_string(t)) + ": " + e.what());
    }
  }
  return out;
}

std::string format_correlation_cell(const CorrelationResult& c) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", c.r);
  std::string s = buf;
  if (s.starts_with("0.")) s.erase(0, 1);
  else if (s.starts_with("-0.")) s.erase(1, 1);
  if (s == "-.00") s = ".00";
  return s + significance_stars(c.p_value);
}

std::string correlations_to_csv(std::span<const CorrelationRow> rows) {
  std::string out = "model,trait,r,p,n,stars\n";
  for (const auto& row : rows) {
    for (auto t : kAllTraits) {
      const auto& c = row.by_trait[t];
      out += detail::csv_field(row.model) + ',' + std::string(to_string(t)) + ',' +
             detail::format_double(c.r) + ',' + detail::format_double(c.p_value) + ',' +
             std::to_string(c.n) + ',' + significance_stars(c.p_value) + '\n';
    }
  }
  return out;
}

std::vector<CorrelationRow> correlations_from_csv(std::string_view csv) {
  const auto lines = detail::split_lines(csv);
  if (lines.empty() || detail::trim(lines[0]) != "model,trait,r,p,n,stars") {
    throw ParseError("correlation CSV must start with header 'model,trait,r,p,n,stars'", 1);
  }
  std::vector<CorrelationRow> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (detail::trim(lines[i]).empty()) continue;
    const auto f = detail::parse_csv_line(lines[i]);
    if (f.size() != 6) throw ParseError("expected 6 columns", i + 1);
    const auto trait = parse_trait(f[1]);
    if (!trait) throw ParseError("unknown trait '" + f[1] + "'", i + 1);
    if (rows.empty() || rows.back().model != f[0]) rows.push_back({f[0], {}});
    try {
      rows.back().by_trait[*trait] = {detail::parse_double(f[2]), detail::parse_double(f[3]),
                                      static_cast<std::size_t>(std::stoull(f[4]))};
    } catch (const std::exception& e) {
      throw ParseError(e.what(), i + 1);
    }
  }
  return rows;
}

std::string correlations_to_text(std::span<const CorrelationRow> rows) {
  std::size_t model_w = 5;
  for (const auto& row : rows) model_w = std::max(model_w, row.model.size());
  std::string out = pad("Model", model_w);
  for (auto t : kAllTraits) out += "  " + pad_left(std::string(to_string(t)), 8);
  out += '\n';
  for (const auto& row : rows) {
    out += pad(row.model, model_w);
    for (auto t : kAllTraits) out += "  " + pad_left(format_correlation_cell(row.by_trait[t]), 8);
    out += '\n';
  }
  out += "Note: *** p < .001, ** p < 0.01\n";
  return out;
}

}  // namespace bigfive
