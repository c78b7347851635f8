// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bigfive/annotation_record.hpp"
#include "bigfive/classifier.hpp"
#include "bigfive/datastore.hpp"
#include "bigfive/stats.hpp"

namespace bigfive {

/// SUM_OF_ABS (default): |positive| + |negative|.
/// ABS_DIFFERENCE: |positive - negative|, kept for sensitivity analysis.
enum class ProcessedOutputFormula { SUM_OF_ABS, ABS_DIFFERENCE };

std::string_view to_string(ProcessedOutputFormula f) noexcept;
std::optional<ProcessedOutputFormula> parse_formula(std::string_view s) noexcept;

/// Confidence scalar for one raw score pair. Throws ContractViolation on
/// non-finite input.
double processed_output(const RawTraitScore& score,
                        ProcessedOutputFormula formula = ProcessedOutputFormula::SUM_OF_ABS);

struct PredictionRecord {
  std::string message_id;
  TraitScores scores;
  TraitMap<Polarity> predicted_polarity;
  TraitMap<double> processed_output;

  bool operator==(const PredictionRecord&) const = default;
};

PredictionRecord make_prediction(std::string message_id, const TraitScores& scores,
                                 ProcessedOutputFormula formula = ProcessedOutputFormula::SUM_OF_ABS);

std::vector<PredictionRecord> predict(const TrainedModelBundle& bundle,
                                      std::span<const DatasetRecord> records,
                                      ProcessedOutputFormula formula = ProcessedOutputFormula::SUM_OF_ABS);

std::string to_json_line(const PredictionRecord& prediction);
PredictionRecord prediction_from_json(std::string_view line, std::size_t line_no = 0);
void save_predictions(std::span<const PredictionRecord> predictions, const std::filesystem::path& path);
std::vector<PredictionRecord> load_predictions(const std::filesystem::path& path);

enum class GoldProvenance { GENERATED, ANNOTATED };

/// Per-trait gold polarity. Generated messages are labeled for one trait
/// only; annotated messages for all five.
struct GoldLabel {
  std::string message_id;
  TraitMap<std::optional<Polarity>> polarity;
  GoldProvenance provenance = GoldProvenance::GENERATED;
};

/// Throws ContractViolation for an unlabeled message.
GoldLabel gold_from_message(const LabeledMessage& message);

/// Mean annotator rating at or above this threshold counts as POSITIVE.
inline constexpr double kPositiveThreshold = 5.5;

struct AnnotationSummary {
  GoldLabel gold;
  TraitMap<double> mean_rating;
  TraitMap<double> mean_difficulty;
  std::size_t annotators = 0;
};

/// Averages ratings and difficulty per message and trait, then thresholds the
/// mean rating. Throws ValidationError on out-of-range ratings.
std::map<std::string, AnnotationSummary> binarize_annotations(
    std::span<const AnnotationRecord> records);

/// One (model, dataset) row. An absent accuracy means no gold label existed
/// for that trait.
struct ReportRow {
  std::string model;
  std::string dataset;
  TraitMap<std::optional<double>> accuracy;
  TraitMap<std::size_t> counts;
  std::optional<double> average;  // mean of the present per-trait cells
};

struct EvaluationReport {
  std::vector<ReportRow> rows;
};

/// Per-trait accuracy of `predictions` against `golds`. Only golds whose
/// message id passes `include` (all, when empty) are counted; every counted
/// gold must have a prediction.
ReportRow accuracy_by_trait(std::span<const PredictionRecord> predictions,
                            std::span<const GoldLabel> golds, std::string model,
                            std::string dataset,
                            const std::function<bool(std::string_view)>& include = {});

/// Columns: model,dataset,EXT,AGR,OPE,CON,NEU,Avg,n_EXT,n_AGR,n_OPE,n_CON,n_NEU.
std::string report_to_csv(const EvaluationReport& report);
EvaluationReport report_from_csv(std::string_view csv);
/// Aligned plain-text table, three decimals, "-" for absent cells.
std::string report_to_text(const EvaluationReport& report);

/// Pearson r between mean annotator difficulty and processed output, per
/// trait, over messages that have both.
TraitMap<CorrelationResult> difficulty_correlation(
    std::span<const PredictionRecord> predictions,
    const std::map<std::string, AnnotationSummary>& annotations);

struct CorrelationRow {
  std::string model;
  TraitMap<CorrelationResult> by_trait;
};

/// Columns: model,trait,r,p,n,stars.
std::string correlations_to_csv(std::span<const CorrelationRow> rows);
std::vector<CorrelationRow> correlations_from_csv(std::string_view csv);
/// One row per model, one column per trait, cells like "-.12***".
std::string correlations_to_text(std::span<const CorrelationRow> rows);
/// r to two decimals without the leading zero, plus stars.
std::string format_correlation_cell(const CorrelationResult& c);

}  // namespace bigfive
