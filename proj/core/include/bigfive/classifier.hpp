// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bigfive/encoder.hpp"
#include "bigfive/error.hpp"
#include "bigfive/layers.hpp"
#include "bigfive/message.hpp"
#include "bigfive/traits.hpp"

namespace bigfive {

/// TOGETHER: one 10-way head over a shared encoder.
/// SEPARATE: five binary models, each with its own copy of the encoder.
/// ADAPTER:  one frozen encoder plus five bottleneck adapters with binary heads.
enum class TrainingStrategy { TOGETHER, SEPARATE, ADAPTER };

std::string_view to_string(TrainingStrategy s) noexcept;
/// Accepts "TOGETHER"/"together" etc.
std::optional<TrainingStrategy> parse_strategy(std::string_view s) noexcept;

struct TrainConfig {
  int epochs = 50;
  int batch_size = 32;
  double learning_rate = 0.1;
  std::uint64_t seed = 0;
  TrainingStrategy strategy = TrainingStrategy::ADAPTER;
  OptimizerKind optimizer = OptimizerKind::SGD;
  std::size_t adapter_reduction = 16;  // bottleneck = dim / reduction
  std::size_t workers = 1;             // per-trait models trained concurrently

  void validate() const;
};

/// Unnormalised outputs for a trait and its opposite. Either may be negative.
struct RawTraitScore {
  double positive = 0.0;
  double negative = 0.0;

  bool operator==(const RawTraitScore&) const = default;
};

using TraitScores = TraitMap<RawTraitScore>;

/// Ties go to NEGATIVE.
constexpr Polarity decide_polarity(const RawTraitScore& s) noexcept {
  return s.positive > s.negative ? Polarity::POSITIVE : Polarity::NEGATIVE;
}

class BundleLoadError : public Error {
 public:
  using Error::Error;
};

/// Output of `train`. Immutable once built; scoring is safe from many threads.
class TrainedModelBundle {
 public:
  TrainedModelBundle(TrainedModelBundle&&) noexcept = default;
  TrainedModelBundle& operator=(TrainedModelBundle&&) noexcept = default;
  TrainedModelBundle clone() const;

  TrainingStrategy strategy() const noexcept { return strategy_; }
  const TrainConfig& config() const noexcept { return config_; }
  /// Hash of the training data; compare with `training_fingerprint`.
  const std::string& fingerprint() const noexcept { return fingerprint_; }
  /// Seed each per-trait model (or the single TOGETHER model) was trained with.
  const std::vector<std::uint64_t>& model_seeds() const noexcept { return model_seeds_; }
  std::string backbone_name() const;

  /// 1 for TOGETHER, 5 otherwise.
  std::size_t model_count() const noexcept { return heads_.size(); }
  /// Output width of each head: 10 for TOGETHER, 2 otherwise.
  std::size_t head_width() const noexcept;
  std::size_t adapter_bottleneck() const noexcept;
  std::size_t trainable_parameter_count() const;
  std::size_t total_parameter_count() const;

  /// The encoder that scores `trait` (shared except under SEPARATE).
  const EncoderBackbone& backbone(TraitDimension trait) const;

  /// All five traits. For ADAPTER the encoder runs once and every adapter
  /// reads the same representation.
  TraitScores score(std::string_view text) const;
  /// Runs the full path once per trait. Matches `score` for every strategy.
  TraitScores score_sequential(std::string_view text) const;

 private:
  TrainedModelBundle() = default;

  friend TrainedModelBundle train(std::span<const LabeledMessage>, const EncoderBackbone&,
                                  const TrainConfig&);
  friend TrainedModelBundle retrain_trait(const TrainedModelBundle&, TraitDimension,
                                          std::span<const LabeledMessage>,
                                          const EncoderBackbone&, const TrainConfig&);
  friend void save_bundle(const TrainedModelBundle&, const std::filesystem::path&);
  friend TrainedModelBundle load_bundle(const std::filesystem::path&);
  friend struct BundleAccess;

  RawTraitScore head_scores(std::size_t model, TraitDimension trait,
                            const Eigen::VectorXd& representation) const;

  TrainingStrategy strategy_ = TrainingStrategy::ADAPTER;
  TrainConfig config_;
  std::string fingerprint_;
  std::vector<std::uint64_t> model_seeds_;
  std::vector<std::unique_ptr<EncoderBackbone>> backbones_;  // 5 for SEPARATE, else 1
  std::vector<Adapter> adapters_;                            // ADAPTER only
  std::vector<LinearLayer> heads_;
};

/// Stable hash of (id, text, trait, polarity) over the messages, order-free.
std::string training_fingerprint(std::span<const LabeledMessage> messages);

/// Throws ContractViolation when the set is empty, has unlabeled or empty
/// messages, or lacks any of the ten (trait, polarity) classes.
void check_training_set(std::span<const LabeledMessage> messages);

/// Trains `config.strategy` on top of a copy of `backbone`. Deterministic for
/// a fixed seed. Under ADAPTER the copy is frozen; otherwise it is
/// fine-tuned when `backbone.trainable()`.
TrainedModelBundle train(std::span<const LabeledMessage> dataset, const EncoderBackbone& backbone,
                         const TrainConfig& config);

/// Re-trains one trait's model of a SEPARATE or ADAPTER bundle with
/// `config.seed`, leaving the other four untouched. `base` must be the
/// encoder the bundle was trained from.
TrainedModelBundle retrain_trait(const TrainedModelBundle& bundle, TraitDimension trait,
                                 std::span<const LabeledMessage> dataset,
                                 const EncoderBackbone& base, const TrainConfig& config);

/// Bundle file layout (all integers little-endian):
///
///   "B5BUNDLE"                  8-byte magic
///   u32 format version          currently 1
///   u64 N, then N bytes         JSON header: strategy, train config, backbone
///                               name and settings, fingerprint, model seeds
///   u32 block count
///   per block: u32 name length, name, u32 rows, u32 cols,
///              rows*cols IEEE-754 doubles in column-major order
///   u64 FNV-1a of every preceding byte
///
/// Block names are "<scope>/<layer>/<weight|bias>", where scope is empty,
/// "backbone" or a trait code. Loading checks magic, version, checksum and
/// that every expected block is present with the expected shape.
void save_bundle(const TrainedModelBundle& bundle, const std::filesystem::path& path);
TrainedModelBundle load_bundle(const std::filesystem::path& path);

inline constexpr std::uint32_t kBundleFormatVersion = 1;

}  // namespace bigfive
