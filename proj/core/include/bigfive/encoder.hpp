// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "bigfive/layers.hpp"

namespace bigfive {

/// Text encoder shared by all training strategies. `encode` must be
/// deterministic; `dim` never changes over the backbone's lifetime.
///
/// Fine-tuning goes through prepare/forward/backward: `prepare` caches the
/// per-text work that does not depend on parameters, and `backward`
/// accumulates into the gradients of `parameters()`. A backbone that cannot
/// be fine-tuned returns no parameters and reports `trainable() == false`.
class EncoderBackbone {
 public:
  struct Prepared {
    virtual ~Prepared() = default;
  };

  using Settings = std::map<std::string, std::string>;

  virtual ~EncoderBackbone() = default;

  virtual std::string name() const = 0;
  virtual std::size_t dim() const = 0;
  virtual bool trainable() const = 0;
  virtual void set_trainable(bool trainable) = 0;
  /// Everything needed to rebuild this backbone before loading parameters.
  virtual Settings settings() const = 0;
  virtual std::unique_ptr<EncoderBackbone> clone() const = 0;

  virtual std::unique_ptr<Prepared> prepare(std::string_view text) const = 0;
  virtual Eigen::VectorXd forward(const Prepared& input) const = 0;
  virtual void backward(const Prepared& input, const Eigen::VectorXd& grad_output) = 0;

  virtual std::vector<Parameter*> parameters() = 0;
  virtual std::vector<const Parameter*> parameters() const = 0;

  Eigen::VectorXd encode(std::string_view text) const { return forward(*prepare(text)); }
  std::size_t parameter_count() const;
};

struct SparseVector {
  std::vector<std::uint32_t> index;  // strictly increasing
  std::vector<double> value;
};

struct HashedNgramOptions {
  std::size_t buckets = 1024;
  std::size_t output_dim = 128;
  std::size_t min_n = 2;
  std::size_t max_n = 4;
  std::uint64_t seed = 0;
  double init_std = 1.0;
};

/// Reference desk-scale backbone: signed, hashed character n-grams of the
/// lower-cased text (L2-normalised, `buckets` wide) followed by an affine
/// projection to `output_dim`.
class HashedNgramEncoder final : public EncoderBackbone {
 public:
  static constexpr std::string_view kName = "hashed-ngram";

  explicit HashedNgramEncoder(HashedNgramOptions options = {});
  static std::unique_ptr<EncoderBackbone> from_settings(const Settings& settings);

  std::string name() const override { return std::string(kName); }
  std::size_t dim() const override { return options_.output_dim; }
  bool trainable() const override { return trainable_; }
  void set_trainable(bool trainable) override { trainable_ = trainable; }
  Settings settings() const override;
  std::unique_ptr<EncoderBackbone> clone() const override;

  std::unique_ptr<Prepared> prepare(std::string_view text) const override;
  Eigen::VectorXd forward(const Prepared& input) const override;
  void backward(const Prepared& input, const Eigen::VectorXd& grad_output) override;

  std::vector<Parameter*> parameters() override { return {&projection_.weight, &projection_.bias}; }
  std::vector<const Parameter*> parameters() const override {
    return {&projection_.weight, &projection_.bias};
  }

  /// The hashed feature vector on its own.
  SparseVector featurize(std::string_view text) const;
  const HashedNgramOptions& options() const noexcept { return options_; }

 private:
  HashedNgramOptions options_;
  LinearLayer projection_;
  bool trainable_ = true;
};

/// Builds a backbone skeleton from saved settings; parameters are filled in
/// afterwards by name.
using BackboneFactory =
    std::function<std::unique_ptr<EncoderBackbone>(const EncoderBackbone::Settings&)>;

/// Plug-in hook: makes bundles that use backbone `name` loadable.
void register_backbone(const std::string& name, BackboneFactory factory);
std::unique_ptr<EncoderBackbone> make_backbone(const std::string& name,
                                               const EncoderBackbone::Settings& settings);

}  // namespace bigfive
