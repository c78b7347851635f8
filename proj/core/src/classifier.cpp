// SPDX-License-Identifier: Apache-2.0

#include "bigfive/classifier.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <thread>

#include "bigfive/rng.hpp"
#include "text_util.hpp"

namespace bigfive {

std::string_view to_string(TrainingStrategy s) noexcept {
  switch (s) {
    case TrainingStrategy::TOGETHER: return "TOGETHER";
    case TrainingStrategy::SEPARATE: return "SEPARATE";
    case TrainingStrategy::ADAPTER: return "ADAPTER";
  }
  return "?";
}

std::optional<TrainingStrategy> parse_strategy(std::string_view s) noexcept {
  const std::string lower = detail::lowercase_ascii(s);
  if (lower == "together") return TrainingStrategy::TOGETHER;
  if (lower == "separate") return TrainingStrategy::SEPARATE;
  if (lower == "adapter") return TrainingStrategy::ADAPTER;
  return std::nullopt;
}

void TrainConfig::validate() const {
  if (epochs < 1) throw ContractViolation("epochs must be >= 1");
  if (batch_size < 1) throw ContractViolation("batch_size must be >= 1");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw ContractViolation("learning_rate must be a positive finite number");
  }
  if (adapter_reduction < 1) throw ContractViolation("adapter_reduction must be >= 1");
}

std::string training_fingerprint(std::span<const LabeledMessage> messages) {
  std::vector<std::string> lines;
  lines.reserve(messages.size());
  for (const auto& m : messages) {
    std::string line = m.id;
    line += '\t';
    line += m.text;
    line += '\t';
    line += m.trait ? to_string(*m.trait) : "-";
    line += '\t';
    line += m.polarity ? to_string(*m.polarity) : "-";
    lines.push_back(std::move(line));
  }
  std::sort(lines.begin(), lines.end());
  std::uint64_t h = fnv1a64("");
  for (const auto& line : lines) {
    h = fnv1a64(line, h);
    h = fnv1a64("\n", h);
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void check_training_set(std::span<const LabeledMessage> messages) {
  if (messages.empty()) throw ContractViolation("training set is empty");
  std::array<bool, kClassCount> seen{};
  for (const auto& m : messages) {
    if (!m.labeled()) throw ContractViolation("message '" + m.id + "' has no label");
    if (detail::trim(m.text).empty()) throw ContractViolation("message '" + m.id + "' is empty");
    seen[class_index(*m.trait, *m.polarity)] = true;
  }
  std::string missing;
  for (auto t : kAllTraits) {
    for (auto p : kAllPolarities) {
      if (seen[class_index(t, p)]) continue;
      if (!missing.empty()) missing += ", ";
      missing += std::string(to_string(t)) + "/" + std::string(to_string(p));
    }
  }
  if (!missing.empty()) throw ContractViolation("training set lacks classes: " + missing);
}

namespace {

double head_init_std(std::size_t dim) { return 1.0 / std::sqrt(static_cast<double>(dim)); }

/// Mini-batch loop shared by every strategy. `accumulate(i)` runs forward and
/// backward for example i, adding into the parameters' gradients.
template <typename Accumulate>
void fit(std::size_t n, const TrainConfig& cfg, std::uint64_t seed,
         const std::vector<Parameter*>& params, Accumulate&& accumulate) {
  Optimizer optimizer(cfg.optimizer, cfg.learning_rate);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(mix_seed(seed, "shuffle"));
  for (Parameter* p : params) p->zero_grad();

  const auto batch = static_cast<std::size_t>(cfg.batch_size);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t end = std::min(n, start + batch);
      for (std::size_t i = start; i < end; ++i) accumulate(order[i]);
      optimizer.step(params, 1.0 / static_cast<double>(end - start));
    }
  }
}

std::vector<std::unique_ptr<EncoderBackbone::Prepared>> prepare_all(
    const EncoderBackbone& bb, std::span<const LabeledMessage> data,
    std::span<const std::size_t> rows) {
  std::vector<std::unique_ptr<EncoderBackbone::Prepared>> out;
  out.reserve(rows.size());
  for (auto r : rows) out.push_back(bb.prepare(data[r].text));
  return out;
}

/// Encoder + head, optionally fine-tuning the encoder.
void fit_encoder_head(EncoderBackbone& bb, LinearLayer& head, std::span<const LabeledMessage> data,
                      std::span<const std::size_t> rows, std::span<const std::size_t> targets,
                      const TrainConfig& cfg, std::uint64_t seed) {
  const auto prepared = prepare_all(bb, data, rows);
  std::vector<Parameter*> params{&head.weight, &head.bias};
  const bool tune = bb.trainable();
  Eigen::VectorXd grad;

  if (tune) {
    for (Parameter* p : bb.parameters()) params.push_back(p);
    fit(rows.size(), cfg, seed, params, [&](std::size_t i) {
      const Eigen::VectorXd h = bb.forward(*prepared[i]);
      softmax_cross_entropy(head.forward(h), targets[i], grad);
      bb.backward(*prepared[i], head.backward(h, grad));
    });
  } else {
    std::vector<Eigen::VectorXd> reps;
    reps.reserve(rows.size());
    for (const auto& p : prepared) reps.push_back(bb.forward(*p));
    fit(rows.size(), cfg, seed, params, [&](std::size_t i) {
      softmax_cross_entropy(head.forward(reps[i]), targets[i], grad);
      head.backward(reps[i], grad);
    });
  }
}

void fit_adapter_head(Adapter& adapter, LinearLayer& head, std::span<const Eigen::VectorXd> reps,
                      std::span<const std::size_t> rows, std::span<const std::size_t> targets,
                      const TrainConfig& cfg, std::uint64_t seed) {
  std::vector<Parameter*> params{&adapter.down.weight, &adapter.down.bias, &adapter.up.weight,
                                 &adapter.up.bias,     &head.weight,       &head.bias};
  Eigen::VectorXd grad;
  Adapter::Cache cache;
  fit(rows.size(), cfg, seed, params, [&](std::size_t i) {
    const Eigen::VectorXd z = adapter.forward(reps[rows[i]], &cache);
    softmax_cross_entropy(head.forward(z), targets[i], grad);
    adapter.backward(cache, head.backward(z, grad));
  });
}

struct TraitSubset {
  std::vector<std::size_t> rows;
  std::vector<std::size_t> targets;  // 0 = POSITIVE, 1 = NEGATIVE
};

TraitSubset subset_for(std::span<const LabeledMessage> data, TraitDimension trait) {
  TraitSubset s;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data[i].trait == trait) {
      s.rows.push_back(i);
      s.targets.push_back(index_of(*data[i].polarity));
    }
  }
  return s;
}

std::uint64_t trait_model_seed(std::uint64_t seed, TrainingStrategy strategy, TraitDimension t) {
  return mix_seed(seed, std::string(to_string(strategy)) + "/" + std::string(to_string(t)));
}

std::string scope(TraitDimension t) { return std::string(to_string(t)); }

template <typename Fn>
void for_each_trait(std::size_t workers, Fn&& fn) {
  if (workers <= 1) {
    for (auto t : kAllTraits) fn(t);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(kTraitCount);
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < std::min(workers, kTraitCount); ++w) {
      pool.emplace_back([&] {
        for (std::size_t i; (i = next.fetch_add(1)) < kTraitCount;) {
          try {
            fn(kAllTraits[i]);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

std::string TrainedModelBundle::backbone_name() const { return backbones_.front()->name(); }

std::size_t TrainedModelBundle::head_width() const noexcept {
  return heads_.empty() ? 0 : heads_.front().out_dim();
}

std::size_t TrainedModelBundle::adapter_bottleneck() const noexcept {
  return adapters_.empty() ? 0 : adapters_.front().bottleneck();
}

std::size_t TrainedModelBundle::trainable_parameter_count() const {
  std::size_t n = 0;
  for (const auto& h : heads_) n += h.parameter_count();
  for (const auto& a : adapters_) n += a.parameter_count();
  if (strategy_ != TrainingStrategy::ADAPTER) {
    for (const auto& bb : backbones_) {
      if (bb->trainable()) n += bb->parameter_count();
    }
  }
  return n;
}

std::size_t TrainedModelBundle::total_parameter_count() const {
  std::size_t n = 0;
  for (const auto& h : heads_) n += h.parameter_count();
  for (const auto& a : adapters_) n += a.parameter_count();
  for (const auto& bb : backbones_) n += bb->parameter_count();
  return n;
}

const EncoderBackbone& TrainedModelBundle::backbone(TraitDimension trait) const {
  return strategy_ == TrainingStrategy::SEPARATE ? *backbones_[index_of(trait)] : *backbones_[0];
}

TrainedModelBundle TrainedModelBundle::clone() const {
  TrainedModelBundle b;
  b.strategy_ = strategy_;
  b.config_ = config_;
  b.fingerprint_ = fingerprint_;
  b.model_seeds_ = model_seeds_;
  for (const auto& bb : backbones_) b.backbones_.push_back(bb->clone());
  b.adapters_ = adapters_;
  b.heads_ = heads_;
  return b;
}

RawTraitScore TrainedModelBundle::head_scores(std::size_t model, TraitDimension trait,
                                              const Eigen::VectorXd& representation) const {
  const Eigen::VectorXd out = heads_[model].forward(representation);
  if (strategy_ == TrainingStrategy::TOGETHER) {
    const auto pos = static_cast<Eigen::Index>(class_index(trait, Polarity::POSITIVE));
    const auto neg = static_cast<Eigen::Index>(class_index(trait, Polarity::NEGATIVE));
    return {out[pos], out[neg]};
  }
  return {out[0], out[1]};
}

TraitScores TrainedModelBundle::score(std::string_view text) const {
  if (detail::trim(text).empty()) throw ContractViolation("cannot score empty text");
  TraitScores out;
  switch (strategy_) {
    case TrainingStrategy::TOGETHER: {
      const Eigen::VectorXd h = backbones_[0]->encode(text);
      for (auto t : kAllTraits) out[t] = head_scores(0, t, h);
      break;
    }
    case TrainingStrategy::SEPARATE:
      for (auto t : kAllTraits) {
        out[t] = head_scores(index_of(t), t, backbones_[index_of(t)]->encode(text));
      }
      break;
    case TrainingStrategy::ADAPTER: {
      const Eigen::VectorXd h = backbones_[0]->encode(text);
      for (auto t : kAllTraits) {
        out[t] = head_scores(index_of(t), t, adapters_[index_of(t)].forward(h));
      }
      break;
    }
  }
  return out;
}

TraitScores TrainedModelBundle::score_sequential(std::string_view text) const {
  if (strategy_ != TrainingStrategy::ADAPTER) return score(text);
  if (detail::trim(text).empty()) throw ContractViolation("cannot score empty text");
  TraitScores out;
  for (auto t : kAllTraits) {
    const Eigen::VectorXd h = backbones_[0]->encode(text);
    out[t] = head_scores(index_of(t), t, adapters_[index_of(t)].forward(h));
  }
  return out;
}

namespace {

/// Trains the per-trait pieces of a SEPARATE or ADAPTER bundle into `slot`.
struct TraitTrainer {
  TrainingStrategy strategy;
  std::span<const LabeledMessage> data;
  const EncoderBackbone* base;             // SEPARATE
  std::span<const Eigen::VectorXd> reps;   // ADAPTER, one per message
  std::size_t dim;
  const TrainConfig& cfg;

  void operator()(TraitDimension t, std::uint64_t seed, std::unique_ptr<EncoderBackbone>* bb_slot,
                  Adapter* adapter_slot, LinearLayer& head_slot) const {
    const TraitSubset subset = subset_for(data, t);
    Rng init(mix_seed(seed, "init"));
    if (strategy == TrainingStrategy::SEPARATE) {
      auto bb = base->clone();
      LinearLayer head(scope(t) + "/head", dim, 2, head_init_std(dim), init);
      fit_encoder_head(*bb, head, data, subset.rows, subset.targets, cfg, seed);
      *bb_slot = std::move(bb);
      head_slot = std::move(head);
    } else {
      const std::size_t bottleneck = std::max<std::size_t>(1, dim / cfg.adapter_reduction);
      Adapter adapter(scope(t) + "/adapter", dim, bottleneck, init);
      LinearLayer head(scope(t) + "/head", dim, 2, head_init_std(dim), init);
      fit_adapter_head(adapter, head, reps, subset.rows, subset.targets, cfg, seed);
      *adapter_slot = std::move(adapter);
      head_slot = std::move(head);
    }
  }
};

std::vector<Eigen::VectorXd> encode_all(const EncoderBackbone& bb,
                                        std::span<const LabeledMessage> data) {
  std::vector<Eigen::VectorXd> reps;
  reps.reserve(data.size());
  for (const auto& m : data) reps.push_back(bb.encode(m.text));
  return reps;
}

}  // namespace

TrainedModelBundle train(std::span<const LabeledMessage> dataset, const EncoderBackbone& backbone,
                         const TrainConfig& config) {
  config.validate();
  check_training_set(dataset);

  TrainedModelBundle b;
  b.strategy_ = config.strategy;
  b.config_ = config;
  b.fingerprint_ = training_fingerprint(dataset);
  const std::size_t dim = backbone.dim();

  if (config.strategy == TrainingStrategy::TOGETHER) {
    const std::uint64_t seed = mix_seed(config.seed, "TOGETHER");
    b.model_seeds_ = {seed};
    auto bb = backbone.clone();
    Rng init(mix_seed(seed, "init"));
    LinearLayer head("head", dim, kClassCount, head_init_std(dim), init);
    std::vector<std::size_t> rows(dataset.size());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    std::vector<std::size_t> targets;
    targets.reserve(dataset.size());
    for (const auto& m : dataset) targets.push_back(class_index(*m.trait, *m.polarity));
    fit_encoder_head(*bb, head, dataset, rows, targets, config, seed);
    b.backbones_.push_back(std::move(bb));
    b.heads_.push_back(std::move(head));
    return b;
  }

  const bool adapter = config.strategy == TrainingStrategy::ADAPTER;
  std::vector<Eigen::VectorXd> reps;
  if (adapter) {
    auto frozen = backbone.clone();
    frozen->set_trainable(false);
    reps = encode_all(*frozen, dataset);
    b.backbones_.push_back(std::move(frozen));
    b.adapters_.resize(kTraitCount);
  } else {
    b.backbones_.resize(kTraitCount);
  }
  b.heads_.resize(kTraitCount);
  b.model_seeds_.resize(kTraitCount);
  for (auto t : kAllTraits) {
    b.model_seeds_[index_of(t)] = trait_model_seed(config.seed, config.strategy, t);
  }

  const TraitTrainer trainer{config.strategy, dataset, &backbone, reps, dim, config};
  for_each_trait(config.workers, [&](TraitDimension t) {
    const auto i = index_of(t);
    trainer(t, b.model_seeds_[i], adapter ? nullptr : &b.backbones_[i],
            adapter ? &b.adapters_[i] : nullptr, b.heads_[i]);
  });
  return b;
}

TrainedModelBundle retrain_trait(const TrainedModelBundle& bundle, TraitDimension trait,
                                 std::span<const LabeledMessage> dataset,
                                 const EncoderBackbone& base, const TrainConfig& config) {
  if (bundle.strategy() == TrainingStrategy::TOGETHER) {
    throw ContractViolation("TOGETHER bundles have no per-trait model to retrain");
  }
  config.validate();
  check_training_set(dataset);

  TrainedModelBundle b = bundle.clone();
  const auto i = index_of(trait);
  const std::uint64_t seed = trait_model_seed(config.seed, bundle.strategy(), trait);
  b.model_seeds_[i] = seed;

  std::vector<Eigen::VectorXd> reps;
  if (bundle.strategy() == TrainingStrategy::ADAPTER) reps = encode_all(*b.backbones_[0], dataset);
  const TraitTrainer trainer{bundle.strategy(), dataset, &base, reps, base.dim(), config};
  const bool adapter = bundle.strategy() == TrainingStrategy::ADAPTER;
  trainer(trait, seed, adapter ? nullptr : &b.backbones_[i], adapter ? &b.adapters_[i] : nullptr,
          b.heads_[i]);
  return b;
}

}  // namespace bigfive
