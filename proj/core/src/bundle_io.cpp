// SPDX-License-Identifier: Apache-2.0

#include <bit>
#include <cstring>
#include <map>

#include <json.hpp>

#include "bigfive/classifier.hpp"
#include "bigfive/datastore.hpp"
#include "bigfive/rng.hpp"
#include "text_util.hpp"

namespace bigfive {

namespace {

using json = nlohmann::json;
constexpr std::string_view kMagic = "B5BUNDLE";

class BlobWriter {
 public:
  void bytes(std::string_view b) { out_.append(b); }
  void u32(std::uint32_t v) { put_le(v, 4); }
  void u64(std::uint64_t v) { put_le(v, 8); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  const std::string& data() const noexcept { return out_; }

 private:
  void put_le(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) out_ += static_cast<char>((v >> (8 * i)) & 0xFF);
  }
  std::string out_;
};

class BlobReader {
 public:
  explicit BlobReader(std::string_view data) : data_(data) {}

  std::string_view bytes(std::size_t n) {
    if (n > data_.size() - pos_) throw BundleLoadError("bundle is truncated");
    auto out = data_.substr(pos_, n);
    pos_ += n;
    return out;
  }
  std::uint32_t u32() { return static_cast<std::uint32_t>(get_le(4)); }
  std::uint64_t u64() { return get_le(8); }
  double f64() { return std::bit_cast<double>(u64()); }
  std::size_t position() const noexcept { return pos_; }

 private:
  std::uint64_t get_le(std::size_t n) {
    const auto b = bytes(n);
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < n; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(b[i])) << (8 * i);
    }
    return v;
  }
  std::string_view data_;
  std::size_t pos_ = 0;
};

json config_to_json(const TrainConfig& c) {
  return {{"epochs", c.epochs},
          {"batch_size", c.batch_size},
          {"learning_rate", c.learning_rate},
          {"seed", c.seed},
          {"strategy", to_string(c.strategy)},
          {"optimizer", to_string(c.optimizer)},
          {"adapter_reduction", c.adapter_reduction},
          {"workers", c.workers}};
}

TrainConfig config_from_json(const json& j) {
  TrainConfig c;
  c.epochs = j.at("epochs").get<int>();
  c.batch_size = j.at("batch_size").get<int>();
  c.learning_rate = j.at("learning_rate").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  auto strategy = parse_strategy(j.at("strategy").get<std::string>());
  auto optimizer = parse_optimizer(j.at("optimizer").get<std::string>());
  if (!strategy || !optimizer) throw BundleLoadError("bundle header has a bad train config");
  c.strategy = *strategy;
  c.optimizer = *optimizer;
  c.adapter_reduction = j.at("adapter_reduction").get<std::size_t>();
  c.workers = j.at("workers").get<std::size_t>();
  return c;
}

std::string prefixed(const std::string& prefix, const std::string& name) {
  return prefix.empty() ? name : prefix + "/" + name;
}

}  // namespace

/// Walks every parameter of a bundle with its block name.
struct BundleAccess {
  template <typename Bundle, typename Fn>
  static void visit(Bundle& b, Fn&& fn) {
    const bool separate = b.strategy_ == TrainingStrategy::SEPARATE;
    for (std::size_t i = 0; i < b.backbones_.size(); ++i) {
      const std::string scope =
          separate ? std::string(to_string(kAllTraits[i])) + "/backbone" : "backbone";
      for (auto* p : b.backbones_[i]->parameters()) fn(prefixed(scope, p->name), *p);
    }
    for (auto& a : b.adapters_) {
      fn(a.down.weight.name, a.down.weight);
      fn(a.down.bias.name, a.down.bias);
      fn(a.up.weight.name, a.up.weight);
      fn(a.up.bias.name, a.up.bias);
    }
    for (auto& h : b.heads_) {
      fn(h.weight.name, h.weight);
      fn(h.bias.name, h.bias);
    }
  }

  static TrainedModelBundle skeleton(const json& header) {
    TrainedModelBundle b;
    b.config_ = config_from_json(header.at("train_config"));
    auto strategy = parse_strategy(header.at("strategy").get<std::string>());
    if (!strategy) throw BundleLoadError("bundle header has an unknown strategy");
    b.strategy_ = *strategy;
    b.fingerprint_ = header.at("fingerprint").get<std::string>();
    b.model_seeds_ = header.at("model_seeds").get<std::vector<std::uint64_t>>();

    const auto& bbh = header.at("backbone");
    const auto name = bbh.at("name").get<std::string>();
    const auto settings = bbh.at("settings").get<EncoderBackbone::Settings>();
    const bool trainable = bbh.at("trainable").get<bool>();
    const std::size_t n_backbones = b.strategy_ == TrainingStrategy::SEPARATE ? kTraitCount : 1;
    for (std::size_t i = 0; i < n_backbones; ++i) {
      auto bb = make_backbone(name, settings);
      bb->set_trainable(trainable);
      b.backbones_.push_back(std::move(bb));
    }
    const std::size_t dim = b.backbones_.front()->dim();

    Rng unused(0);
    if (b.strategy_ == TrainingStrategy::TOGETHER) {
      b.heads_.emplace_back("head", dim, kClassCount, 0.0, unused);
    } else {
      for (auto t : kAllTraits) {
        const std::string scope(to_string(t));
        if (b.strategy_ == TrainingStrategy::ADAPTER) {
          b.adapters_.emplace_back(scope + "/adapter", dim,
                                   header.at("adapter_bottleneck").get<std::size_t>(), unused);
        }
        b.heads_.emplace_back(scope + "/head", dim, 2, 0.0, unused);
      }
    }
    const std::size_t expected_seeds = b.strategy_ == TrainingStrategy::TOGETHER ? 1 : kTraitCount;
    if (b.model_seeds_.size() != expected_seeds) {
      throw BundleLoadError("bundle header lists the wrong number of model seeds");
    }
    return b;
  }
};

void save_bundle(const TrainedModelBundle& bundle, const std::filesystem::path& path) {
  const auto& bb = *bundle.backbones_.front();
  json header;
  header["format"] = "bigfive-bundle";
  header["tool_version"] = tool_version();
  header["strategy"] = to_string(bundle.strategy_);
  header["train_config"] = config_to_json(bundle.config_);
  header["fingerprint"] = bundle.fingerprint_;
  header["model_seeds"] = bundle.model_seeds_;
  header["adapter_bottleneck"] = bundle.adapter_bottleneck();
  header["backbone"] = {{"name", bb.name()},
                        {"settings", bb.settings()},
                        {"trainable", bb.trainable()},
                        {"dim", bb.dim()}};
  const std::string header_text = header.dump();

  std::vector<std::pair<std::string, const Parameter*>> blocks;
  BundleAccess::visit(bundle, [&](const std::string& name, const Parameter& p) {
    blocks.emplace_back(name, &p);
  });

  BlobWriter w;
  w.bytes(kMagic);
  w.u32(kBundleFormatVersion);
  w.u64(header_text.size());
  w.bytes(header_text);
  w.u32(static_cast<std::uint32_t>(blocks.size()));
  for (const auto& [name, p] : blocks) {
    w.u32(static_cast<std::uint32_t>(name.size()));
    w.bytes(name);
    w.u32(static_cast<std::uint32_t>(p->value.rows()));
    w.u32(static_cast<std::uint32_t>(p->value.cols()));
    const double* v = p->value.data();
    for (Eigen::Index k = 0; k < p->value.size(); ++k) w.f64(v[k]);
  }
  const std::uint64_t checksum = fnv1a64(w.data());
  w.u64(checksum);
  detail::write_file_atomic(path, w.data());
}

TrainedModelBundle load_bundle(const std::filesystem::path& path) {
  std::string raw;
  try {
    raw = detail::read_file(path);
  } catch (const Error& e) {
    throw BundleLoadError(e.what());
  }
  if (raw.size() < kMagic.size() + 4 + 8 || std::string_view(raw).substr(0, 8) != kMagic) {
    throw BundleLoadError(path.string() + " is not a bundle file");
  }
  BlobReader r(raw);
  r.bytes(kMagic.size());
  const std::uint32_t version = r.u32();
  if (version != kBundleFormatVersion) {
    throw BundleLoadError("bundle format version " + std::to_string(version) +
                          " is not supported (expected " +
                          std::to_string(kBundleFormatVersion) + ")");
  }
  if (raw.size() < 8 + 4 + 8) throw BundleLoadError("bundle is truncated");
  const std::string_view body(raw.data(), raw.size() - 8);
  BlobReader tail(std::string_view(raw).substr(raw.size() - 8));
  if (fnv1a64(body) != tail.u64()) {
    throw BundleLoadError(path.string() + ": checksum mismatch (truncated or corrupted)");
  }

  try {
    const auto header_len = r.u64();
    const json header = json::parse(r.bytes(static_cast<std::size_t>(header_len)));
    TrainedModelBundle b = BundleAccess::skeleton(header);

    std::map<std::string, Eigen::MatrixXd> blocks;
    const std::uint32_t count = r.u32();
    for (std::uint32_t i = 0; i < count; ++i) {
      std::string name(r.bytes(r.u32()));
      const auto rows = static_cast<Eigen::Index>(r.u32());
      const auto cols = static_cast<Eigen::Index>(r.u32());
      Eigen::MatrixXd m(rows, cols);
      double* v = m.data();
      for (Eigen::Index k = 0; k < m.size(); ++k) v[k] = r.f64();
      blocks.emplace(std::move(name), std::move(m));
    }
    if (r.position() != body.size()) throw BundleLoadError("trailing bytes after parameter blocks");

    std::size_t used = 0;
    BundleAccess::visit(b, [&](const std::string& name, Parameter& p) {
      auto it = blocks.find(name);
      if (it == blocks.end()) throw BundleLoadError("bundle is missing block '" + name + "'");
      if (it->second.rows() != p.value.rows() || it->second.cols() != p.value.cols()) {
        throw BundleLoadError("block '" + name + "' has the wrong shape");
      }
      p.value = std::move(it->second);
      p.zero_grad();
      ++used;
    });
    if (used != blocks.size()) throw BundleLoadError("bundle has unexpected extra blocks");
    return b;
  } catch (const json::exception& e) {
    throw BundleLoadError(std::string("bad bundle header: ") + e.what());
  } catch (const NotFoundError& e) {
    throw BundleLoadError(e.what());
  }
}

}  // namespace bigfive
