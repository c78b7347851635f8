// SPDX-License-Identifier: Apache-2.0

#include "bigfive/encoder.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cmath>
#include <mutex>

#include "bigfive/error.hpp"
#include "bigfive/rng.hpp"

namespace bigfive {

std::size_t EncoderBackbone::parameter_count() const {
  std::size_t n = 0;
  for (const Parameter* p : parameters()) n += p->size();
  return n;
}

namespace {

struct PreparedSparse final : EncoderBackbone::Prepared {
  SparseVector features;
};

std::size_t setting_size(const EncoderBackbone::Settings& s, const char* key, std::size_t fallback) {
  auto it = s.find(key);
  return it == s.end() ? fallback : static_cast<std::size_t>(std::stoull(it->second));
}

}  // namespace

HashedNgramEncoder::HashedNgramEncoder(HashedNgramOptions options) : options_(options) {
  if (options_.buckets == 0 || options_.output_dim == 0 || options_.min_n == 0 ||
      options_.max_n < options_.min_n) {
    throw ContractViolation("invalid hashed n-gram encoder options");
  }
  Rng rng(mix_seed(options_.seed, "hashed-ngram/projection"));
  projection_ = LinearLayer("projection", options_.buckets, options_.output_dim,
                            options_.init_std, rng);
}

std::unique_ptr<EncoderBackbone> HashedNgramEncoder::from_settings(const Settings& s) {
  HashedNgramOptions o;
  o.buckets = setting_size(s, "buckets", o.buckets);
  o.output_dim = setting_size(s, "output_dim", o.output_dim);
  o.min_n = setting_size(s, "min_n", o.min_n);
  o.max_n = setting_size(s, "max_n", o.max_n);
  if (auto it = s.find("seed"); it != s.end()) o.seed = std::stoull(it->second);
  if (auto it = s.find("init_std"); it != s.end()) o.init_std = std::stod(it->second);
  return std::make_unique<HashedNgramEncoder>(o);
}

EncoderBackbone::Settings HashedNgramEncoder::settings() const {
  char std_buf[32];
  std::snprintf(std_buf, sizeof std_buf, "%.17g", options_.init_std);
  return {{"buckets", std::to_string(options_.buckets)},
          {"output_dim", std::to_string(options_.output_dim)},
          {"min_n", std::to_string(options_.min_n)},
          {"max_n", std::to_string(options_.max_n)},
          {"seed", std::to_string(options_.seed)},
          {"init_std", std_buf}};
}

std::unique_ptr<EncoderBackbone> HashedNgramEncoder::clone() const {
  return std::make_unique<HashedNgramEncoder>(*this);
}

SparseVector HashedNgramEncoder::featurize(std::string_view text) const {
  // Lower-case and collapse whitespace, padded so word edges form n-grams.
  std::string norm = " ";
  for (unsigned char c : text) {
    const bool space = c == ' ' || c == '\t' || c == '\n' || c == '\r';
    if (space) {
      if (norm.back() != ' ') norm += ' ';
    } else {
      norm += static_cast<char>(c < 0x80 ? std::tolower(c) : c);
    }
  }
  if (norm.back() != ' ') norm += ' ';

  std::vector<std::pair<std::uint32_t, double>> hits;
  const std::string_view view(norm);
  for (std::size_t n = options_.min_n; n <= options_.max_n; ++n) {
    if (view.size() < n) break;
    const std::uint64_t basis = mix_seed(options_.seed, n);
    for (std::size_t i = 0; i + n <= view.size(); ++i) {
      const std::uint64_t h = fnv1a64(view.substr(i, n), basis);
      const auto bucket = static_cast<std::uint32_t>(h % options_.buckets);
      hits.emplace_back(bucket, (h >> 63) != 0 ? -1.0 : 1.0);
    }
  }
  std::sort(hits.begin(), hits.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  SparseVector out;
  for (const auto& [idx, v] : hits) {
    if (!out.index.empty() && out.index.back() == idx) {
      out.value.back() += v;
    } else {
      out.index.push_back(idx);
      out.value.push_back(v);
    }
  }
  double norm2 = 0.0;
  for (double v : out.value) norm2 += v * v;
  if (norm2 > 0.0) {
    const double inv = 1.0 / std::sqrt(norm2);
    for (double& v : out.value) v *= inv;
  }
  return out;
}

std::unique_ptr<EncoderBackbone::Prepared> HashedNgramEncoder::prepare(std::string_view text) const {
  auto p = std::make_unique<PreparedSparse>();
  p->features = featurize(text);
  return p;
}

Eigen::VectorXd HashedNgramEncoder::forward(const Prepared& input) const {
  const auto& f = static_cast<const PreparedSparse&>(input).features;
  Eigen::VectorXd out = projection_.bias.value.col(0);
  for (std::size_t k = 0; k < f.index.size(); ++k) {
    out.noalias() += f.value[k] * projection_.weight.value.col(f.index[k]);
  }
  return out;
}

void HashedNgramEncoder::backward(const Prepared& input, const Eigen::VectorXd& grad_output) {
  const auto& f = static_cast<const PreparedSparse&>(input).features;
  for (std::size_t k = 0; k < f.index.size(); ++k) {
    projection_.weight.grad.col(f.index[k]).noalias() += f.value[k] * grad_output;
  }
  projection_.bias.grad.col(0) += grad_output;
}

namespace {

std::mutex& registry_mutex() {
  static std::mutex mu;
  return mu;
}

std::map<std::string, BackboneFactory>& registry() {
  static std::map<std::string, BackboneFactory> r{
      {std::string(HashedNgramEncoder::kName), &HashedNgramEncoder::from_settings}};
  return r;
}

}  // namespace

void register_backbone(const std::string& name, BackboneFactory factory) {
  std::lock_guard lock(registry_mutex());
  registry()[name] = std::move(factory);
}

std::unique_ptr<EncoderBackbone> make_backbone(const std::string& name,
                                               const EncoderBackbone::Settings& settings) {
  BackboneFactory factory;
  {
    std::lock_guard lock(registry_mutex());
    auto it = registry().find(name);
    if (it == registry().end()) throw NotFoundError("no backbone registered as '" + name + "'");
    factory = it->second;
  }
  return factory(settings);
}

}  // namespace bigfive
