// SPDX-License-Identifier: Apache-2.0

#include "bigfive/config.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <functional>
#include <sstream>

#include "bigfive/error.hpp"
#include "text_util.hpp"

namespace bigfive {

namespace {

namespace fs = std::filesystem;

struct Item {
  std::string key;
  std::vector<std::string> values;

  const std::string& one() const {
    if (values.size() != 1) throw ConfigError(key + ": expected a single value");
    return values.front();
  }
};

template <typename T>
T as_number(const Item& item) {
  const std::string& s = item.one();
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ConfigError(item.key + ": not a valid number '" + s + "'");
  }
  return v;
}

double as_double(const Item& item) {
  try {
    return detail::parse_double(item.one());
  } catch (const Error&) {
    throw ConfigError(item.key + ": not a valid number '" + item.one() + "'");
  }
}

bool as_bool(const Item& item) {
  const std::string& s = item.one();
  if (s == "true") return true;
  if (s == "false") return false;
  throw ConfigError(item.key + ": expected true or false");
}

fs::path as_path(const Item& item, const fs::path& base) {
  fs::path p(item.one());
  return p.is_absolute() ? p : (base / p).lexically_normal();
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::string quote(const fs::path& p) { return quote(p.string()); }

std::string bool_str(bool b) { return b ? "true" : "false"; }

// The TOML reader does not accept a comment after a table header.
std::string strip_header_comments(std::string_view toml) {
  std::string out;
  out.reserve(toml.size());
  for (auto line : detail::split_lines(toml)) {
    const auto t = detail::trim(line);
    const auto close = t.rfind(']', t.find('#'));
    if (t.starts_with('[') && close != std::string_view::npos &&
        detail::trim(t.substr(close + 1)).starts_with('#')) {
      line = t.substr(0, close + 1);
    }
    out.append(line);
    out += '\n';
  }
  return out;
}

}  // namespace

PipelineConfig parse_config(std::string_view toml, const fs::path& base_dir) {
  std::istringstream in{strip_header_comments(toml)};
  std::vector<CLI::ConfigItem> raw;
  try {
    raw = CLI::ConfigTOML().from_config(in);
  } catch (const CLI::Error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }

  PipelineConfig c;
  auto& plan = c.corpus.plan;
  auto& remote = c.provider.remote;
  using Setter = std::function<void(const Item&)>;
  const std::map<std::string, Setter, std::less<>> setters = {
      {"provider.kind",
       [&](const Item& i) {
         if (i.one() != "mock" && i.one() != "remote") {
           throw ConfigError(i.key + ": expected mock or remote");
         }
         c.provider.kind = i.one();
       }},
      {"provider.seed", [&](const Item& i) { c.provider.mock_seed = as_number<std::uint64_t>(i); }},
      {"provider.endpoint", [&](const Item& i) { remote.endpoint = i.one(); }},
      {"provider.api_key_env", [&](const Item& i) { remote.api_key_env = i.one(); }},
      {"provider.model", [&](const Item& i) { remote.model = i.one(); }},
      {"provider.requests_per_second",
       [&](const Item& i) { remote.requests_per_second = as_double(i); }},
      {"provider.timeout_seconds",
       [&](const Item& i) { remote.timeout = std::chrono::seconds(as_number<int>(i)); }},
      {"provider.retry_attempts", [&](const Item& i) { plan.retry.max_attempts = as_number<int>(i); }},
      {"provider.retry_backoff_ms",
       [&](const Item& i) {
         plan.retry.initial_backoff = std::chrono::milliseconds(as_number<int>(i));
       }},
      {"persona.gender_clause", [&](const Item& i) { plan.prompt.gender_clause = as_bool(i); }},
      {"persona.gender_a", [&](const Item& i) { plan.prompt.gender_a_clause = i.one(); }},
      {"persona.gender_b", [&](const Item& i) { plan.prompt.gender_b_clause = i.one(); }},
      {"persona.lowercase_initial",
       [&](const Item& i) { plan.prompt.lowercase_initial = as_bool(i); }},
      {"corpus.scripts", [&](const Item& i) { c.corpus.scripts = as_path(i, base_dir); }},
      {"corpus.n_scripts", [&](const Item& i) { plan.n_scripts = as_number<std::size_t>(i); }},
      {"corpus.exchanges", [&](const Item& i) { plan.n_exchanges = as_number<int>(i); }},
      {"corpus.seed", [&](const Item& i) { plan.seed = as_number<std::uint64_t>(i); }},
      {"corpus.workers", [&](const Item& i) { plan.workers = as_number<std::size_t>(i); }},
      {"ingest.per_source", [&](const Item& i) { c.ingest.per_source = as_number<std::size_t>(i); }},
      {"ingest.seed", [&](const Item& i) { c.ingest.seed = as_number<std::uint64_t>(i); }},
      {"ingest.movie",
       [&](const Item& i) { c.ingest.sources[CorpusSource::MOVIE_DIALOGS] = as_path(i, base_dir); }},
      {"ingest.multiwoz",
       [&](const Item& i) { c.ingest.sources[CorpusSource::MULTIWOZ] = as_path(i, base_dir); }},
      {"ingest.convai",
       [&](const Item& i) { c.ingest.sources[CorpusSource::CONVAI] = as_path(i, base_dir); }},
      {"split.holdout", [&](const Item& i) { c.split.holdout_count = as_number<std::size_t>(i); }},
      {"split.seed", [&](const Item& i) { c.split.seed = as_number<std::uint64_t>(i); }},
      {"train.strategy",
       [&](const Item& i) {
         auto s = parse_strategy(i.one());
         if (!s) throw ConfigError(i.key + ": unknown strategy '" + i.one() + "'");
         c.train.strategy = *s;
       }},
      {"train.epochs", [&](const Item& i) { c.train.epochs = as_number<int>(i); }},
      {"train.batch_size", [&](const Item& i) { c.train.batch_size = as_number<int>(i); }},
      {"train.learning_rate", [&](const Item& i) { c.train.learning_rate = as_double(i); }},
      {"train.seed", [&](const Item& i) { c.train.seed = as_number<std::uint64_t>(i); }},
      {"train.optimizer",
       [&](const Item& i) {
         auto o = parse_optimizer(i.one());
         if (!o) throw ConfigError(i.key + ": unknown optimizer '" + i.one() + "'");
         c.train.optimizer = *o;
       }},
      {"train.adapter_reduction",
       [&](const Item& i) { c.train.adapter_reduction = as_number<std::size_t>(i); }},
      {"train.workers", [&](const Item& i) { c.train.workers = as_number<std::size_t>(i); }},
      {"encoder.buckets", [&](const Item& i) { c.encoder.buckets = as_number<std::size_t>(i); }},
      {"encoder.dim", [&](const Item& i) { c.encoder.output_dim = as_number<std::size_t>(i); }},
      {"encoder.min_n", [&](const Item& i) { c.encoder.min_n = as_number<std::size_t>(i); }},
      {"encoder.max_n", [&](const Item& i) { c.encoder.max_n = as_number<std::size_t>(i); }},
      {"encoder.seed", [&](const Item& i) { c.encoder.seed = as_number<std::uint64_t>(i); }},
      {"encoder.init_std", [&](const Item& i) { c.encoder.init_std = as_double(i); }},
      {"evaluation.formula",
       [&](const Item& i) {
         auto f = parse_formula(i.one());
         if (!f) throw ConfigError(i.key + ": unknown formula '" + i.one() + "'");
         c.formula = *f;
       }},
      {"service.host", [&](const Item& i) { c.service.host = i.one(); }},
      {"service.port", [&](const Item& i) { c.service.port = as_number<int>(i); }},
      {"service.journal", [&](const Item& i) { c.service.journal = as_path(i, base_dir); }},
      {"service.redundancy",
       [&](const Item& i) { c.service.redundancy = as_number<std::size_t>(i); }},
      {"service.annotators",
       [&](const Item& i) {
         c.service.annotators.clear();
         for (const auto& v : i.values) {
           if (!v.empty()) c.service.annotators.insert(v);
         }
       }},
      {"service.static_dir", [&](const Item& i) { c.service.static_dir = as_path(i, base_dir); }},
  };

  for (const auto& r : raw) {
    if (r.name == "++" || r.name == "--") continue;
    const Item item{r.fullname(), r.inputs};
    if (r.parents.size() == 2 && r.parents[0] == "provider" && r.parents[1] == "sampling") {
      remote.sampling[r.name] = item.one();
      continue;
    }
    auto it = setters.find(item.key);
    if (it == setters.end()) throw ConfigError("unknown config key '" + item.key + "'");
    it->second(item);
  }
  if (plan.n_exchanges < 1) throw ConfigError("corpus.exchanges must be >= 1");
  if (plan.workers < 1) throw ConfigError("corpus.workers must be >= 1");
  if (c.service.redundancy < 1) throw ConfigError("service.redundancy must be >= 1");
  try {
    c.train.validate();
  } catch (const ContractViolation& e) {
    throw ConfigError(std::string("train: ") + e.what());
  }
  return c;
}

PipelineConfig load_config(const fs::path& path) {
  std::string text;
  try {
    text = detail::read_file(path);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  return parse_config(text, fs::absolute(path).parent_path());
}

std::string to_toml(const PipelineConfig& c) {
  const auto& plan = c.corpus.plan;
  const auto& remote = c.provider.remote;
  std::ostringstream o;
  o << "[provider]\n"
    << "kind = " << quote(c.provider.kind) << "\n"
    << "seed = " << c.provider.mock_seed << "\n"
    << "endpoint = " << quote(remote.endpoint) << "\n"
    << "api_key_env = " << quote(remote.api_key_env) << "\n"
    << "model = " << quote(remote.model) << "\n"
    << "requests_per_second = " << detail::format_double(remote.requests_per_second) << "\n"
    << "timeout_seconds = " << remote.timeout.count() << "\n"
    << "retry_attempts = " << plan.retry.max_attempts << "\n"
    << "retry_backoff_ms = " << plan.retry.initial_backoff.count() << "\n";
  if (!remote.sampling.empty()) {
    o << "\n[provider.sampling]\n";
    for (const auto& [k, v] : remote.sampling) o << k << " = " << quote(v) << "\n";
  }
  o << "\n[persona]\n"
    << "gender_clause = " << bool_str(plan.prompt.gender_clause) << "\n"
    << "gender_a = " << quote(plan.prompt.gender_a_clause) << "\n"
    << "gender_b = " << quote(plan.prompt.gender_b_clause) << "\n"
    << "lowercase_initial = " << bool_str(plan.prompt.lowercase_initial) << "\n";
  o << "\n[corpus]\n";
  if (c.corpus.scripts) o << "scripts = " << quote(*c.corpus.scripts) << "\n";
  o << "n_scripts = " << plan.n_scripts << "\n"
    << "exchanges = " << plan.n_exchanges << "\n"
    << "seed = " << plan.seed << "\n"
    << "workers = " << plan.workers << "\n";
  o << "\n[ingest]\n"
    << "per_source = " << c.ingest.per_source << "\n"
    << "seed = " << c.ingest.seed << "\n";
  for (const auto& [src, path] : c.ingest.sources) {
    const char* key = src == CorpusSource::MOVIE_DIALOGS ? "movie"
                      : src == CorpusSource::MULTIWOZ    ? "multiwoz"
                                                         : "convai";
    o << key << " = " << quote(path) << "\n";
  }
  o << "\n[split]\n"
    << "holdout = " << c.split.holdout_count << "\n"
    << "seed = " << c.split.seed << "\n";
  o << "\n[train]\n"
    << "strategy = " << quote(std::string(to_string(c.train.strategy))) << "\n"
    << "epochs = " << c.train.epochs << "\n"
    << "batch_size = " << c.train.batch_size << "\n"
    << "learning_rate = " << detail::format_double(c.train.learning_rate) << "\n"
    << "seed = " << c.train.seed << "\n"
    << "optimizer = " << quote(std::string(to_string(c.train.optimizer))) << "\n"
    << "adapter_reduction = " << c.train.adapter_reduction << "\n"
    << "workers = " << c.train.workers << "\n";
  o << "\n[encoder]\n"
    << "buckets = " << c.encoder.buckets << "\n"
    << "dim = " << c.encoder.output_dim << "\n"
    << "min_n = " << c.encoder.min_n << "\n"
    << "max_n = " << c.encoder.max_n << "\n"
    << "seed = " << c.encoder.seed << "\n"
    << "init_std = " << detail::format_double(c.encoder.init_std) << "\n";
  o << "\n[evaluation]\n"
    << "formula = " << quote(std::string(to_string(c.formula))) << "\n";
  o << "\n[service]\n"
    << "host = " << quote(c.service.host) << "\n"
    << "port = " << c.service.port << "\n"
    << "journal = " << quote(c.service.journal) << "\n"
    << "redundancy = " << c.service.redundancy << "\n"
    << "annotators = [";
  bool first = true;
  for (const auto& a : c.service.annotators) {
    o << (first ? "" : ", ") << quote(a);
    first = false;
  }
  o << "]\n";
  if (c.service.static_dir) o << "static_dir = " << quote(*c.service.static_dir) << "\n";
  return o.str();
}

}  // namespace bigfive
