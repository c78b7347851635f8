// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>

#include "bigfive/classifier.hpp"
#include "bigfive/corpus_generator.hpp"
#include "bigfive/datastore.hpp"
#include "bigfive/encoder.hpp"
#include "bigfive/evaluation.hpp"
#include "bigfive/remote_provider.hpp"

namespace bigfive {

struct ProviderSettings {
  std::string kind = "mock";  // "mock" or "remote"
  std::uint64_t mock_seed = 0;
  RemoteProviderConfig remote;
};

struct CorpusSettings {
  std::optional<std::filesystem::path> scripts;  // empty = built-in pool
  CorpusPlan plan;
};

struct IngestSettings {
  std::size_t per_source = 500;
  std::uint64_t seed = 0;
  std::map<CorpusSource, std::filesystem::path> sources;
};

struct ServiceSettings {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::filesystem::path journal = "annotations.jsonl";
  std::size_t redundancy = 1;
  std::set<std::string> annotators;
  std::optional<std::filesystem::path> static_dir;
};

/// Everything a pipeline run needs. Load from a TOML file, then apply command
/// line overrides; the resolved result serializes back to TOML.
struct PipelineConfig {
  ProviderSettings provider;
  CorpusSettings corpus;
  IngestSettings ingest;
  SplitSpec split;
  TrainConfig train;
  HashedNgramOptions encoder;
  ProcessedOutputFormula formula = ProcessedOutputFormula::SUM_OF_ABS;
  ServiceSettings service;
};

/// Parses TOML text. Relative paths resolve against `base_dir`. Unknown keys
/// and bad values throw ConfigError naming the key.
PipelineConfig parse_config(std::string_view toml, const std::filesystem::path& base_dir);

/// Reads `path`; relative paths in it resolve against its directory.
PipelineConfig load_config(const std::filesystem::path& path);

/// Round-trips through parse_config (paths come out absolute).
std::string to_toml(const PipelineConfig& config);

}  // namespace bigfive
