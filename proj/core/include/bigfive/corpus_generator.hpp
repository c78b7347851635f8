// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <mutex>
#include <string>
#include <vector>

#include "bigfive/dialogue.hpp"

namespace bigfive {

/// How many conversations to run and with which user lines. Each script
/// plays every persona once, so the plan yields
/// n_scripts * 20 * n_exchanges agent messages.
struct CorpusPlan {
  std::vector<std::string> user_utterances;  // empty = built-in pool
  std::size_t n_scripts = 10;
  int n_exchanges = 10;
  std::uint64_t seed = 7;
  std::size_t workers = 1;
  PromptOptions prompt;
  RetryPolicy retry;

  std::size_t message_count() const;
};

/// Reads a user-script file: UTF-8, one utterance per line, blank lines skipped.
std::vector<std::string> load_user_script(const std::filesystem::path& path);

/// Lines for script `index`: a deterministic walk through the utterance pool.
std::vector<std::string> script_lines(const CorpusPlan& plan, std::size_t index);

std::string conversation_id(std::size_t script_index, const PersonaSpec& persona);

/// Collects per-conversation results from concurrent workers and hands them
/// back in task order.
class MessageSink {
 public:
  explicit MessageSink(std::size_t slots) : slots_(slots) {}
  void put(std::size_t slot, std::vector<LabeledMessage> messages);
  std::vector<LabeledMessage> drain();

 private:
  std::mutex mu_;
  std::vector<std::vector<LabeledMessage>> slots_;
};

/// Runs the whole plan. Output order and content depend only on the plan
/// (and the provider), not on `workers`.
std::vector<LabeledMessage> generate_corpus(CompletionProvider& provider, const CorpusPlan& plan);

}  // namespace bigfive
