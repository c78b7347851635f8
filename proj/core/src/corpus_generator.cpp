// SPDX-License-Identifier: Apache-2.0

#include "bigfive/corpus_generator.hpp"

#include <atomic>
#include <exception>
#include <thread>

#include "bigfive/mock_provider.hpp"
#include "bigfive/rng.hpp"
#include "text_util.hpp"

namespace bigfive {

std::size_t CorpusPlan::message_count() const {
  return n_scripts * enumerate_personas().size() * static_cast<std::size_t>(n_exchanges);
}

std::vector<std::string> load_user_script(const std::filesystem::path& path) {
  const std::string raw = detail::read_file(path);
  std::vector<std::string> out;
  for (auto line : detail::split_lines(raw)) {
    const auto t = detail::trim(line);
    if (!t.empty()) out.emplace_back(t);
  }
  if (out.empty()) throw ParseError("user script " + path.string() + " has no utterances");
  return out;
}

std::vector<std::string> script_lines(const CorpusPlan& plan, std::size_t index) {
  std::vector<std::string> pool = plan.user_utterances;
  if (pool.empty()) {
    for (auto u : default_user_utterances()) pool.emplace_back(u);
  }
  const auto n = static_cast<std::size_t>(plan.n_exchanges);
  std::vector<std::string> out;
  out.reserve(n);
  for (std::size_t j = 0; j < n; ++j) out.push_back(pool[(index * n + j) % pool.size()]);
  return out;
}

std::string conversation_id(std::size_t script_index, const PersonaSpec& persona) {
  std::string idx = std::to_string(script_index);
  if (idx.size() < 4) idx.insert(0, 4 - idx.size(), '0');
  return "conv-" + idx + "-" + persona.id;
}

void MessageSink::put(std::size_t slot, std::vector<LabeledMessage> messages) {
  std::lock_guard lock(mu_);
  slots_.at(slot) = std::move(messages);
}

std::vector<LabeledMessage> MessageSink::drain() {
  std::lock_guard lock(mu_);
  std::vector<LabeledMessage> out;
  for (auto& slot : slots_) {
    for (auto& m : slot) out.push_back(std::move(m));
    slot.clear();
  }
  return out;
}

std::vector<LabeledMessage> generate_corpus(CompletionProvider& provider, const CorpusPlan& plan) {
  if (plan.n_exchanges < 1) throw ContractViolation("n_exchanges must be >= 1");
  const auto personas = enumerate_personas();
  const std::size_t tasks = plan.n_scripts * personas.size();
  MessageSink sink(tasks);

  std::atomic<std::size_t> next{0};
  std::mutex err_mu;
  std::exception_ptr first_error;

  auto worker = [&] {
    for (;;) {
      const std::size_t task = next.fetch_add(1);
      if (task >= tasks) return;
      {
        std::lock_guard lock(err_mu);
        if (first_error) return;
      }
      try {
        const std::size_t script = task / personas.size();
        const PersonaSpec& persona = personas[task % personas.size()];
        SimulationOptions opts;
        opts.conversation_id = conversation_id(script, persona);
        opts.seed = mix_seed(plan.seed, opts.conversation_id);
        opts.prompt = plan.prompt;
        opts.retry = plan.retry;
        ScriptedUserSource users(script_lines(plan, script));
        auto conv = simulate_conversation(provider, users, persona, plan.n_exchanges, opts);
        sink.put(task, extract_labeled_messages(conv, persona));
      } catch (...) {
        std::lock_guard lock(err_mu);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  const std::size_t n_workers = std::max<std::size_t>(1, std::min(plan.workers, tasks));
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < n_workers; ++i) pool.emplace_back(worker);
  }
  if (first_error) std::rethrow_exception(first_error);
  return sink.drain();
}

}  // namespace bigfive
