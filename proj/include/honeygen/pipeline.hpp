#pragma once

// Prompt -> provider -> classification -> run store, for one triple or a
// whole sweep.

#include <algorithm>
#include <atomic>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "honeygen/llm_gateway.hpp"
#include "honeygen/prompt_kit.hpp"
#include "honeygen/robots_txt.hpp"
#include "honeygen/run_store.hpp"
#include "honeygen/token_specs.hpp"

namespace honeygen {

// Turns a completed exchange into a run record. Failed calls have no
// response text, class or validation.
inline RunRecord make_run(const AssembledPrompt& prompt, const llm::ChatResponse& response,
                          std::string_view provider, int repeat,
                          const std::vector<std::string>& lexicon = llm::default_refusal_lexicon()) {
  RunRecord r;
  r.run_id = make_run_id(prompt.token_type, prompt.triple, provider, repeat);
  r.timestamp = utc_timestamp();
  r.triple = prompt.triple;
  r.token_type = prompt.token_type;
  r.provider = std::string(provider);
  r.repeat = repeat;
  r.input_payload = prompt.input_payload;
  r.prompt_text = prompt.text;
  r.finish_reason = std::string(llm::to_string(response.finish_reason));
  if (response.text) {
    r.response_text = *response.text;
    r.response_class = llm::classify_response(*response.text, prompt.token_type, lexicon);
    r.validation = validate(prompt.token_type, *response.text);
  }
  return r;
}

inline nlohmann::json failure_entry(const AssembledPrompt& prompt, std::string_view provider,
                                    int repeat, const llm::ChatResponse& response) {
  return {{"run_id", make_run_id(prompt.token_type, prompt.triple, provider, repeat)},
          {"triple", prompt.triple.to_string()},
          {"token_type", std::string(1, to_char(prompt.token_type))},
          {"provider", provider},
          {"repeat", repeat},
          {"error", std::string(llm::to_string(response.error))},
          {"detail", response.error_detail},
          {"timestamp", utc_timestamp()}};
}

struct RobotsScoring {
  robots::CorpusStats stats = robots::builtin_corpus_stats();
  robots::Wordlist wordlist = robots::builtin_wordlist();
};

struct SweepOptions {
  TokenTypeId token_type = TokenTypeId::A;
  std::vector<BlockTriple> triples = enumerate_triples();
  std::string input_payload;
  int repeats = 1;
  std::size_t parallelism = 4;
  std::vector<std::string> lexicon = llm::default_refusal_lexicon();
  // Type A runs get format and variance scores on persist when set.
  std::optional<RobotsScoring> scoring;
  const BlockTable* blocks = nullptr;
};

struct SweepSummary {
  std::size_t attempted = 0;
  std::size_t persisted = 0;
  std::size_t skipped = 0;  // already in the store
  std::size_t fixture_missing = 0;
  std::size_t provider_errors = 0;
};

// Every (triple, repeat) whose run_id is not yet stored is sent to the
// provider; workers share one store, which serializes the appends.
inline SweepSummary run_sweep(RunStore& store, llm::ChatProvider& provider,
                              const SweepOptions& options) {
  struct Job {
    AssembledPrompt prompt;
    int repeat;
  };
  const BlockTable& blocks = options.blocks ? *options.blocks : builtin_blocks();
  SweepSummary summary;
  std::vector<Job> jobs;
  for (int rep = 0; rep < options.repeats; ++rep) {
    for (const auto& t : options.triples) {
      if (store.contains(make_run_id(options.token_type, t, provider.name(), rep))) {
        ++summary.skipped;
        continue;
      }
      jobs.push_back({assemble(t, options.token_type, options.input_payload, blocks), rep});
    }
  }
  summary.attempted = jobs.size();

  std::atomic<std::size_t> next{0}, persisted{0}, missing{0}, errors{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        const Job& job = jobs[i];
        const llm::ChatResponse response = llm::complete(job.prompt, provider);
        if (response.error != llm::GatewayError::kNone) {
          store.record_failure(failure_entry(job.prompt, provider.name(), job.repeat, response));
          ++(response.error == llm::GatewayError::kFixtureMissing ? missing : errors);
          continue;
        }
        RunRecord run = make_run(job.prompt, response, provider.name(), job.repeat, options.lexicon);
        if (options.scoring && run.token_type == TokenTypeId::A && run.response_text) {
          const auto s = robots::score_response(*run.response_text, options.scoring->stats,
                                                options.scoring->wordlist);
          run.scores.format = s.format_score;
          run.scores.variance = s.variance_score;
        }
        store.append_run(run);
        ++persisted;
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> workers;
    const std::size_t n = std::clamp<std::size_t>(options.parallelism, 1, std::max<std::size_t>(1, jobs.size()));
    for (std::size_t w = 0; w < n; ++w) workers.emplace_back(worker);
  }
  if (first_error) std::rethrow_exception(first_error);
  summary.persisted = persisted;
  summary.fixture_missing = missing;
  summary.provider_errors = errors;
  return summary;
}

}  // namespace honeygen
