// honeygen: command-line front end for honeytoken prompt sweeps, robots.txt
// scoring and honeyword evaluation.
//
// Exit codes: 0 ok, 2 usage, 3 data, 4 provider. Failures print one JSON
// object on stderr: {"error": "<code>", "message": "..."}.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "honeygen/honeygen.hpp"

namespace fs = std::filesystem;
using namespace honeygen;

namespace {

enum Exit { kOk = 0, kUsage = 2, kData = 3, kProvider = 4 };

struct ProviderFailure : std::runtime_error {
  std::string code;
  ProviderFailure(std::string c, const std::string& msg) : std::runtime_error(msg), code(std::move(c)) {}
};

int exit_code_for(ErrorCode c) {
  switch (c) {
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kInvalidTriple:
    case ErrorCode::kUnknownTokenType:
    case ErrorCode::kConfigError:
    case ErrorCode::kOutOfRange:
    case ErrorCode::kInvalidRating:
      return kUsage;
    case ErrorCode::kFixtureMissing:
      return kProvider;
    default:
      return kData;
  }
}

void print_error(std::string_view code, std::string_view message) {
  std::cerr << nlohmann::json{{"error", code}, {"message", message}}.dump() << '\n';
}

void print_warning(std::string_view message) {
  std::cerr << nlohmann::json{{"warning", message}}.dump() << '\n';
}

// Contents of FILE (trimmed) if it names an existing file, else the argument.
std::string file_or_string(const std::string& arg) {
  std::error_code ec;
  if (!arg.empty() && fs::is_regular_file(arg, ec)) return std::string(text::trim(text::read_file(arg)));
  return arg;
}

std::vector<std::string> read_nonblank_lines(const fs::path& path) {
  std::vector<std::string> out;
  const std::string content = text::read_file(path);
  for (auto line : text::split_lines(content)) {
    line = text::trim(line);
    if (!line.empty() && line.front() != '#') out.emplace_back(line);
  }
  return out;
}

// Training passwords: a leak CSV (password column) or one password per line.
std::vector<std::string> load_training(const fs::path& path, std::size_t limit) {
  std::vector<std::string> pw;
  if (path.extension() == ".csv") {
    for (auto& r : honeywords::load_leak(path).records)
      if (!r.password.empty()) pw.push_back(std::move(r.password));
  } else {
    const std::string content = text::read_file(path);
    for (auto line : text::split_lines(content))
      if (!line.empty()) pw.emplace_back(line);
  }
  if (limit > 0 && pw.size() > limit) pw.resize(limit);
  if (pw.empty()) throw Error(ErrorCode::kEmptyTraining, "no passwords in " + path.string());
  return pw;
}

std::vector<std::string> lexicon_for(const Config& cfg) {
  if (!cfg.paths.refusal_lexicon.empty()) return llm::load_refusal_lexicon(cfg.paths.refusal_lexicon);
  return llm::default_refusal_lexicon();
}

robots::Wordlist wordlist_from(const std::string& path) {
  return path.empty() ? robots::builtin_wordlist() : robots::Wordlist::load(path);
}

robots::CorpusStats stats_from(const std::string& path) {
  return path.empty() ? robots::builtin_corpus_stats() : robots::load_stats(path);
}

struct ProviderChoice {
  std::string name;
  bool replay = false;
  bool record = false;
  std::string fixtures;
};

// Owns whatever chain of providers the flags ask for.
struct ProviderHandle {
  std::unique_ptr<llm::FixtureStore> fixtures;
  std::unique_ptr<llm::ChatProvider> base;
  std::unique_ptr<llm::ChatProvider> recorder;
  llm::ChatProvider& get() { return recorder ? *recorder : *base; }
};

ProviderHandle open_provider(const Config& cfg, const ProviderChoice& choice) {
  ProviderHandle h;
  const fs::path fixture_dir = choice.fixtures.empty() ? cfg.paths.fixtures : fs::path(choice.fixtures);
  h.fixtures = std::make_unique<llm::FixtureStore>(fixture_dir);
  if (choice.replay) {
    h.base = std::make_unique<llm::ReplayProvider>(choice.name, *h.fixtures);
    return h;
  }
  const llm::ProviderConfig* pc = cfg.provider(choice.name);
  if (pc == nullptr)
    throw Error(ErrorCode::kConfigError, "provider '" + choice.name + "' not in config (use --replay for fixtures)");
  h.base = llm::make_provider(*pc, h.fixtures.get());
  if (choice.record) h.recorder = std::make_unique<llm::RecordingProvider>(*h.base, *h.fixtures);
  return h;
}

fs::path runs_dir(const Config& cfg, const std::string& flag) {
  return flag.empty() ? cfg.paths.runs : fs::path(flag);
}

std::string fmt(double v, int digits = 4) { return text::format_fixed(v, digits); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Honeytoken generation and evaluation toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "honeygen 0.1.0");
  std::string config_path;
  app.add_option("--config", config_path, "Config file (default: $HONEYGEN_CONFIG)");

  Config cfg;
  std::function<int()> action;

  // crawl ------------------------------------------------------------------
  auto* crawl = app.add_subcommand("crawl", "Fetch robots.txt for a list of hosts");
  std::string crawl_sites, crawl_out, crawl_scheme = "https";
  std::size_t crawl_parallel = 0;
  int crawl_timeout = 10;
  crawl->add_option("--sites", crawl_sites, "One host per line")->required()->check(CLI::ExistingFile);
  crawl->add_option("--out", crawl_out, "Corpus directory")->required();
  crawl->add_option("--scheme", crawl_scheme)->check(CLI::IsMember({"http", "https"}));
  crawl->add_option("--parallelism", crawl_parallel);
  crawl->add_option("--timeout", crawl_timeout, "Seconds per request");
  crawl->callback([&] {
    action = [&] {
      robots::CrawlOptions opt;
      opt.scheme = crawl_scheme;
      opt.timeout = std::chrono::seconds(crawl_timeout);
      opt.parallelism = crawl_parallel ? crawl_parallel : cfg.defaults.crawl_parallelism;
      const auto report = robots::crawl_corpus(read_nonblank_lines(crawl_sites), crawl_out, opt);
      std::cout << "fetched " << report.fetched << " failed " << report.failed << '\n';
      return kOk;
    };
  });

  // stats ------------------------------------------------------------------
  auto* stats = app.add_subcommand("stats", "Corpus feature statistics");
  std::string stats_corpus, stats_wordlist, stats_out;
  stats->add_option("--corpus", stats_corpus)->required()->check(CLI::ExistingDirectory);
  stats->add_option("--wordlist", stats_wordlist)->check(CLI::ExistingFile);
  stats->add_option("--out", stats_out)->required();
  stats->callback([&] {
    action = [&] {
      const auto words = wordlist_from(stats_wordlist.empty() && fs::exists(cfg.paths.wordlist)
                                           ? cfg.paths.wordlist.string()
                                           : stats_wordlist);
      std::vector<fs::path> files;
      for (const auto& e : fs::directory_iterator(stats_corpus))
        if (e.is_regular_file() && e.path().filename().string().ends_with(".robots.txt"))
          files.push_back(e.path());
      std::sort(files.begin(), files.end());
      std::vector<robots::FeatureVector> vectors;
      std::size_t skipped = 0;
      for (const auto& f : files) {
        try {
          vectors.push_back(robots::extract_features(robots::parse_robots(text::read_file(f)), words));
        } catch (const Error& e) {
          if (e.code() != ErrorCode::kNotRobotsTxt) throw;
          ++skipped;
        }
      }
      const auto s = robots::compute_stats(vectors);
      text::write_file(stats_out, robots::stats_to_json(s).dump(2) + "\n");
      std::cout << "samples " << s.sample_count << " skipped " << skipped << '\n';
      return kOk;
    };
  });

  // gen / sweep shared flags -------------------------------------------------
  auto add_provider_flags = [](CLI::App* sub, ProviderChoice& p) {
    sub->add_option("--provider", p.name, "Provider name")->required();
    sub->add_flag("--replay", p.replay, "Serve responses from recorded fixtures");
    sub->add_flag("--record", p.record, "Store every live response as a fixture");
    sub->add_option("--fixtures", p.fixtures, "Fixture directory");
  };

  // gen --------------------------------------------------------------------
  auto* gen = app.add_subcommand("gen", "Run one prompt and persist the result");
  ProviderChoice gen_provider;
  std::string gen_type, gen_blocks, gen_input, gen_runs, gen_link;
  std::vector<std::string> gen_follow_ups;
  int gen_repeat = 0;
  gen->add_option("--type", gen_type, "Honeytoken type A..G")->required();
  gen->add_option("--blocks", gen_blocks, "g,i,o")->required();
  gen->add_option("--input", gen_input, "Input payload file or literal string");
  gen->add_option("--runs", gen_runs, "Run store directory");
  gen->add_option("--repeat-index", gen_repeat);
  gen->add_option("--user-id", gen_link, "Sweetword set reference for honeyword runs");
  gen->add_option("--continue", gen_follow_ups, "Follow-up turns in the same conversation");
  add_provider_flags(gen, gen_provider);
  gen->callback([&] {
    action = [&] {
      const auto type = parse_token_type(gen_type);
      const auto prompt = assemble(parse_triple(gen_blocks), type, file_or_string(gen_input));
      auto handle = open_provider(cfg, gen_provider);
      RunStore store(runs_dir(cfg, gen_runs));
      const std::string run_id = make_run_id(type, prompt.triple, handle.get().name(), gen_repeat);
      if (store.contains(run_id))
        throw Error(ErrorCode::kInvalidArgument, "run " + run_id + " already exists; use --repeat-index");
      std::vector<llm::ChatMessage> history = {{"user", prompt.text}};
      auto response = handle.get().complete(history);
      if (response.text) history.push_back({"assistant", *response.text});
      for (const auto& follow : gen_follow_ups) {
        if (response.error != llm::GatewayError::kNone) break;
        response = llm::continue_conversation(history, follow, handle.get());
      }
      if (response.error != llm::GatewayError::kNone) {
        store.record_failure(failure_entry(prompt, handle.get().name(), gen_repeat, response));
        throw ProviderFailure(std::string(llm::to_string(response.error)), response.error_detail);
      }
      // Multi-turn runs keep the whole exchange as the response.
      if (!gen_follow_ups.empty()) {
        std::string all;
        for (std::size_t i = 1; i < history.size(); i += 2) all += history[i].content + "\n";
        response.text = all;
      }
      RunRecord run = make_run(prompt, response, handle.get().name(), gen_repeat, lexicon_for(cfg));
      if (!gen_link.empty()) run.honeyword_link = gen_link;
      store.append_run(run);
      std::cout << run.run_id << '\n';
      return kOk;
    };
  });

  // sweep ------------------------------------------------------------------
  auto* sweep = app.add_subcommand("sweep", "Run every block triple (resumable)");
  ProviderChoice sweep_provider;
  std::string sweep_type, sweep_blocks = "all", sweep_input, sweep_runs, sweep_stats, sweep_wordlist;
  int sweep_repeat = 1;
  std::size_t sweep_parallel = 0;
  bool sweep_no_score = false;
  sweep->add_option("--type", sweep_type)->required();
  sweep->add_option("--blocks", sweep_blocks, "'all' or a single g,i,o");
  sweep->add_option("--repeat", sweep_repeat)->check(CLI::PositiveNumber);
  sweep->add_option("--input", sweep_input, "Input payload file or literal string")->required();
  sweep->add_option("--runs", sweep_runs);
  sweep->add_option("--parallelism", sweep_parallel);
  sweep->add_option("--stats", sweep_stats, "Corpus statistics for type A scoring");
  sweep->add_option("--wordlist", sweep_wordlist);
  sweep->add_flag("--no-score", sweep_no_score, "Skip automatic robots.txt scoring");
  add_provider_flags(sweep, sweep_provider);
  sweep->callback([&] {
    action = [&] {
      SweepOptions opt;
      opt.token_type = parse_token_type(sweep_type);
      if (sweep_blocks != "all") opt.triples = {parse_triple(sweep_blocks)};
      opt.input_payload = file_or_string(sweep_input);
      opt.repeats = sweep_repeat;
      opt.parallelism = sweep_parallel ? sweep_parallel : cfg.defaults.sweep_parallelism;
      opt.lexicon = lexicon_for(cfg);
      if (!sweep_no_score)
        opt.scoring = RobotsScoring{stats_from(sweep_stats.empty() ? cfg.paths.stats.string() : sweep_stats),
                                    wordlist_from(sweep_wordlist)};
      auto handle = open_provider(cfg, sweep_provider);
      RunStore store(runs_dir(cfg, sweep_runs));
      const auto s = run_sweep(store, handle.get(), opt);
      std::cout << nlohmann::json{{"attempted", s.attempted},
                                  {"persisted", s.persisted},
                                  {"skipped", s.skipped},
                                  {"fixture_missing", s.fixture_missing},
                                  {"provider_errors", s.provider_errors}}
                       .dump()
                << '\n';
      if (s.fixture_missing + s.provider_errors > 0) {
        print_warning(std::to_string(s.fixture_missing + s.provider_errors) +
                      " attempts failed; see failures.jsonl");
        if (s.persisted == 0 && s.skipped == 0 && s.provider_errors > 0) return static_cast<int>(kProvider);
      }
      return static_cast<int>(kOk);
    };
  });

  // score-robots -------------------------------------------------------------
  auto* score = app.add_subcommand("score-robots", "Format and variance scores for a type A run");
  std::string score_run, score_stats, score_wordlist, score_runs;
  bool score_all = false;
  score->add_option("--run", score_run);
  score->add_flag("--all", score_all, "Score every type A run in the store");
  score->add_option("--stats", score_stats);
  score->add_option("--wordlist", score_wordlist);
  score->add_option("--runs", score_runs);
  score->callback([&] {
    action = [&] {
      if (score_run.empty() == !score_all)
        throw Error(ErrorCode::kInvalidArgument, "give exactly one of --run and --all");
      const auto st = stats_from(score_stats.empty() ? cfg.paths.stats.string() : score_stats);
      const auto words = wordlist_from(score_wordlist);
      RunStore store(runs_dir(cfg, score_runs));
      std::vector<RunRecord> targets;
      if (score_all) {
        for (auto& r : store.runs())
          if (r.token_type == TokenTypeId::A && r.response_text) targets.push_back(std::move(r));
      } else {
        auto r = store.find(score_run);
        if (!r) throw Error(ErrorCode::kUnknownRun, "no run '" + score_run + "'");
        if (r->token_type != TokenTypeId::A)
          throw Error(ErrorCode::kInvalidArgument, score_run + " is not a robots.txt run");
        targets.push_back(*r);
      }
      for (const auto& r : targets) {
        const auto s = robots::score_response(r.response_text.value_or(""), st, words);
        store.record_scores(r.run_id, s);
        std::cout << nlohmann::json{{"run_id", r.run_id},
                                    {"format", s.format_score},
                                    {"variance", s.variance_score}}
                         .dump()
                  << '\n';
      }
      return kOk;
    };
  });

  // rate-human ---------------------------------------------------------------
  auto* human = app.add_subcommand("rate-human", "Record the human score (0..5) of a run");
  std::string human_run, human_runs;
  double human_value = 0;
  human->add_option("--run", human_run)->required();
  human->add_option("--value", human_value)->required();
  human->add_option("--runs", human_runs);
  human->callback([&] {
    action = [&] {
      RunStore store(runs_dir(cfg, human_runs));
      store.record_human(human_run, human_value);
      return kOk;
    };
  });

  // rate-qual ----------------------------------------------------------------
  auto* qual = app.add_subcommand("rate-qual", "Record a four-axis qualitative rating");
  std::string qual_llm, qual_type, qual_runs, qual_rater;
  std::array<std::string, 4> qual_axes;
  std::vector<std::string> qual_run_ids;
  qual->add_option("--llm", qual_llm)->required();
  qual->add_option("--type", qual_type)->required();
  qual->add_option("--syntax", qual_axes[0], "+ o - x")->required();
  qual->add_option("--credibility", qual_axes[1])->required();
  qual->add_option("--variability", qual_axes[2])->required();
  qual->add_option("--stability", qual_axes[3])->required();
  qual->add_option("--rater", qual_rater);
  qual->add_option("--run-ids", qual_run_ids);
  qual->add_option("--runs", qual_runs);
  qual->callback([&] {
    action = [&] {
      QualitativeRating r;
      r.syntax = parse_grade(qual_axes[0]);
      r.credibility = parse_grade(qual_axes[1]);
      r.variability = parse_grade(qual_axes[2]);
      r.stability = parse_grade(qual_axes[3]);
      r.rater = qual_rater;
      r.run_ids = qual_run_ids;
      RunStore store(runs_dir(cfg, qual_runs));
      store.record_rating(qual_llm, parse_token_type(qual_type), r);
      return kOk;
    };
  });

  // eval-honeywords ----------------------------------------------------------
  auto* eval = app.add_subcommand("eval-honeywords", "Trawling attack against sweetword sets");
  std::string eval_sets, eval_answers, eval_training, eval_csv, eval_model, eval_save;
  std::vector<std::size_t> eval_per_user{10}, eval_total{500}, eval_sizes;
  int eval_order = 0;
  double eval_smoothing = -1;
  std::size_t eval_shards = 0;
  eval->add_option("--sweetsets", eval_sets)->required()->check(CLI::ExistingFile);
  eval->add_option("--answers", eval_answers, "Real indices for blind sweetset files")->check(CLI::ExistingFile);
  eval->add_option("--training", eval_training, "Leak CSV or one password per line");
  eval->add_option("--model", eval_model, "Load a trained model instead of training")->check(CLI::ExistingFile);
  eval->add_option("--save-model", eval_save);
  eval->add_option("--per-user", eval_per_user)->expected(1, -1);
  eval->add_option("--total", eval_total)->expected(1, -1);
  eval->add_option("--training-sizes", eval_sizes, "Train one model per prefix size")->expected(1, -1);
  eval->add_option("--order", eval_order);
  eval->add_option("--smoothing", eval_smoothing);
  eval->add_option("--shards", eval_shards, "Training threads");
  eval->add_option("--csv", eval_csv, "Write the hits grid as CSV");
  eval->callback([&] {
    action = [&] {
      nlohmann::json sets_json = nlohmann::json::parse(text::read_file(eval_sets));
      std::optional<nlohmann::json> answers;
      if (!eval_answers.empty()) answers = nlohmann::json::parse(text::read_file(eval_answers));
      const auto sets = honeywords::sets_from_json(sets_json, answers ? &*answers : nullptr);
      const int order = eval_order ? eval_order : cfg.defaults.model_order;
      const double smoothing = eval_smoothing >= 0 ? eval_smoothing : cfg.defaults.smoothing;
      const std::size_t shards = eval_shards ? eval_shards : std::max(1u, std::thread::hardware_concurrency());

      std::vector<PasswordModel> models;
      if (!eval_model.empty()) {
        models.push_back(PasswordModel::load(eval_model));
      } else {
        if (eval_training.empty()) throw Error(ErrorCode::kInvalidArgument, "need --training or --model");
        const auto all = load_training(eval_training, 0);
        if (eval_sizes.empty()) eval_sizes = {all.size()};
        for (auto n : eval_sizes) {
          if (n > all.size())
            throw Error(ErrorCode::kInvalidArgument, "training size " + std::to_string(n) +
                                                         " exceeds " + std::to_string(all.size()) + " passwords");
          models.push_back(train_model({all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n)}, order,
                                       smoothing, shards));
        }
      }
      if (!eval_save.empty()) models.back().save(eval_save);
      std::vector<honeywords::SweepModel> sweep_models;
      for (const auto& m : models) sweep_models.push_back({m.training_size(), &m});
      const auto rows = honeywords::parameter_sweep(sets, sweep_models, eval_per_user, eval_total);
      if (!eval_csv.empty()) text::write_file(eval_csv, honeywords::sweep_to_csv(rows));
      std::cout << "training_size  per_user  total  hits  failed\n";
      for (const auto& r : rows) {
        std::printf("%13zu  %8zu  %5zu  %4zu  %6zu\n", r.training_size, r.per_user_limit,
                    r.total_fail_limit, r.hits, r.failed_attempts_used);
      }
      return kOk;
    };
  });

  // oracle -------------------------------------------------------------------
  auto* oracle = app.add_subcommand("oracle", "Left-or-right distinguishing game");
  std::string oracle_pairs, oracle_training;
  std::uint64_t oracle_seed = 0;
  int oracle_order = 0;
  oracle->add_option("--pairs", oracle_pairs, "CSV with real,decoy columns")->required()->check(CLI::ExistingFile);
  oracle->add_option("--training", oracle_training)->required()->check(CLI::ExistingFile);
  oracle->add_option("--seed", oracle_seed);
  oracle->add_option("--order", oracle_order);
  oracle->callback([&] {
    action = [&] {
      std::vector<honeywords::LeftRightPair> pairs;
      const std::string content = text::read_file(oracle_pairs);
      const auto lines = text::split_lines(content);
      for (std::size_t i = 0; i < lines.size(); ++i) {
        if (text::is_blank(lines[i])) continue;
        auto f = dsv::split_record(lines[i], ',');
        if (i == 0 && f.size() == 2 && f[0] == "real" && f[1] == "decoy") continue;
        if (f.size() != 2)
          throw Error(ErrorCode::kParseError, oracle_pairs + ":" + std::to_string(i + 1) + ": expected real,decoy");
        pairs.push_back({f[0], f[1]});
      }
      const auto model = train_model(load_training(oracle_training, 0),
                                     oracle_order ? oracle_order : cfg.defaults.model_order,
                                     cfg.defaults.smoothing);
      const auto r = honeywords::left_right_oracle(pairs, model, oracle_seed);
      std::cout << nlohmann::json{{"trials", r.trials}, {"successes", r.successes}, {"rate", r.rate}}.dump()
                << '\n';
      return kOk;
    };
  });

  // baseline -----------------------------------------------------------------
  auto* base = app.add_subcommand("baseline", "Random-guess attacker baseline");
  std::size_t base_users = 1000, base_k = 20, base_per_user = 10, base_total = 500, base_trials = 2000;
  std::uint64_t base_seed = 0;
  base->add_option("--users", base_users);
  base->add_option("--k", base_k);
  base->add_option("--per-user", base_per_user);
  base->add_option("--total", base_total);
  base->add_option("--trials", base_trials);
  base->add_option("--seed", base_seed);
  base->callback([&] {
    action = [&] {
      honeywords::AttackConfig c{base_per_user, base_total, 0, base_seed};
      const auto r = honeywords::random_baseline(base_users, base_k, c, base_trials, base_seed);
      const double se = r.std_hits / std::sqrt(static_cast<double>(r.trials));
      std::cout << nlohmann::json{{"mean_hits", std::stod(fmt(r.mean_hits))},
                                  {"std", std::stod(fmt(r.std_hits))},
                                  {"standard_error", std::stod(fmt(se))},
                                  {"trials", r.trials}}
                       .dump()
                << '\n';
      return kOk;
    };
  });

  // synth-leak ---------------------------------------------------------------
  auto* synth = app.add_subcommand("synth-leak", "Generate a synthetic credential leak");
  std::size_t synth_n = 10000;
  std::uint64_t synth_seed = 0;
  double synth_pii = 0.5;
  std::string synth_out;
  synth->add_option("--n", synth_n);
  synth->add_option("--seed", synth_seed);
  synth->add_option("--pii-fraction", synth_pii)->check(CLI::Range(0.0, 1.0));
  synth->add_option("--out", synth_out)->required();
  synth->callback([&] {
    action = [&] {
      const auto leak = honeywords::synth_leak(synth_n, synth_seed, {synth_pii});
      text::write_file(synth_out, honeywords::leak_to_csv(leak));
      std::cout << "records " << leak.size() << '\n';
      return kOk;
    };
  });

  // sample -------------------------------------------------------------------
  auto* sample = app.add_subcommand("sample", "Draw complete records from a leak");
  std::string sample_leak, sample_out, sample_schema;
  std::size_t sample_n = 1000;
  std::uint64_t sample_seed = 0;
  sample->add_option("--leak", sample_leak)->required()->check(CLI::ExistingFile);
  sample->add_option("--schema", sample_schema, "JSON column mapping")->check(CLI::ExistingFile);
  sample->add_option("--n", sample_n);
  sample->add_option("--seed", sample_seed);
  sample->add_option("--out", sample_out)->required();
  sample->callback([&] {
    action = [&] {
      honeywords::SchemaMap schema;
      if (!sample_schema.empty())
        schema = honeywords::schema_from_json(nlohmann::json::parse(text::read_file(sample_schema)));
      const auto loaded = honeywords::load_leak(sample_leak, schema);
      if (loaded.malformed_rows) print_warning(std::to_string(loaded.malformed_rows) + " malformed rows skipped");
      const auto picked = honeywords::sample_complete(loaded.records, sample_n, sample_seed);
      text::write_file(sample_out, honeywords::leak_to_csv(picked));
      std::cout << "records " << picked.size() << '\n';
      return kOk;
    };
  });

  // build-sweetsets ----------------------------------------------------------
  auto* build = app.add_subcommand("build-sweetsets", "Combine generated decoys with real passwords");
  std::string build_decoys, build_leak, build_out, build_answers;
  std::size_t build_k = 0;
  std::uint64_t build_seed = 0;
  build->add_option("--decoys", build_decoys, "JSON object: username -> [decoys]")->required()->check(CLI::ExistingFile);
  build->add_option("--leak", build_leak, "Leak CSV with the real passwords")->required()->check(CLI::ExistingFile);
  build->add_option("--out", build_out)->required();
  build->add_option("--answers", build_answers, "Write real indices here and leave --out blind");
  build->add_option("--k", build_k);
  build->add_option("--seed", build_seed);
  build->callback([&] {
    action = [&] {
      const auto decoys = nlohmann::json::parse(text::read_file(build_decoys));
      std::map<std::string, std::string> real_of;
      for (const auto& r : honeywords::load_leak(build_leak).records) real_of.emplace(r.username, r.password);
      std::vector<std::vector<std::string>> generated;
      std::vector<std::string> reals, users;
      for (const auto& [user, list] : decoys.items()) {
        auto it = real_of.find(user);
        if (it == real_of.end()) throw Error(ErrorCode::kMissingColumn, "user '" + user + "' not in leak");
        users.push_back(user);
        reals.push_back(it->second);
        generated.push_back(list.get<std::vector<std::string>>());
      }
      const auto sets = honeywords::build_sweetword_sets(generated, reals, users, build_seed,
                                                         build_k ? build_k : cfg.defaults.k);
      const bool blind = !build_answers.empty();
      text::write_file(build_out, honeywords::sets_to_json(sets, blind).dump(1) + "\n");
      if (blind) text::write_file(build_answers, honeywords::answers_to_json(sets).dump(1) + "\n");
      std::cout << "sets " << sets.size() << '\n';
      return kOk;
    };
  });

  // prompts ------------------------------------------------------------------
  auto* prompts = app.add_subcommand("prompts", "Export assembled prompts and their fixture keys");
  std::string prompts_type, prompts_input, prompts_provider, prompts_out;
  prompts->add_option("--type", prompts_type)->required();
  prompts->add_option("--input", prompts_input)->required();
  prompts->add_option("--provider", prompts_provider)->required();
  prompts->add_option("--out", prompts_out, "JSON Lines (default stdout)");
  prompts->callback([&] {
    action = [&] {
      const auto type = parse_token_type(prompts_type);
      const std::string payload = file_or_string(prompts_input);
      std::string out;
      for (const auto& t : enumerate_triples()) {
        const auto p = assemble(t, type, payload);
        out += nlohmann::json{{"triple", t.to_string()},
                              {"prompt_text", p.text},
                              {"key", llm::fixture_key(prompts_provider, p.text)}}
                   .dump() +
               "\n";
      }
      if (prompts_out.empty())
        std::cout << out;
      else
        text::write_file(prompts_out, out);
      return kOk;
    };
  });

  // report -------------------------------------------------------------------
  auto* report = app.add_subcommand("report", "Aggregate a run store");
  std::string report_runs, report_out;
  std::size_t report_top = 20;
  bool report_influence = false, report_qual = false;
  report->add_option("--runs", report_runs);
  report->add_option("--top", report_top, "Ranked table of the best K runs");
  report->add_flag("--block-influence", report_influence, "Score distribution per building block");
  report->add_flag("--qualitative", report_qual, "Qualitative rating matrix");
  report->add_option("--out", report_out, "CSV output");
  report->callback([&] {
    action = [&] {
      if (report_influence && report_qual)
        throw Error(ErrorCode::kInvalidArgument, "--block-influence and --qualitative are exclusive");
      RunStore store(runs_dir(cfg, report_runs));
      std::string csv, table;
      if (report_qual) {
        table = render_rating_matrix(rating_matrix(store.ratings()));
        csv = table;
      } else if (report_influence) {
        csv = block_influence_csv(block_influence(store.runs()));
        table = csv;
      } else {
        const auto runs = store.runs();
        if (rank_runs(runs).empty()) throw Error(ErrorCode::kNoScoredRuns, "no scored runs in store");
        csv = top_runs_csv(runs, report_top);
        table = top_runs_table(runs, report_top);
      }
      if (!report_out.empty()) text::write_file(report_out, csv);
      std::cout << table;
      return kOk;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error("UsageError", e.what());
    return kUsage;
  }

  try {
    cfg = resolve_config(config_path.empty() ? std::nullopt : std::optional<fs::path>(config_path));
    return action();
  } catch (const ProviderFailure& e) {
    print_error(e.code, e.what());
    return kProvider;
  } catch (const Error& e) {
    print_error(to_string(e.code()), e.what());
    return exit_code_for(e.code());
  } catch (const nlohmann::json::exception& e) {
    print_error("ParseError", e.what());
    return kData;
  } catch (const std::exception& e) {
    print_error("InternalError", e.what());
    return kData;
  }
}
