// Exit gate: one PASS/FAIL line per acceptance criterion. Exit status is the
// number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>

#include "cli_util.hpp"
#include "honeygen/honeygen.hpp"
#include "oracles.hpp"

using namespace honeygen;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

const fs::path kFixtures = HONEYGEN_FIXTURES;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

std::string num(double v, int digits = 4) { return text::format_fixed(v, digits); }

fs::path fresh_dir(const std::string& name) {
  auto d = fs::temp_directory_path() / name;
  fs::remove_all(d);
  return d;
}

Outcome prompt_grid() {
  Outcome o;
  const auto start = Clock::now();
  const auto triples = enumerate_triples();
  std::set<std::string> texts;
  const std::string payload = "An outdoor equipment shop with a customer login.";
  for (const auto& t : triples) texts.insert(assemble(t, TokenTypeId::A, payload).text);
  const double took = seconds_since(start);
  o.require(triples.size() == 210, "triple count " + std::to_string(triples.size()));
  o.require(std::set<BlockTriple>(triples.begin(), triples.end()).size() == 210, "duplicate triples");
  o.require(texts.size() == 210, "prompt texts not distinct");

  const auto& b = builtin_blocks();
  const auto& spec = token_spec(TokenTypeId::A);
  auto fill = [&](std::string block) {
    block = text::replace_all(block, "{input}", payload);
    return text::replace_all(block, "{honey_token}", spec.generator_noun);
  };
  const std::string expected = fill(b.generator[1].text) + " " + fill(b.input[4].text) + " " +
                               spec.special_instruction + " " + fill(b.output[1].text);
  const std::string literal =
      "Act as a robots.txt generator. Consider the following information: {" + payload +
      "}. Based on the given information, return a robots.txt file. Some paths of the robots.txt "
      "should be interesting for a potential attacker. Only reply with the robots.txt and nothing "
      "else. Do not write explanations.";
  const std::string got = assemble({1, 4, 1}, TokenTypeId::A, payload).text;
  o.require(got == expected && got == literal, "[1,4,1] text differs");
  o.require(took < 1.0, "took " + num(took, 3) + " s");
  o.detail = o.pass ? "210 distinct prompts in " + num(took, 3) + " s, [1,4,1] exact" : o.detail;
  return o;
}

Outcome variance_formula() {
  Outcome o;
  const auto s = robots::builtin_corpus_stats();
  std::array<double, robots::kFeatureCount> means{};
  for (std::size_t f = 0; f < means.size(); ++f) means[f] = s.features[f].mean;
  const double at_means = robots::variance_score(means, s);
  const double at_zero = robots::variance_score(robots::FeatureVector{}, s);
  o.require(at_means == 3.0, "at means " + num(at_means, 12));
  o.require(std::fabs(at_zero - 2.0889601001188756) <= 1e-9, "all zeros " + num(at_zero, 12));

  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> u(0, 3000);
  std::size_t violations = 0;
  for (int i = 0; i < 1000; ++i) {
    std::array<double, robots::kFeatureCount> x{};
    for (auto& v : x) v = u(rng);
    const auto base = robots::feature_scores(x, s);
    for (std::size_t f = 0; f < x.size(); ++f) {
      auto y = x;
      const double m = s.features[f].mean;
      y[f] = m + (x[f] - m) * (1.0 + std::uniform_real_distribution<double>(0.01, 3)(rng));
      if (robots::feature_scores(y, s)[f] > base[f]) ++violations;
    }
  }
  o.require(violations == 0, std::to_string(violations) + " monotonicity violations");
  if (o.pass) o.detail = "means 3.0, zeros " + num(at_zero, 12) + ", 1000 vectors monotone";
  return o;
}

Outcome feature_oracle() {
  Outcome o;
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(kFixtures / "robots_corpus")) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  const auto& w = robots::builtin_wordlist();
  std::size_t mismatches = 0;
  for (const auto& f : files) {
    const std::string body = text::read_file(f);
    if (!(robots::extract_features(robots::parse_robots(body), w) == oracle::count_features(body, w.entries())))
      ++mismatches;
  }
  o.require(files.size() == 50, std::to_string(files.size()) + " corpus files");
  o.require(mismatches == 0, std::to_string(mismatches) + " files disagree with the oracle");
  if (o.pass) o.detail = "50/50 files match the brute-force counter";
  return o;
}

Outcome random_baseline_check() {
  Outcome o;
  const auto r = honeywords::random_baseline(1000, 20, {10, 500, 0, 0}, 2000, 7);
  const double se = r.std_hits / std::sqrt(static_cast<double>(r.trials));
  const double gap = std::fabs(r.mean_hits - 26.67);
  o.require(gap <= 3 * se, "mean " + num(r.mean_hits) + " is " + num(gap / se, 2) + " SE from 26.67");
  if (o.pass) o.detail = "mean " + num(r.mean_hits) + " (SE " + num(se) + ") over 2000 trials";
  return o;
}

Outcome attack_safety() {
  Outcome o;
  std::mt19937_64 rng(5);
  std::size_t instances = 0, budget_violations = 0, oracle_mismatches = 0, exhaustive = 0;
  for (int i = 0; i < 600; ++i) {
    const bool small = i % 2 == 0;
    const std::size_t max_users = small ? 3 : 15, max_k = small ? 3 : 10;
    std::map<std::string, double> scores;
    const std::size_t pool = 2 + rng() % (3 * max_k);
    for (std::size_t p = 0; p < pool; ++p)
      scores["p" + std::to_string(p)] = rng() % 13 == 0 ? std::nan("") : static_cast<double>(rng() % 6);
    std::vector<honeywords::SweetwordSet> sets(1 + rng() % max_users);
    for (auto& s : sets) {
      s.user_id = "u" + std::to_string(rng() % 50);
      const std::size_t k = 1 + rng() % max_k;
      for (std::size_t c = 0; c < k; ++c) s.candidates.push_back("p" + std::to_string(rng() % pool));
      s.real_index = rng() % k;
    }
    const std::size_t tu = rng() % (max_k + 2), tf = rng() % (sets.size() * max_k + 3);
    auto score = [&](std::string_view pw) { return scores.at(std::string(pw)); };
    const auto r = honeywords::simulate_attack(sets, score, {tu, tf, 0, 0});
    ++instances;
    bool ok = r.failed_attempts_used <= tf;
    for (const auto& ua : r.per_user) ok = ok && ua.attempts_made - (ua.hit ? 1 : 0) <= tu;
    if (!ok) ++budget_violations;
    const auto ex = oracle::exhaustive_attack(sets, score, tu, tf);
    bool same = ex.hits == r.hits && ex.failed == r.failed_attempts_used;
    for (std::size_t u = 0; u < sets.size(); ++u) same = same && ex.attempts[u] == r.per_user[u].attempts_made;
    if (!same) ++oracle_mismatches;
    if (small) ++exhaustive;
  }
  o.require(budget_violations == 0, std::to_string(budget_violations) + " budget violations");
  o.require(oracle_mismatches == 0, std::to_string(oracle_mismatches) + " oracle mismatches");
  if (o.pass)
    o.detail = std::to_string(instances) + " instances within budget, all equal to the exhaustive oracle (" +
               std::to_string(exhaustive) + " of them <=3x3)";
  return o;
}

std::string random_string(std::mt19937_64& rng) {
  static const std::string chars =
      "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789!@#$%^&*()-_=+[]{};:,.?/";
  std::string s(std::uniform_int_distribution<int>(8, 12)(rng), ' ');
  for (auto& c : s) c = chars[rng() % chars.size()];
  return s;
}

Outcome distinguishing_oracle() {
  Outcome o;
  const auto leak = honeywords::synth_leak(10000, 2024);
  std::vector<std::string> train;
  for (std::size_t i = 4000; i < leak.size(); ++i) train.push_back(leak[i].password);
  const auto model = train_model(train, 4, 1.0, 4);

  std::mt19937_64 rng(9);
  std::vector<honeywords::LeftRightPair> weak, matched;
  for (std::size_t i = 0; i < 2000; ++i) {
    weak.push_back({leak[i].password, random_string(rng)});
    matched.push_back({leak[i].password, leak[2000 + i].password});
  }
  const auto rw = honeywords::left_right_oracle(weak, model, 1);
  const auto rm = honeywords::left_right_oracle(matched, model, 1);
  const double band = 1.96 * std::sqrt(0.25 / static_cast<double>(rm.trials));
  o.require(rw.rate >= 0.90, "random-string decoys only " + num(rw.rate));
  o.require(std::fabs(rm.rate - 0.5) <= band,
            "same-distribution rate " + num(rm.rate) + " outside 0.5 +/- " + num(band));
  if (o.pass)
    o.detail = "random decoys " + num(rw.rate) + ", same-distribution " + num(rm.rate) + " (band " +
               num(band) + ", " + std::to_string(rm.trials) + " pairs)";
  return o;
}

Outcome sweep_trends() {
  Outcome o;
  const std::size_t users = 1000;
  const auto leak = honeywords::synth_leak(users + 100000, 31);
  const auto other = honeywords::synth_leak(users * 10, 32);
  std::vector<std::string> train;
  for (std::size_t i = users; i < leak.size(); ++i) train.push_back(leak[i].password);

  std::mt19937_64 rng(33);
  std::vector<std::vector<std::string>> decoys(users);
  std::vector<std::string> reals, ids;
  for (std::size_t u = 0; u < users; ++u) {
    for (std::size_t i = 0; i < 10; ++i) decoys[u].push_back(other[u * 10 + i].password);
    while (decoys[u].size() < 20) decoys[u].push_back(random_string(rng));
    reals.push_back(leak[u].password);
    ids.push_back(leak[u].username);
  }
  const auto sets = honeywords::build_sweetword_sets(decoys, reals, ids, 34);
  const auto small = train_model({train.begin(), train.begin() + 1000}, 4, 1.0, 4);
  const auto large = train_model(train, 4, 1.0, 4);
  const std::vector<std::size_t> tu(honeywords::kPerUserLimits.begin(), honeywords::kPerUserLimits.end());
  const std::vector<std::size_t> tf(honeywords::kTotalFailLimits.begin(), honeywords::kTotalFailLimits.end());
  const auto rows = honeywords::parameter_sweep(sets, {{1000, &small}, {100000, &large}}, tu, tf);

  std::map<std::tuple<std::size_t, std::size_t, std::size_t>, std::size_t> hits;
  for (const auto& r : rows) hits[{r.training_size, r.per_user_limit, r.total_fail_limit}] = r.hits;
  std::size_t tf_breaks = 0, tu_breaks = 0;
  for (std::size_t n : {1000u, 100000u}) {
    for (std::size_t a = 0; a < tu.size(); ++a) {
      for (std::size_t b = 0; b < tf.size(); ++b) {
        const auto h = hits[{n, tu[a], tf[b]}];
        if (b + 1 < tf.size() && hits[{n, tu[a], tf[b + 1]}] < h) ++tf_breaks;
        if (a + 1 < tu.size() && hits[{n, tu[a + 1], tf[b]}] < h) ++tu_breaks;
      }
    }
  }
  // The trend is judged on the hit rate over the whole grid; single cells
  // where the two models tie up to noise are reported but not decisive.
  std::size_t sum_small = 0, sum_large = 0;
  std::string worse;
  for (auto a : tu) {
    for (auto b : tf) {
      sum_small += hits[{1000, a, b}];
      sum_large += hits[{100000, a, b}];
      if (hits[{100000, a, b}] < hits[{1000, a, b}])
        worse += " T_u=" + std::to_string(a) + ",T_f=" + std::to_string(b) + " " +
                 std::to_string(hits[{100000, a, b}]) + "<" + std::to_string(hits[{1000, a, b}]);
    }
  }
  const double cells = static_cast<double>(tu.size() * tf.size() * users);
  const double rate_small = static_cast<double>(sum_small) / cells;
  const double rate_large = static_cast<double>(sum_large) / cells;
  o.require(tf_breaks == 0, std::to_string(tf_breaks) + " decreases along T_f");
  o.require(tu_breaks == 0, std::to_string(tu_breaks) + " decreases along T_u");
  o.require(rate_large >= rate_small, "grid hit rate 100k " + num(rate_large) + " < 1k " + num(rate_small));
  if (o.pass)
    o.detail = "32 cells monotone in T_f and T_u; grid hit rate " + num(rate_small) + " (1k) vs " +
               num(rate_large) + " (100k)" + (worse.empty() ? "" : "; cells with 100k<1k:" + worse);
  return o;
}

Outcome replay_sweep() {
  Outcome o;
  const auto start = Clock::now();
  std::vector<std::string> reports;
  for (const char* name : {"hg_accept_sweep_a", "hg_accept_sweep_b"}) {
    const auto runs = fresh_dir(name);
    const auto r = testutil::run_cli({"sweep", "--type", "A", "--input", (kFixtures / "input_a.txt").string(),
                                      "--provider", "fixture-llm", "--replay", "--fixtures",
                                      (kFixtures / "replay_a").string(), "--runs", runs.string()});
    o.require(r.code == 0, std::string(name) + " sweep exit " + std::to_string(r.code));
    const auto rep = testutil::run_cli({"report", "--runs", runs.string(), "--top", "20"});
    o.require(rep.code == 0, std::string(name) + " report exit " + std::to_string(rep.code));
    reports.push_back(rep.out);
  }
  const double took = seconds_since(start);
  o.require(reports[0] == reports[1], "reports differ");
  o.require(!reports[0].empty(), "empty report");
  o.require(took < 30.0, "took " + num(took, 1) + " s");
  if (o.pass) o.detail = "two replay sweeps, identical top-20 reports, " + num(took, 2) + " s";
  return o;
}

Outcome labelled_validators() {
  Outcome o;
  const auto dir = kFixtures / "honeywords_b";
  const auto labels = nlohmann::json::parse(text::read_file(dir / "labels.json"));
  std::size_t agree = 0;
  for (const auto& [file, label] : labels.items()) {
    const auto c = categorize_honeyword_response(text::read_file(dir / file));
    const std::string got = c == HoneywordResponseCategory::kExact   ? "exact"
                            : c == HoneywordResponseCategory::kFewer ? "fewer"
                            : c == HoneywordResponseCategory::kNone  ? "none"
                                                                     : "more";
    if (got == label.get<std::string>()) ++agree;
  }
  o.require(labels.size() == 30 && agree == labels.size(),
            std::to_string(agree) + "/" + std::to_string(labels.size()) + " labels agree");

  const std::vector<std::string> cols = {"full name", "email address", "password",
                                         "phone number", "birthday", "company id"};
  const std::vector<std::string> vals = {"Ann Lee", "ann@example.org", "pw1", "555-0101", "1991-05-06", "123456"};
  std::string full_head, full_row;
  for (std::size_t c = 0; c < 6; ++c) {
    full_head += (c ? "," : "") + cols[c];
    full_row += (c ? "," : "") + vals[c];
  }
  o.require(validate(TokenTypeId::G, full_head + "\n" + full_row + "\n").valid, "complete table rejected");
  std::size_t rejected = 0;
  for (std::size_t drop = 0; drop < 6; ++drop) {
    std::string head, row;
    for (std::size_t c = 0; c < 6; ++c) {
      if (c == drop) continue;
      head += (head.empty() ? "" : ",") + cols[c];
      row += (row.empty() ? "" : ",") + vals[c];
    }
    const auto r = validate(TokenTypeId::G, head + "\n" + row + "\n");
    const bool missing = std::any_of(r.findings.begin(), r.findings.end(),
                                     [](const Finding& f) { return f.code == "MissingColumn"; });
    if (!r.valid && missing) ++rejected;
  }
  o.require(rejected == 6, std::to_string(rejected) + "/6 incomplete tables rejected");
  if (o.pass) o.detail = "30/30 honeyword labels agree; 6/6 incomplete tables rejected";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"prompt grid and [1,4,1] wording", prompt_grid},
      {"variance score formula", variance_formula},
      {"feature extraction vs oracle", feature_oracle},
      {"random-guess baseline", random_baseline_check},
      {"attack budgets and greedy order", attack_safety},
      {"distinguishing oracle", distinguishing_oracle},
      {"sweep trends", sweep_trends},
      {"replay sweep and report", replay_sweep},
      {"type B labels and type G columns", labelled_validators},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    if (!o.pass) ++failed;
    std::printf("criterion %zu %s: %s (%s)\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failed;
}
