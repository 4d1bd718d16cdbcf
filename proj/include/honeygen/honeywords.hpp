#pragma once

// Honeyword evaluation: leak ingestion, sweetword sets (one real password
// hidden among k-1 decoys), the trawling guessing attacker under per-user
// and global failed-login budgets, the left-or-right oracle and the
// random-guess baseline.

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <queue>
#include <random>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "honeygen/dsv.hpp"
#include "honeygen/error.hpp"
#include "honeygen/password_model.hpp"
#include "honeygen/text.hpp"

namespace honeygen::honeywords {

// ---------------------------------------------------------------------------
// Leak records

struct LeakRecord {
  std::string username;
  std::string password;
  std::string first_name;
  std::string last_name;
  std::string email;
  std::string date_of_birth;  // YYYY-MM-DD

  bool operator==(const LeakRecord&) const = default;

  bool complete() const {
    return !username.empty() && !password.empty() && !first_name.empty() &&
           !last_name.empty() && !email.empty() && !date_of_birth.empty();
  }
};

// Leak column name for each retained field.
struct SchemaMap {
  std::string username = "username";
  std::string password = "password";
  std::string first_name = "first_name";
  std::string last_name = "last_name";
  std::string email = "email";
  std::string date_of_birth = "date_of_birth";
};

inline SchemaMap schema_from_json(const nlohmann::json& j) {
  SchemaMap s;
  s.username = j.value("username", s.username);
  s.password = j.value("password", s.password);
  s.first_name = j.value("first_name", s.first_name);
  s.last_name = j.value("last_name", s.last_name);
  s.email = j.value("email", s.email);
  s.date_of_birth = j.value("date_of_birth", s.date_of_birth);
  return s;
}

struct LeakLoadResult {
  std::vector<LeakRecord> records;
  std::size_t malformed_rows = 0;
};

inline LeakLoadResult parse_leak(std::string_view body, const SchemaMap& schema = {},
                                 char delimiter = ',') {
  auto lines = text::split_lines(body);
  auto first = std::find_if(lines.begin(), lines.end(),
                            [](std::string_view l) { return !text::is_blank(l); });
  if (first == lines.end()) throw Error(ErrorCode::kMissingColumn, "leak file has no header");
  std::vector<std::string> header = dsv::split_record(*first, delimiter);
  for (auto& h : header) h = std::string(text::trim(h));
  auto column = [&](const std::string& name) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw Error(ErrorCode::kMissingColumn, "missing column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::array<std::size_t, 6> idx = {column(schema.username),   column(schema.password),
                                          column(schema.first_name), column(schema.last_name),
                                          column(schema.email),      column(schema.date_of_birth)};

  LeakLoadResult out;
  std::vector<std::string> fields;
  for (auto it = std::next(first); it != lines.end(); ++it) {
    if (text::is_blank(*it)) continue;
    if (!dsv::split_record(*it, delimiter, fields) || fields.size() != header.size()) {
      ++out.malformed_rows;
      continue;
    }
    out.records.push_back({fields[idx[0]], fields[idx[1]], fields[idx[2]], fields[idx[3]],
                           fields[idx[4]], fields[idx[5]]});
  }
  return out;
}

inline LeakLoadResult load_leak(const std::filesystem::path& path, const SchemaMap& schema = {},
                                char delimiter = ',') {
  return parse_leak(text::read_file(path), schema, delimiter);
}

inline std::string leak_to_csv(const std::vector<LeakRecord>& records) {
  std::string out = "username,password,first_name,last_name,email,date_of_birth\n";
  for (const auto& r : records) {
    for (const std::string* f : {&r.username, &r.password, &r.first_name, &r.last_name, &r.email,
                                 &r.date_of_birth}) {
      if (f != &r.username) out.push_back(',');
      out += dsv::quote_field(*f, ',');
    }
    out.push_back('\n');
  }
  return out;
}

// Uniform sample without replacement among complete records, in draw order.
inline std::vector<LeakRecord> sample_complete(const std::vector<LeakRecord>& records,
                                               std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> pool;
  for (std::size_t i = 0; i < records.size(); ++i)
    if (records[i].complete()) pool.push_back(i);
  if (pool.size() < n)
    throw Error(ErrorCode::kInsufficientCompleteRecords,
                "requested " + std::to_string(n) + " complete records, only " +
                    std::to_string(pool.size()) + " available");
  std::mt19937_64 rng(seed);
  std::vector<LeakRecord> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
    std::swap(pool[i], pool[pick(rng)]);
    out.push_back(records[pool[i]]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sweetword sets

inline constexpr std::size_t kDefaultSweetwords = 20;

struct SweetwordSet {
  std::string user_id;
  std::vector<std::string> candidates;
  std::size_t real_index = 0;

  bool operator==(const SweetwordSet&) const = default;

  const std::string& real() const { return candidates.at(real_index); }
};

// Each decoy list keeps a uniformly chosen k-1 of its first k entries (one
// discarded at random), then the real password goes in at a uniformly
// chosen position.
inline std::vector<SweetwordSet> build_sweetword_sets(
    const std::vector<std::vector<std::string>>& generated, const std::vector<std::string>& reals,
    const std::vector<std::string>& user_ids, std::uint64_t seed,
    std::size_t k = kDefaultSweetwords) {
  if (generated.size() != reals.size() || reals.size() != user_ids.size())
    throw Error(ErrorCode::kInvalidArgument, "decoys, reals and user ids differ in length");
  if (k < 1) throw Error(ErrorCode::kInvalidArgument, "k must be at least 1");
  std::mt19937_64 rng(seed);
  std::vector<SweetwordSet> sets;
  sets.reserve(reals.size());
  for (std::size_t u = 0; u < reals.size(); ++u) {
    const auto& decoys = generated[u];
    if (decoys.size() < k)
      throw Error(ErrorCode::kTooFewDecoys, "user " + user_ids[u] + ": " +
                                                std::to_string(decoys.size()) + " decoys, need " +
                                                std::to_string(k));
    SweetwordSet set{user_ids[u], {}, 0};
    std::uniform_int_distribution<std::size_t> drop(0, k - 1);
    const std::size_t dropped = drop(rng);
    for (std::size_t i = 0; i < k; ++i)
      if (i != dropped) set.candidates.push_back(decoys[i]);
    std::uniform_int_distribution<std::size_t> place(0, k - 1);
    set.real_index = place(rng);
    set.candidates.insert(set.candidates.begin() + static_cast<std::ptrdiff_t>(set.real_index),
                          reals[u]);
    sets.push_back(std::move(set));
  }
  return sets;
}

// Blind mode leaves out real_index; supply it separately for scoring.
inline nlohmann::json sets_to_json(const std::vector<SweetwordSet>& sets, bool blind = false) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& s : sets) {
    nlohmann::json j = {{"user_id", s.user_id}, {"candidates", s.candidates}};
    if (!blind) j["real_index"] = s.real_index;
    arr.push_back(std::move(j));
  }
  return arr;
}

inline nlohmann::json answers_to_json(const std::vector<SweetwordSet>& sets) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& s : sets) j[s.user_id] = s.real_index;
  return j;
}

inline std::vector<SweetwordSet> sets_from_json(const nlohmann::json& j,
                                                const nlohmann::json* answers = nullptr) {
  std::vector<SweetwordSet> sets;
  try {
    for (const auto& entry : j) {
      SweetwordSet s;
      s.user_id = entry.at("user_id").get<std::string>();
      s.candidates = entry.at("candidates").get<std::vector<std::string>>();
      if (answers != nullptr)
        s.real_index = answers->at(s.user_id).get<std::size_t>();
      else
        s.real_index = entry.at("real_index").get<std::size_t>();
      if (s.real_index >= s.candidates.size())
        throw Error(ErrorCode::kParseError, "user " + s.user_id + ": real_index out of range");
      sets.push_back(std::move(s));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("sweetword sets: ") + e.what());
  }
  return sets;
}

// ---------------------------------------------------------------------------
// Attack simulation

template <typename F>
concept PasswordScorer = std::invocable<const F&, std::string_view> &&
    std::convertible_to<std::invoke_result_t<const F&, std::string_view>, double>;

inline auto model_scorer(const PasswordModel& model) {
  return [&model](std::string_view pw) { return model.log_prob(pw); };
}

struct AttackConfig {
  std::size_t per_user_limit = 10;     // failed attempts before a user is blocked
  std::size_t total_fail_limit = 500;  // failed attempts before the service shuts down
  std::size_t training_size = 0;
  std::uint64_t seed = 0;
};

struct UserAttack {
  std::string user_id;
  std::size_t attempts_made = 0;
  bool hit = false;
  // 1-based position of the real password in the attacker's ordering of
  // this user's distinct candidates.
  std::size_t rank_of_real = 0;
};

struct AttackResult {
  std::size_t hits = 0;
  std::size_t failed_attempts_used = 0;
  std::vector<UserAttack> per_user;
};

namespace detail {

struct RankedCandidates {
  std::vector<std::pair<double, std::string>> order;  // score desc, then string asc
  std::size_t rank_of_real = 0;
};

template <PasswordScorer Scorer>
RankedCandidates rank_candidates(const SweetwordSet& set, const Scorer& score) {
  RankedCandidates out;
  std::vector<std::string> unique = set.candidates;
  std::sort(unique.begin(), unique.end());
  unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
  for (auto& c : unique) {
    double s = static_cast<double>(score(std::string_view(c)));
    if (std::isnan(s)) s = -std::numeric_limits<double>::infinity();
    out.order.emplace_back(s, std::move(c));
  }
  std::stable_sort(out.order.begin(), out.order.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  const std::string& real = set.real();
  for (std::size_t i = 0; i < out.order.size(); ++i) {
    if (out.order[i].second == real) {
      out.rank_of_real = i + 1;
      break;
    }
  }
  return out;
}

}  // namespace detail

// Greedy trawling attacker: always tries the globally most probable untried
// (user, candidate) pair among users that are neither solved nor blocked.
// Ties go to the lexicographically smaller candidate, then the smaller
// user_id. A hit ends the attack on that user and costs no budget; a miss
// counts against the user's limit and the global limit, and reaching the
// global limit stops everything.
template <PasswordScorer Scorer>
AttackResult simulate_attack(const std::vector<SweetwordSet>& sets, const Scorer& score,
                             const AttackConfig& config) {
  AttackResult result;
  result.per_user.resize(sets.size());
  std::vector<detail::RankedCandidates> ranked;
  ranked.reserve(sets.size());
  for (std::size_t u = 0; u < sets.size(); ++u) {
    ranked.push_back(detail::rank_candidates(sets[u], score));
    result.per_user[u].user_id = sets[u].user_id;
    result.per_user[u].rank_of_real = ranked.back().rank_of_real;
  }

  struct Entry {
    std::size_t user;
    std::size_t position;
  };
  auto before = [&](const Entry& a, const Entry& b) {
    const auto& ca = ranked[a.user].order[a.position];
    const auto& cb = ranked[b.user].order[b.position];
    if (ca.first != cb.first) return ca.first > cb.first;
    if (ca.second != cb.second) return ca.second < cb.second;
    if (sets[a.user].user_id != sets[b.user].user_id)
      return sets[a.user].user_id < sets[b.user].user_id;
    return a.user < b.user;
  };
  // priority_queue pops the "largest", so invert.
  auto cmp = [&](const Entry& a, const Entry& b) { return before(b, a); };
  std::priority_queue<Entry, std::vector<Entry>, decltype(cmp)> queue(cmp);

  if (config.per_user_limit > 0 && config.total_fail_limit > 0) {
    for (std::size_t u = 0; u < sets.size(); ++u)
      if (!ranked[u].order.empty()) queue.push({u, 0});
  }
  std::vector<std::size_t> failures(sets.size(), 0);
  while (!queue.empty() && result.failed_attempts_used < config.total_fail_limit) {
    const Entry e = queue.top();
    queue.pop();
    UserAttack& ua = result.per_user[e.user];
    ++ua.attempts_made;
    if (e.position + 1 == ranked[e.user].rank_of_real) {
      ua.hit = true;
      ++result.hits;
      continue;
    }
    ++failures[e.user];
    ++result.failed_attempts_used;
    if (failures[e.user] < config.per_user_limit && e.position + 1 < ranked[e.user].order.size())
      queue.push({e.user, e.position + 1});
  }
  return result;
}

inline AttackResult simulate_attack(const std::vector<SweetwordSet>& sets,
                                    const PasswordModel& model, const AttackConfig& config) {
  return simulate_attack(sets, model_scorer(model), config);
}

// ---------------------------------------------------------------------------
// Left-or-right oracle

struct LeftRightPair {
  std::string real;
  std::string decoy;
};

struct OracleResult {
  std::size_t trials = 0;
  std::size_t successes = 0;
  double rate = 0;
};

// Picks the more probable password of each pair; exact ties are a seeded
// coin flip.
template <PasswordScorer Scorer>
OracleResult left_right_oracle(const std::vector<LeftRightPair>& pairs, const Scorer& score,
                               std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(0.5);
  OracleResult r;
  for (const auto& p : pairs) {
    const double sr = score(std::string_view(p.real));
    const double sd = score(std::string_view(p.decoy));
    const bool picked_real = sr == sd ? coin(rng) : sr > sd;
    ++r.trials;
    if (picked_real) ++r.successes;
  }
  r.rate = r.trials == 0 ? 0.0 : static_cast<double>(r.successes) / static_cast<double>(r.trials);
  return r;
}

inline OracleResult left_right_oracle(const std::vector<LeftRightPair>& pairs,
                                      const PasswordModel& model, std::uint64_t seed) {
  return left_right_oracle(pairs, model_scorer(model), seed);
}

// ---------------------------------------------------------------------------
// Random-guess baseline

struct BaselineResult {
  double mean_hits = 0;
  double std_hits = 0;  // sample standard deviation over trials
  std::size_t trials = 0;
  std::vector<std::size_t> histogram;  // histogram[h] = trials with h hits
};

// Monte Carlo of an attacker without a model: every (user, candidate) pair
// gets a random priority and the greedy schedule above runs on those, with
// the same budgets. Each user's real password sits at a uniform position.
inline BaselineResult random_baseline(std::size_t users, std::size_t k, const AttackConfig& config,
                                      std::size_t trials, std::uint64_t seed) {
  if (trials == 0) throw Error(ErrorCode::kInvalidArgument, "trials must be >= 1");
  if (k == 0) throw Error(ErrorCode::kInvalidArgument, "k must be >= 1");
  std::mt19937_64 rng(seed);
  BaselineResult out;
  out.trials = trials;
  out.histogram.assign(users + 1, 0);
  std::vector<std::uint32_t> pool(users * k);
  std::vector<std::size_t> real(users), failures(users);
  std::vector<char> solved(users);
  std::uniform_int_distribution<std::size_t> real_pos(0, k - 1);
  double sum = 0, sum_sq = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    std::iota(pool.begin(), pool.end(), 0u);
    for (auto& r : real) r = real_pos(rng);
    std::fill(failures.begin(), failures.end(), 0);
    std::fill(solved.begin(), solved.end(), 0);
    std::size_t hits = 0, failed = 0, remaining = pool.size();
    if (config.per_user_limit > 0) {
      while (failed < config.total_fail_limit && remaining > 0) {
        std::uniform_int_distribution<std::size_t> pick(0, remaining - 1);
        const std::size_t j = pick(rng);
        const std::uint32_t pair = pool[j];
        pool[j] = pool[--remaining];
        const std::size_t u = pair / k, c = pair % k;
        if (solved[u] || failures[u] >= config.per_user_limit) continue;
        if (c == real[u]) {
          solved[u] = 1;
          ++hits;
        } else {
          ++failures[u];
          ++failed;
        }
      }
    }
    ++out.histogram[hits];
    sum += static_cast<double>(hits);
    sum_sq += static_cast<double>(hits) * static_cast<double>(hits);
  }
  const double n = static_cast<double>(trials);
  out.mean_hits = sum / n;
  out.std_hits = trials > 1 ? std::sqrt(std::max(0.0, (sum_sq - n * out.mean_hits * out.mean_hits) / (n - 1))) : 0.0;
  return out;
}

// ---------------------------------------------------------------------------
// Parameter sweep

inline constexpr std::array<std::size_t, 4> kTotalFailLimits = {50, 100, 250, 500};
inline constexpr std::array<std::size_t, 4> kPerUserLimits = {1, 3, 5, 10};
inline constexpr std::array<std::size_t, 3> kTrainingSizes = {10'000, 100'000, 1'000'000};

struct SweepModel {
  std::size_t training_size = 0;
  const PasswordModel* model = nullptr;
};

struct SweepRow {
  std::size_t training_size = 0;
  std::size_t per_user_limit = 0;
  std::size_t total_fail_limit = 0;
  std::size_t hits = 0;
  std::size_t failed_attempts_used = 0;
};

// Every (model, T_u, T_f) cell, ordered by training size, then per-user
// limit, then total limit, in the order given. Cells run in parallel.
inline std::vector<SweepRow> parameter_sweep(const std::vector<SweetwordSet>& sets,
                                             const std::vector<SweepModel>& models,
                                             const std::vector<std::size_t>& per_user_limits,
                                             const std::vector<std::size_t>& total_fail_limits,
                                             std::size_t parallelism = 0) {
  std::vector<SweepRow> rows;
  for (const auto& m : models)
    for (auto tu : per_user_limits)
      for (auto tf : total_fail_limits) rows.push_back({m.training_size, tu, tf, 0, 0});
  if (rows.empty()) return rows;

  // Scores depend only on the model, so compute each candidate once.
  std::vector<std::unordered_map<std::string, double>> scores(models.size());
  for (std::size_t mi = 0; mi < models.size(); ++mi) {
    for (const auto& s : sets)
      for (const auto& c : s.candidates)
        scores[mi].try_emplace(c, models[mi].model->log_prob(c));
  }

  const std::size_t cells_per_model = per_user_limits.size() * total_fail_limits.size();
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < rows.size(); i = next++) {
      const auto& table = scores[i / cells_per_model];
      AttackConfig config{rows[i].per_user_limit, rows[i].total_fail_limit, rows[i].training_size, 0};
      auto result = simulate_attack(
          sets, [&table](std::string_view pw) { return table.at(std::string(pw)); }, config);
      rows[i].hits = result.hits;
      rows[i].failed_attempts_used = result.failed_attempts_used;
    }
  };
  if (parallelism == 0) parallelism = std::max(1u, std::thread::hardware_concurrency());
  {
    std::vector<std::jthread> workers;
    for (std::size_t w = 0; w < std::min(parallelism, rows.size()); ++w) workers.emplace_back(worker);
  }
  return rows;
}

inline std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
  std::string out = "training_size,per_user_limit,total_fail_limit,hits,failed_attempts_used\n";
  for (const auto& r : rows) {
    out += std::to_string(r.training_size) + "," + std::to_string(r.per_user_limit) + "," +
           std::to_string(r.total_fail_limit) + "," + std::to_string(r.hits) + "," +
           std::to_string(r.failed_attempts_used) + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Synthetic leak

struct SynthOptions {
  // Fraction of passwords built from the record's own name or birth date.
  double pii_fraction = 0.5;
};

namespace synth_data {

inline const std::vector<std::string_view>& first_names() {
  static const std::vector<std::string_view> v = {
      "James",  "Mary",    "John",    "Patricia", "Robert",  "Jennifer", "Michael", "Linda",
      "William", "Elizabeth", "David", "Barbara", "Richard", "Susan",    "Joseph",  "Jessica",
      "Thomas", "Sarah",   "Charles", "Karen",    "Daniel",  "Nancy",    "Matthew", "Lisa",
      "Anthony", "Betty",  "Mark",    "Margaret", "Donald",  "Sandra",   "Steven",  "Ashley",
      "Paul",   "Kimberly", "Andrew", "Emily",    "Joshua",  "Donna",    "Kevin",   "Michelle",
      "Brian",  "Carol",   "George",  "Amanda",   "Edward",  "Melissa",  "Ronald",  "Deborah",
      "Timothy", "Stephanie", "Jason", "Rebecca", "Jeffrey", "Laura",    "Ryan",    "Sharon",
      "Jacob",  "Cynthia", "Gary",    "Kathleen", "Anna",    "Lukas",    "Sofia",   "Mateo",
      "Priya",  "Arjun",   "Mei",     "Hiroshi",  "Fatima",  "Omar",     "Elena",   "Ivan"};
  return v;
}

inline const std::vector<std::string_view>& last_names() {
  static const std::vector<std::string_view> v = {
      "Smith",    "Johnson",  "Williams", "Brown",    "Jones",    "Garcia",  "Miller",
      "Davis",    "Rodriguez", "Martinez", "Hernandez", "Lopez",  "Gonzalez", "Wilson",
      "Anderson", "Thomas",   "Taylor",   "Moore",    "Jackson",  "Martin",  "Lee",
      "Perez",    "Thompson", "White",    "Harris",   "Sanchez",  "Clark",   "Ramirez",
      "Lewis",    "Robinson", "Walker",   "Young",    "Allen",    "King",    "Wright",
      "Scott",    "Torres",   "Nguyen",   "Hill",     "Flores",   "Green",   "Adams",
      "Nelson",   "Baker",    "Hall",     "Rivera",   "Campbell", "Mitchell", "Carter",
      "Roberts",  "Mueller",  "Schmidt",  "Schneider", "Fischer", "Weber",   "Kumar",
      "Singh",    "Wang",     "Li",       "Chen",     "Tanaka",   "Sato",    "Kowalski",
      "Novak",    "Rossi",    "Silva"};
  return v;
}

inline const std::vector<std::string_view>& base_words() {
  // Roughly in popularity order; sampling is Zipf-weighted by position.
  static const std::vector<std::string_view> v = {
      "password", "qwerty",  "iloveyou", "monkey",   "dragon",  "football", "baseball",
      "letmein",  "master",  "sunshine", "princess", "shadow",  "superman", "michael",
      "welcome",  "hello",   "freedom",  "whatever", "trustno1", "starwars", "charlie",
      "jordan",   "hunter",  "buster",   "soccer",   "harley",  "ranger",   "summer",
      "ginger",   "pepper",  "cookie",   "flower",   "chocolate", "computer", "internet",
      "secret",   "orange",  "banana",   "purple",   "silver",  "tigger",   "killer",
      "love",     "angel",   "maggie",   "matrix",   "hockey",  "cheese",   "thunder",
      "money",    "batman",  "snoopy",   "yankees",  "london",  "berlin",   "paris",
      "samsung",  "pokemon", "naruto",   "minecraft", "bailey", "forever",  "blessed",
      "family",   "jesus",   "lovely",   "butterfly", "sweety", "abc",      "qazwsx",
      "asdfgh",   "zxcvbn",  "admin",    "login",    "access",  "mustang",  "corvette"};
  return v;
}

inline const std::vector<std::string_view>& email_domains() {
  static const std::vector<std::string_view> v = {"gmail.com", "yahoo.com", "hotmail.com",
                                                   "outlook.com", "aol.com", "mail.com",
                                                   "gmx.de", "web.de", "icloud.com"};
  return v;
}

}  // namespace synth_data

namespace detail {

inline std::string lower(std::string_view s) { return text::to_lower(s); }

inline std::string two_digits(int v) {
  return (v < 10 ? "0" : "") + std::to_string(v);
}

template <typename Rng>
std::size_t zipf_index(Rng& rng, std::size_t n) {
  // P(i) proportional to 1 / (i + 1)
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = 1.0 / static_cast<double>(i + 1);
  std::discrete_distribution<std::size_t> d(w.begin(), w.end());
  return d(rng);
}

template <typename Rng>
std::string digits(Rng& rng, int count) {
  std::uniform_int_distribution<int> d(0, 9);
  std::string s;
  for (int i = 0; i < count; ++i) s.push_back(static_cast<char>('0' + d(rng)));
  return s;
}

template <typename Rng>
std::string common_password(Rng& rng) {
  std::discrete_distribution<int> shape({30, 20, 15, 10, 10, 8, 7});
  const auto& words = synth_data::base_words();
  static thread_local std::discrete_distribution<std::size_t> pick_word = [] {
    std::vector<double> w(synth_data::base_words().size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = 1.0 / static_cast<double>(i + 1);
    return std::discrete_distribution<std::size_t>(w.begin(), w.end());
  }();
  std::string word(words[pick_word(rng)]);
  static const std::vector<std::string_view> suffixes = {"1", "12", "123", "1234", "!", "01", "69", "007", "2020", "99"};
  std::uniform_int_distribution<std::size_t> suffix(0, suffixes.size() - 1);
  switch (shape(rng)) {
    case 0: return word;
    case 1: return word + std::string(suffixes[suffix(rng)]);
    case 2: return word + digits(rng, 2);
    case 3: {
      word[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(word[0])));
      return word + std::string(suffixes[suffix(rng)]);
    }
    case 4: return word + digits(rng, 4);
    case 5: {
      static const std::vector<std::string_view> keyboard = {"123456", "12345678", "111111", "123123", "654321", "qwerty123", "1q2w3e4r", "000000"};
      std::uniform_int_distribution<std::size_t> k(0, keyboard.size() - 1);
      return std::string(keyboard[k(rng)]);
    }
    default: {
      std::string w2(words[pick_word(rng)]);
      return word + w2;
    }
  }
}

}  // namespace detail

// Passwords built from a record's own fields. Every variant contains the
// lowercase first or last name, the birth year, or the day+month digits.
template <typename Rng>
std::string pii_password(const LeakRecord& r, Rng& rng) {
  const std::string first = detail::lower(r.first_name);
  const std::string last = detail::lower(r.last_name);
  const std::string year = r.date_of_birth.substr(0, 4);
  const std::string yy = r.date_of_birth.substr(2, 2);
  const std::string mm = r.date_of_birth.substr(5, 2);
  const std::string dd = r.date_of_birth.substr(8, 2);
  std::string cap_first = first;
  cap_first[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(cap_first[0])));
  std::uniform_int_distribution<int> pattern(0, 9);
  switch (pattern(rng)) {
    case 0: return first + year;
    case 1: return cap_first + year;
    case 2: return first + dd + mm;
    case 3: return last + yy;
    case 4: return std::string(1, first[0]) + std::string(1, last[0]) + dd + mm + yy;
    case 5: return first + last;
    case 6: return first + "." + last + yy;
    case 7: return cap_first + dd + mm + "!";
    case 8: return last + first.substr(0, 1) + year;
    default: return first + "123";
  }
}

// Deterministic synthetic identities with realistic-looking passwords; a
// stand-in for a real credential leak.
inline std::vector<LeakRecord> synth_leak(std::size_t n, std::uint64_t seed,
                                          const SynthOptions& options = {}) {
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "n must be >= 1");
  std::mt19937_64 rng(seed);
  const auto& firsts = synth_data::first_names();
  const auto& lasts = synth_data::last_names();
  const auto& domains = synth_data::email_domains();
  std::uniform_int_distribution<std::size_t> pick_first(0, firsts.size() - 1);
  std::uniform_int_distribution<std::size_t> pick_last(0, lasts.size() - 1);
  std::uniform_int_distribution<std::size_t> pick_domain(0, domains.size() - 1);
  std::uniform_int_distribution<int> year(1950, 2005), month(1, 12), day(1, 28), uname_style(0, 3);
  std::bernoulli_distribution use_pii(std::clamp(options.pii_fraction, 0.0, 1.0));

  std::vector<LeakRecord> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    LeakRecord r;
    r.first_name = std::string(firsts[pick_first(rng)]);
    r.last_name = std::string(lasts[pick_last(rng)]);
    const int y = year(rng), m = month(rng), d = day(rng);
    r.date_of_birth = std::to_string(y) + "-" + detail::two_digits(m) + "-" + detail::two_digits(d);
    const std::string f = detail::lower(r.first_name), l = detail::lower(r.last_name);
    switch (uname_style(rng)) {
      case 0: r.username = f + "." + l; break;
      case 1: r.username = f.substr(0, 1) + l + detail::digits(rng, 2); break;
      case 2: r.username = f + l + std::to_string(y % 100); break;
      default: r.username = f + "_" + detail::digits(rng, 3); break;
    }
    r.username += std::to_string(i);  // keeps usernames unique
    r.email = r.username + "@" + std::string(domains[pick_domain(rng)]);
    r.password = use_pii(rng) ? pii_password(r, rng) : detail::common_password(rng);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace honeygen::honeywords
