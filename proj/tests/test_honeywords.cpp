#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "honeygen/honeywords.hpp"
#include "oracles.hpp"

using namespace honeygen;
using namespace honeygen::honeywords;

namespace {

const char* kLeak =
    "username,password,first_name,last_name,email,date_of_birth,extra\n"
    "jdoe,hunter2,John,Doe,jdoe@x.org,1980-02-03,a\n"
    "\"smith, a\",\"pa,ss\",Anna,Smith,as@x.org,1990-12-31,b\n"
    "broken,row\n"
    "empty,,Eve,Empty,e@x.org,2000-01-01,c\n";

struct Instance {
  std::vector<SweetwordSet> sets;
  std::map<std::string, double> scores;
  std::size_t per_user = 0, total = 0;
};

Instance random_instance(std::mt19937_64& rng, std::size_t max_users, std::size_t max_k) {
  Instance in;
  const std::size_t users = std::uniform_int_distribution<std::size_t>(1, max_users)(rng);
  const std::size_t pool = std::uniform_int_distribution<std::size_t>(2, 3 * max_k)(rng);
  for (std::size_t i = 0; i < pool; ++i) {
    // Coarse scores so ties are common; an occasional NaN.
    const double s = rng() % 17 == 0 ? std::nan("") : static_cast<double>(rng() % 5);
    in.scores["w" + std::to_string(i)] = s;
  }
  for (std::size_t u = 0; u < users; ++u) {
    SweetwordSet s;
    s.user_id = "u" + std::to_string(rng() % 100);
    const std::size_t k = std::uniform_int_distribution<std::size_t>(1, max_k)(rng);
    for (std::size_t i = 0; i < k; ++i) s.candidates.push_back("w" + std::to_string(rng() % pool));
    s.real_index = rng() % k;
    in.sets.push_back(std::move(s));
  }
  in.per_user = std::uniform_int_distribution<std::size_t>(0, max_k + 1)(rng);
  in.total = std::uniform_int_distribution<std::size_t>(0, users * max_k + 2)(rng);
  return in;
}

// Expected hits of a model-free attacker, by enumerating every ordering of
// the (user, candidate) pairs and every placement of the real passwords.
double exact_random_hits(std::size_t users, std::size_t k, std::size_t per_user, std::size_t total) {
  std::vector<std::size_t> order(users * k);
  std::iota(order.begin(), order.end(), 0);
  std::size_t placements = 1;
  for (std::size_t u = 0; u < users; ++u) placements *= k;
  double sum = 0;
  std::size_t cases = 0;
  do {
    for (std::size_t code = 0; code < placements; ++code) {
      std::vector<std::size_t> real(users);
      for (std::size_t u = 0, c = code; u < users; ++u, c /= k) real[u] = c % k;
      std::vector<std::size_t> fails(users, 0);
      std::vector<bool> solved(users, false);
      std::size_t hits = 0, failed = 0;
      for (auto p : order) {
        if (failed >= total) break;
        const std::size_t u = p / k, c = p % k;
        if (solved[u] || fails[u] >= per_user) continue;
        if (c == real[u]) {
          solved[u] = true;
          ++hits;
        } else {
          ++fails[u];
          ++failed;
        }
      }
      sum += static_cast<double>(hits);
      ++cases;
    }
  } while (std::next_permutation(order.begin(), order.end()));
  return sum / static_cast<double>(cases);
}

}  // namespace

TEST(Leak, ParseWithQuotesAndMalformedRows) {
  const auto r = parse_leak(kLeak);
  ASSERT_EQ(r.records.size(), 3u);
  EXPECT_EQ(r.malformed_rows, 1u);
  EXPECT_EQ(r.records[1].username, "smith, a");
  EXPECT_EQ(r.records[1].password, "pa,ss");
  EXPECT_TRUE(r.records[0].complete());
  EXPECT_FALSE(r.records[2].complete());
}

TEST(Leak, SchemaMapAndMissingColumn) {
  SchemaMap schema = schema_from_json({{"username", "login"}, {"password", "pw"}});
  const std::string body = "login,pw,first_name,last_name,email,date_of_birth\na,b,c,d,e,f\n";
  const auto r = parse_leak(body, schema);
  ASSERT_EQ(r.records.size(), 1u);
  EXPECT_EQ(r.records[0].username, "a");
  try {
    parse_leak(body);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMissingColumn);
  }
}

TEST(Leak, CsvRoundTrip) {
  const auto records = synth_leak(50, 3);
  const auto back = parse_leak(leak_to_csv(records));
  EXPECT_EQ(back.records, records);
  EXPECT_EQ(back.malformed_rows, 0u);
}

TEST(Leak, SampleCompleteOnly) {
  const auto all = parse_leak(kLeak).records;
  const auto two = sample_complete(all, 2, 9);
  ASSERT_EQ(two.size(), 2u);
  EXPECT_NE(two[0], two[1]);
  for (const auto& r : two) EXPECT_TRUE(r.complete());
  EXPECT_EQ(sample_complete(all, 2, 9), two);
  try {
    sample_complete(all, 3, 9);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInsufficientCompleteRecords);
  }
}

TEST(Synth, RecordsAreCompleteAndUnique) {
  const auto leak = synth_leak(2000, 42);
  std::set<std::string> names;
  for (const auto& r : leak) {
    EXPECT_TRUE(r.complete());
    names.insert(r.username);
    ASSERT_EQ(r.date_of_birth.size(), 10u);
    EXPECT_EQ(r.date_of_birth[4], '-');
    EXPECT_EQ(r.date_of_birth[7], '-');
  }
  EXPECT_EQ(names.size(), leak.size());
  EXPECT_EQ(synth_leak(2000, 42), leak);
  EXPECT_NE(synth_leak(2000, 43), leak);
}

TEST(Synth, PiiPasswordsCarryIdentity) {
  SynthOptions all_pii;
  all_pii.pii_fraction = 1.0;
  for (const auto& r : synth_leak(3000, 8, all_pii)) {
    const std::string pw = text::to_lower(r.password);
    const std::string first = text::to_lower(r.first_name), last = text::to_lower(r.last_name);
    const std::string year = r.date_of_birth.substr(0, 4);
    const std::string ddmm = r.date_of_birth.substr(8, 2) + r.date_of_birth.substr(5, 2);
    const bool linked = pw.find(first) != std::string::npos || pw.find(last) != std::string::npos ||
                        pw.find(year) != std::string::npos || pw.find(ddmm) != std::string::npos;
    EXPECT_TRUE(linked) << r.password << " " << r.first_name << " " << r.date_of_birth;
  }
}

TEST(Sweetwords, BuildKeepsRealAndKMinusOneDecoys) {
  std::vector<std::vector<std::string>> decoys;
  std::vector<std::string> reals, ids;
  for (int u = 0; u < 50; ++u) {
    std::vector<std::string> d;
    for (int i = 0; i < 25; ++i) d.push_back("d" + std::to_string(u) + "_" + std::to_string(i));
    decoys.push_back(d);
    reals.push_back("real" + std::to_string(u));
    ids.push_back("user" + std::to_string(u));
  }
  const auto sets = build_sweetword_sets(decoys, reals, ids, 1);
  ASSERT_EQ(sets.size(), 50u);
  for (std::size_t u = 0; u < sets.size(); ++u) {
    EXPECT_EQ(sets[u].candidates.size(), kDefaultSweetwords);
    EXPECT_EQ(sets[u].real(), reals[u]);
    std::set<std::string> first_k(decoys[u].begin(), decoys[u].begin() + 20);
    std::size_t from_first_k = 0;
    for (std::size_t i = 0; i < sets[u].candidates.size(); ++i)
      if (i != sets[u].real_index) from_first_k += first_k.count(sets[u].candidates[i]);
    EXPECT_EQ(from_first_k, 19u);
  }
  EXPECT_EQ(build_sweetword_sets(decoys, reals, ids, 1), sets);
  decoys[7].resize(19);
  try {
    build_sweetword_sets(decoys, reals, ids, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTooFewDecoys);
  }
}

TEST(Sweetwords, RealPositionIsUniform) {
  const std::size_t users = 20000, k = 5;
  std::vector<std::vector<std::string>> decoys(users, std::vector<std::string>{"a", "b", "c", "d", "e"});
  std::vector<std::string> reals(users, "R"), ids(users, "u");
  std::vector<double> counts(k, 0);
  for (const auto& s : build_sweetword_sets(decoys, reals, ids, 77, k)) counts[s.real_index] += 1;
  double chi2 = 0;
  const double expected = static_cast<double>(users) / k;
  for (double c : counts) chi2 += (c - expected) * (c - expected) / expected;
  EXPECT_LT(chi2, 18.47);  // chi-square, 4 dof, p = 0.001
}

TEST(Sweetwords, JsonRoundTripAndBlindMode) {
  std::vector<SweetwordSet> sets = {{"alice", {"x", "y", "z"}, 2}, {"bob", {"p", "q"}, 0}};
  EXPECT_EQ(sets_from_json(sets_to_json(sets)), sets);
  const auto blind = sets_to_json(sets, true);
  EXPECT_FALSE(blind[0].contains("real_index"));
  const auto answers = answers_to_json(sets);
  EXPECT_EQ(sets_from_json(blind, &answers), sets);
  EXPECT_THROW(sets_from_json(blind), Error);
  nlohmann::json bad = sets_to_json(sets);
  bad[1]["real_index"] = 5;
  EXPECT_THROW(sets_from_json(bad), Error);
}

TEST(Attack, HandWorkedSchedule) {
  // u0: decoys .9 and .8 before its real .1; u1: real .7.
  std::map<std::string, double> s = {{"a", .9}, {"b", .8}, {"r0", .1}, {"r1", .7}, {"c", .2}};
  auto score = [&](std::string_view pw) { return s.at(std::string(pw)); };
  std::vector<SweetwordSet> sets = {{"u0", {"a", "b", "r0"}, 2}, {"u1", {"r1", "c"}, 0}};
  auto r = simulate_attack(sets, score, {10, 2, 0, 0});
  EXPECT_EQ(r.hits, 0u);
  EXPECT_EQ(r.failed_attempts_used, 2u);
  r = simulate_attack(sets, score, {1, 2, 0, 0});
  EXPECT_EQ(r.hits, 1u);  // u0 blocked after one miss, then u1 falls
  EXPECT_EQ(r.per_user[1].attempts_made, 1u);
  r = simulate_attack(sets, score, {10, 10, 0, 0});
  EXPECT_EQ(r.hits, 2u);
  EXPECT_EQ(r.failed_attempts_used, 2u);
  EXPECT_EQ(r.per_user[0].rank_of_real, 3u);
}

TEST(Attack, BudgetPropertiesAndExhaustiveOracle) {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 400; ++i) {
    const bool small = i % 2 == 0;
    const auto in = random_instance(rng, small ? 3 : 12, small ? 3 : 8);
    auto score = [&](std::string_view pw) { return in.scores.at(std::string(pw)); };
    const auto r = simulate_attack(in.sets, score, {in.per_user, in.total, 0, 0});

    EXPECT_LE(r.failed_attempts_used, in.total);
    EXPECT_LE(r.hits, in.sets.size());
    std::size_t misses = 0, hits = 0;
    for (std::size_t u = 0; u < in.sets.size(); ++u) {
      const auto& ua = r.per_user[u];
      const std::size_t user_misses = ua.attempts_made - (ua.hit ? 1 : 0);
      EXPECT_LE(user_misses, in.per_user);
      if (ua.hit) {
        EXPECT_EQ(ua.attempts_made, ua.rank_of_real);
      }
      misses += user_misses;
      hits += ua.hit;
    }
    EXPECT_EQ(misses, r.failed_attempts_used);
    EXPECT_EQ(hits, r.hits);

    const auto o = oracle::exhaustive_attack(in.sets, score, in.per_user, in.total);
    EXPECT_EQ(r.hits, o.hits) << "instance " << i;
    EXPECT_EQ(r.failed_attempts_used, o.failed) << "instance " << i;
    for (std::size_t u = 0; u < in.sets.size(); ++u)
      EXPECT_EQ(r.per_user[u].attempts_made, o.attempts[u]) << "instance " << i;
  }
}

TEST(Attack, ModelOverloadMatchesScorer) {
  const auto leak = synth_leak(500, 1);
  std::vector<std::string> train;
  for (const auto& r : leak) train.push_back(r.password);
  const auto model = train_model(train, 3);
  std::vector<SweetwordSet> sets;
  for (std::size_t u = 0; u < 20; ++u) {
    SweetwordSet s{"u" + std::to_string(u), {}, u % 5};
    for (std::size_t i = 0; i < 5; ++i) s.candidates.push_back(train[u * 5 + i]);
    sets.push_back(s);
  }
  const auto a = simulate_attack(sets, model, {3, 40, 0, 0});
  const auto b = simulate_attack(sets, model_scorer(model), {3, 40, 0, 0});
  EXPECT_EQ(a.hits, b.hits);
  EXPECT_EQ(a.failed_attempts_used, b.failed_attempts_used);
}

TEST(Oracle, PicksHigherAndFlipsTies) {
  std::vector<LeftRightPair> pairs(1000, {"strong", "weak"});
  auto ordered = [](std::string_view pw) { return pw == "strong" ? 1.0 : 0.0; };
  EXPECT_DOUBLE_EQ(left_right_oracle(pairs, ordered, 1).rate, 1.0);
  auto flat = [](std::string_view) { return 0.0; };
  const auto r = left_right_oracle(pairs, flat, 1);
  EXPECT_EQ(r.trials, 1000u);
  EXPECT_NEAR(r.rate, 0.5, 4 * std::sqrt(0.25 / 1000));
  EXPECT_EQ(left_right_oracle(pairs, flat, 1).successes, r.successes);
}

TEST(Baseline, DegenerateCases) {
  EXPECT_DOUBLE_EQ(random_baseline(30, 1, {1, 5, 0, 0}, 10, 1).mean_hits, 30.0);
  EXPECT_DOUBLE_EQ(random_baseline(30, 4, {4, 1000, 0, 0}, 10, 1).mean_hits, 30.0);
  EXPECT_DOUBLE_EQ(random_baseline(30, 4, {3, 0, 0, 0}, 10, 1).mean_hits, 0.0);
  EXPECT_DOUBLE_EQ(random_baseline(30, 4, {0, 100, 0, 0}, 10, 1).mean_hits, 0.0);
  EXPECT_THROW(random_baseline(3, 0, {}, 10, 1), Error);
  const auto b = random_baseline(10, 5, {2, 10, 0, 0}, 300, 4);
  std::size_t total = 0;
  for (auto h : b.histogram) total += h;
  EXPECT_EQ(total, 300u);
}

TEST(Baseline, MatchesExactEnumeration) {
  struct Case {
    std::size_t users, k, per_user, total;
  };
  for (const Case c : {Case{2, 2, 1, 1}, Case{2, 3, 1, 2}, Case{3, 2, 1, 2}, Case{2, 3, 2, 3}}) {
    const double exact = exact_random_hits(c.users, c.k, c.per_user, c.total);
    const auto mc = random_baseline(c.users, c.k, {c.per_user, c.total, 0, 0}, 40000, 99);
    const double se = mc.std_hits / std::sqrt(static_cast<double>(mc.trials));
    EXPECT_NEAR(mc.mean_hits, exact, 4 * se + 1e-12)
        << c.users << "x" << c.k << " Tu=" << c.per_user << " Tf=" << c.total;
  }
}

TEST(Sweep, CellsMatchDirectSimulation) {
  const auto leak = synth_leak(1200, 5);
  std::vector<std::string> train;
  for (std::size_t i = 200; i < leak.size(); ++i) train.push_back(leak[i].password);
  const auto small = train_model({train.begin(), train.begin() + 100}, 3);
  const auto large = train_model(train, 3);
  std::vector<SweetwordSet> sets;
  for (std::size_t u = 0; u < 40; ++u) {
    SweetwordSet s{"u" + std::to_string(u), {}, u % 5};
    for (std::size_t i = 0; i < 5; ++i) s.candidates.push_back(leak[u * 5 + i].password);
    sets.push_back(s);
  }
  const std::vector<std::size_t> tu = {1, 3}, tf = {5, 50};
  const auto rows = parameter_sweep(sets, {{100, &small}, {1000, &large}}, tu, tf, 3);
  ASSERT_EQ(rows.size(), 8u);
  std::size_t i = 0;
  for (const PasswordModel* m : {&small, &large}) {
    for (auto u : tu) {
      for (auto f : tf) {
        const auto direct = simulate_attack(sets, *m, {u, f, 0, 0});
        EXPECT_EQ(rows[i].per_user_limit, u);
        EXPECT_EQ(rows[i].total_fail_limit, f);
        EXPECT_EQ(rows[i].hits, direct.hits);
        EXPECT_EQ(rows[i].failed_attempts_used, direct.failed_attempts_used);
        ++i;
      }
    }
  }
  EXPECT_EQ(sweep_to_csv(parameter_sweep(sets, {{100, &small}, {1000, &large}}, tu, tf, 1)),
            sweep_to_csv(rows));
  EXPECT_TRUE(sweep_to_csv(rows).starts_with(
      "training_size,per_user_limit,total_fail_limit,hits,failed_attempts_used\n100,1,5,"));
}
