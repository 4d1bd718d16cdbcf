#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <map>
#include <random>

#include "honeygen/password_model.hpp"

using namespace honeygen;

namespace {

// Counts (history, next) windows directly over START-padded training strings.
struct CountingOracle {
  int order;
  double alpha;
  std::set<char> alphabet;
  std::map<std::pair<std::vector<int>, int>, double> joint;
  std::map<std::vector<int>, double> marginal;

  static constexpr int kStart = -1, kEnd = -2, kUnk = -3;

  CountingOracle(const std::vector<std::string>& train, int n, double a) : order(n), alpha(a) {
    for (const auto& p : train) alphabet.insert(p.begin(), p.end());
    for (const auto& p : train) {
      auto seq = symbols(p);
      for (std::size_t i = order - 1; i < seq.size(); ++i) {
        std::vector<int> h(seq.begin() + (i - (order - 1)), seq.begin() + i);
        joint[{h, seq[i]}] += 1;
        marginal[h] += 1;
      }
    }
  }

  std::vector<int> symbols(const std::string& s) const {
    std::vector<int> seq(order - 1, kStart);
    for (char c : s) seq.push_back(alphabet.count(c) ? static_cast<unsigned char>(c) : kUnk);
    seq.push_back(kEnd);
    return seq;
  }

  double log_prob(const std::string& s) const {
    const double vocab = static_cast<double>(alphabet.size() + 2);
    auto seq = symbols(s);
    double lp = 0;
    for (std::size_t i = order - 1; i < seq.size(); ++i) {
      std::vector<int> h(seq.begin() + (i - (order - 1)), seq.begin() + i);
      const auto j = joint.find({h, seq[i]});
      const auto m = marginal.find(h);
      const double c = j == joint.end() ? 0 : j->second;
      const double t = m == marginal.end() ? 0 : m->second;
      lp += std::log((c + alpha) / (t + alpha * vocab));
    }
    return lp;
  }
};

std::vector<std::string> random_passwords(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const std::string chars = "abcde12!";
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) {
    std::string p(std::uniform_int_distribution<int>(0, 9)(rng), ' ');
    for (auto& c : p) c = chars[rng() % 5 + (rng() % 4 == 0 ? 3 : 0)];
    out.push_back(p);
  }
  return out;
}

}  // namespace

TEST(PasswordModel, HandComputedUnigram) {
  // order 1: a:2 b:1 END:2 of 5, V = 2 + 2 = 4, alpha = 1 -> 3/9, 2/9, 3/9, unseen 1/9
  const auto m = train_model({"ab", "a"}, 1, 1.0);
  EXPECT_NEAR(m.log_prob("ab"), std::log(3.0 / 9 * 2.0 / 9 * 3.0 / 9), 1e-12);
  EXPECT_NEAR(m.log_prob(""), std::log(3.0 / 9), 1e-12);
  EXPECT_NEAR(m.log_prob("z"), std::log(1.0 / 9 * 3.0 / 9), 1e-12);
  EXPECT_DOUBLE_EQ(m.log_prob("z"), m.log_prob("q"));
}

TEST(PasswordModel, UnigramMassMatchesGeometricTail) {
  // Strings over {a, b, c} (c stands for every unseen byte) of length <= L
  // carry 1 - (1 - P(END))^(L + 1) of the mass.
  const auto m = train_model({"ab", "a"}, 1, 1.0);
  const int L = 8;
  double total = 0;
  std::vector<std::string> frontier = {""};
  for (int len = 0; len <= L; ++len) {
    std::vector<std::string> next;
    for (const auto& s : frontier) {
      total += std::exp(m.log_prob(s));
      for (char c : {'a', 'b', 'c'}) next.push_back(s + c);
    }
    frontier = std::move(next);
  }
  EXPECT_NEAR(total, 1.0 - std::pow(6.0 / 9, L + 1), 1e-12);
}

TEST(PasswordModel, MatchesCountingOracle) {
  const auto train = random_passwords(500, 11);
  const auto queries = random_passwords(200, 12);
  for (int order : {1, 2, 3, 4}) {
    for (double alpha : {0.5, 1.0}) {
      const auto m = train_model(train, order, alpha);
      const CountingOracle oracle(train, order, alpha);
      for (const auto& q : queries) EXPECT_NEAR(m.log_prob(q), oracle.log_prob(q), 1e-9) << q;
      EXPECT_NEAR(m.log_prob("xyz!"), oracle.log_prob("xyz!"), 1e-9);
    }
  }
}

TEST(PasswordModel, ShardedTrainingIsIdentical) {
  const auto train = random_passwords(3000, 5);
  const auto single = train_model(train, 4, 1.0, 1);
  for (std::size_t shards : {2u, 3u, 8u})
    EXPECT_EQ(train_model(train, 4, 1.0, shards).to_json(), single.to_json());
}

TEST(PasswordModel, JsonRoundTrip) {
  const auto train = random_passwords(300, 6);
  const auto m = train_model(train, 3, 0.5);
  const auto path = std::filesystem::temp_directory_path() / "hg_model.json";
  m.save(path);
  const auto back = PasswordModel::load(path);
  EXPECT_EQ(back.order(), 3);
  EXPECT_EQ(back.training_size(), 300u);
  for (const auto& q : random_passwords(50, 7)) EXPECT_DOUBLE_EQ(back.log_prob(q), m.log_prob(q));
  EXPECT_THROW(PasswordModel::from_json({{"order", 3}}), Error);
}

TEST(PasswordModel, Errors) {
  try {
    train_model({});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyTraining);
  }
  EXPECT_THROW(PasswordModel(0), Error);
  EXPECT_THROW(PasswordModel(9), Error);
  EXPECT_THROW(PasswordModel(3, -1), Error);
  PasswordModel a(3), b(4);
  EXPECT_THROW(a.merge(b), Error);
}

TEST(PasswordModel, FrequentBeatsRare) {
  std::vector<std::string> train(200, "password1");
  train.push_back("zq8#");
  const auto m = train_model(train, 4, 1.0);
  EXPECT_GT(m.log_prob("password1"), m.log_prob("zq8#"));
  EXPECT_TRUE(std::isfinite(m.log_prob("\x01\x02never seen")));
}
