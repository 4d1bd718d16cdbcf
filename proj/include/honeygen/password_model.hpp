#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <set>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "honeygen/error.hpp"
#include "honeygen/text.hpp"

namespace honeygen {

// Additively smoothed character n-gram model with start/end markers.
//
// P(c | h) = (count(h, c) + alpha) / (count(h) + alpha * V), where h is the
// previous order-1 symbols (padded with START) and V counts the observed
// alphabet plus END plus one shared class for every unseen character. With
// alpha > 0 every string has finite log probability.
class PasswordModel {
 public:
  static constexpr int kMaxOrder = 8;

  explicit PasswordModel(int order = 4, double smoothing = 1.0) : order_(order), smoothing_(smoothing) {
    if (order < 1 || order > kMaxOrder)
      throw Error(ErrorCode::kInvalidArgument, "model order must be in [1, 8]");
    if (!(smoothing >= 0)) throw Error(ErrorCode::kInvalidArgument, "smoothing must be >= 0");
  }

  int order() const { return order_; }
  double smoothing() const { return smoothing_; }
  std::size_t training_size() const { return training_size_; }
  const std::set<unsigned char>& alphabet() const { return alphabet_; }

  void add(std::string_view password) {
    for (char c : password) alphabet_.insert(static_cast<unsigned char>(c));
    std::uint64_t context = 0;
    for (char c : password) {
      const Symbol s = byte_symbol(static_cast<unsigned char>(c));
      bump(context, s);
      context = shift(context, s);
    }
    bump(context, kEnd);
    ++training_size_;
  }

  // Count tables add, so shards can be trained independently and merged in
  // any order.
  void merge(const PasswordModel& other) {
    if (other.order_ != order_)
      throw Error(ErrorCode::kInvalidArgument, "cannot merge models of different order");
    alphabet_.insert(other.alphabet_.begin(), other.alphabet_.end());
    for (const auto& [key, ctx] : other.contexts_) {
      auto& mine = contexts_[key];
      mine.total += ctx.total;
      for (const auto& [sym, n] : ctx.next) mine.next[sym] += n;
    }
    training_size_ += other.training_size_;
  }

  double log_prob(std::string_view password) const {
    const double vocab = static_cast<double>(alphabet_.size() + 2);
    double lp = 0;
    std::uint64_t context = 0;
    auto step = [&](Symbol s) {
      std::uint64_t count = 0, total = 0;
      if (auto it = contexts_.find(context); it != contexts_.end()) {
        total = it->second.total;
        if (auto jt = it->second.next.find(s); jt != it->second.next.end()) count = jt->second;
      }
      double p;
      if (total == 0 && smoothing_ == 0)
        p = 1.0 / vocab;
      else
        p = (static_cast<double>(count) + smoothing_) /
            (static_cast<double>(total) + smoothing_ * vocab);
      lp += p > 0 ? std::log(p) : -std::numeric_limits<double>::infinity();
    };
    for (char c : password) {
      const Symbol s = known_symbol(static_cast<unsigned char>(c));
      step(s);
      context = shift(context, s);
    }
    step(kEnd);
    return lp;
  }

  nlohmann::json to_json() const {
    std::vector<std::uint64_t> keys;
    keys.reserve(contexts_.size());
    for (const auto& kv : contexts_) keys.push_back(kv.first);
    std::sort(keys.begin(), keys.end());
    nlohmann::json contexts = nlohmann::json::array();
    for (auto key : keys) {
      const auto& ctx = contexts_.at(key);
      std::vector<std::pair<Symbol, std::uint64_t>> next(ctx.next.begin(), ctx.next.end());
      std::sort(next.begin(), next.end());
      nlohmann::json n = nlohmann::json::array();
      for (const auto& [sym, count] : next) n.push_back({sym, count});
      contexts.push_back({{"context", key}, {"total", ctx.total}, {"next", n}});
    }
    nlohmann::json alphabet = nlohmann::json::array();
    for (unsigned char c : alphabet_) alphabet.push_back(c);
    return {{"format", "honeygen-markov-v1"},
            {"order", order_},
            {"smoothing", smoothing_},
            {"training_size", training_size_},
            {"alphabet", alphabet},
            {"contexts", contexts}};
  }

  static PasswordModel from_json(const nlohmann::json& j) {
    try {
      PasswordModel m(j.at("order").get<int>(), j.at("smoothing").get<double>());
      m.training_size_ = j.at("training_size").get<std::size_t>();
      for (const auto& c : j.at("alphabet")) m.alphabet_.insert(c.get<unsigned char>());
      for (const auto& ctx : j.at("contexts")) {
        auto& slot = m.contexts_[ctx.at("context").get<std::uint64_t>()];
        slot.total = ctx.at("total").get<std::uint64_t>();
        for (const auto& n : ctx.at("next"))
          slot.next[n.at(0).get<Symbol>()] = n.at(1).get<std::uint64_t>();
      }
      return m;
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kParseError, std::string("model file: ") + e.what());
    }
  }

  void save(const std::filesystem::path& path) const { text::write_file(path, to_json().dump()); }

  static PasswordModel load(const std::filesystem::path& path) {
    try {
      return from_json(nlohmann::json::parse(text::read_file(path)));
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::kParseError, path.string() + ": " + e.what());
    }
  }

 private:
  using Symbol = std::uint16_t;
  static constexpr Symbol kStart = 0;
  static constexpr Symbol kEnd = 1;
  static constexpr Symbol kUnknown = 2;
  static constexpr int kSymbolBits = 9;

  struct Context {
    std::uint64_t total = 0;
    std::unordered_map<Symbol, std::uint64_t> next;
  };

  static Symbol byte_symbol(unsigned char c) { return static_cast<Symbol>(3 + c); }

  Symbol known_symbol(unsigned char c) const {
    return alphabet_.count(c) ? byte_symbol(c) : kUnknown;
  }

  // Context keys hold the last order-1 symbols, newest in the low bits.
  // START is symbol 0, so an all-zero key is the padded start context.
  std::uint64_t shift(std::uint64_t context, Symbol s) const {
    const int width = (order_ - 1) * kSymbolBits;
    if (width == 0) return 0;
    const std::uint64_t mask = width >= 64 ? ~0ULL : ((1ULL << width) - 1);
    return ((context << kSymbolBits) | s) & mask;
  }

  void bump(std::uint64_t context, Symbol s) {
    auto& ctx = contexts_[context];
    ++ctx.total;
    ++ctx.next[s];
  }

  int order_;
  double smoothing_;
  std::size_t training_size_ = 0;
  std::set<unsigned char> alphabet_;
  std::unordered_map<std::uint64_t, Context> contexts_;
};

// Shards > 1 trains disjoint slices on separate threads and merges the
// counts; the result is identical to single-threaded training.
inline PasswordModel train_model(const std::vector<std::string>& passwords, int order = 4,
                                 double smoothing = 1.0, std::size_t shards = 1) {
  if (passwords.empty()) throw Error(ErrorCode::kEmptyTraining, "no training passwords");
  shards = std::clamp<std::size_t>(shards, 1, passwords.size());
  if (shards == 1) {
    PasswordModel model(order, smoothing);
    for (const auto& p : passwords) model.add(p);
    return model;
  }
  std::vector<PasswordModel> parts(shards, PasswordModel(order, smoothing));
  {
    std::vector<std::jthread> workers;
    const std::size_t per = (passwords.size() + shards - 1) / shards;
    for (std::size_t s = 0; s < shards; ++s) {
      workers.emplace_back([&, s] {
        const std::size_t end = std::min(passwords.size(), (s + 1) * per);
        for (std::size_t i = s * per; i < end; ++i) parts[s].add(passwords[i]);
      });
    }
  }
  PasswordModel model(order, smoothing);
  for (const auto& part : parts) model.merge(part);
  return model;
}

inline double log_prob(const PasswordModel& model, std::string_view password) {
  return model.log_prob(password);
}

}  // namespace honeygen
