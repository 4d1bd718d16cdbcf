#pragma once

// Structural robots.txt parsing, path-segment feature extraction against a
// fuzzing wordlist, corpus statistics and the generated-file score
// (variance 0..3 + format 0..2 + human 0..5).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "honeygen/error.hpp"
#include "honeygen/text.hpp"

namespace honeygen::robots {

enum class RuleKind { kAllow, kDisallow };

struct Rule {
  RuleKind kind = RuleKind::kDisallow;
  std::string path;

  bool operator==(const Rule&) const = default;
};

struct Group {
  // Empty only for rules that appear before any User-agent line.
  std::vector<std::string> user_agents;
  std::vector<Rule> rules;

  bool operator==(const Group&) const = default;
};

struct CrawlDelay {
  std::string agent;
  double seconds = 0;
  std::size_t group_index = 0;

  bool operator==(const CrawlDelay&) const = default;
};

struct RobotsFile {
  std::vector<Group> groups;
  std::vector<std::string> sitemaps;
  std::vector<CrawlDelay> crawl_delays;
  std::size_t comment_lines = 0;
  std::size_t directive_lines = 0;
  // Non-blank, non-comment lines that are not one of the recognized
  // directives.
  std::size_t unknown_lines = 0;

  bool operator==(const RobotsFile&) const = default;

  std::size_t rule_count() const {
    std::size_t n = 0;
    for (const auto& g : groups) n += g.rules.size();
    return n;
  }
};

struct ParseOptions {
  // Parsing fails with NotRobotsTxt when unknown / (unknown + directives)
  // exceeds this.
  double max_unknown_fraction = 0.5;
};

enum class DirectiveKind { kUserAgent, kAllow, kDisallow, kSitemap, kCrawlDelay };

enum class LineKind { kBlank, kComment, kDirective, kUnknown };

struct ClassifiedLine {
  LineKind kind = LineKind::kBlank;
  DirectiveKind directive = DirectiveKind::kUserAgent;
  std::string value;
};

namespace detail {

inline std::optional<DirectiveKind> directive_from_key(std::string_view key) {
  const std::string k = text::to_lower(text::trim(key));
  if (k == "user-agent" || k == "useragent" || k == "user agent") return DirectiveKind::kUserAgent;
  if (k == "allow") return DirectiveKind::kAllow;
  if (k == "disallow") return DirectiveKind::kDisallow;
  if (k == "sitemap" || k == "site-map") return DirectiveKind::kSitemap;
  if (k == "crawl-delay" || k == "crawldelay") return DirectiveKind::kCrawlDelay;
  return std::nullopt;
}

inline std::string_view strip_bom(std::string_view s) {
  if (s.size() >= 3 && static_cast<unsigned char>(s[0]) == 0xEF &&
      static_cast<unsigned char>(s[1]) == 0xBB && static_cast<unsigned char>(s[2]) == 0xBF)
    s.remove_prefix(3);
  return s;
}

}  // namespace detail

inline ClassifiedLine classify_line(std::string_view raw) {
  ClassifiedLine out;
  std::string_view line = text::trim(raw);
  if (line.empty()) return out;
  if (line.front() == '#') {
    out.kind = LineKind::kComment;
    return out;
  }
  if (auto hash = line.find('#'); hash != std::string_view::npos)
    line = text::trim(line.substr(0, hash));
  auto colon = line.find(':');
  if (colon == std::string_view::npos) {
    out.kind = LineKind::kUnknown;
    return out;
  }
  auto kind = detail::directive_from_key(line.substr(0, colon));
  if (!kind) {
    out.kind = LineKind::kUnknown;
    return out;
  }
  std::string value(text::trim(line.substr(colon + 1)));
  if (*kind == DirectiveKind::kCrawlDelay && !text::parse_double(value)) {
    out.kind = LineKind::kUnknown;
    return out;
  }
  out.kind = LineKind::kDirective;
  out.directive = *kind;
  out.value = std::move(value);
  return out;
}

inline RobotsFile parse_robots(std::string_view body, const ParseOptions& options = {}) {
  RobotsFile file;
  bool previous_was_agent = false;
  auto current_group = [&]() -> Group& {
    if (file.groups.empty()) file.groups.emplace_back();
    return file.groups.back();
  };

  for (std::string_view raw : text::split_lines(detail::strip_bom(body))) {
    ClassifiedLine line = classify_line(raw);
    switch (line.kind) {
      case LineKind::kBlank:
        continue;
      case LineKind::kComment:
        ++file.comment_lines;
        continue;
      case LineKind::kUnknown:
        ++file.unknown_lines;
        continue;
      case LineKind::kDirective:
        break;
    }
    ++file.directive_lines;
    switch (line.directive) {
      case DirectiveKind::kUserAgent:
        if (!previous_was_agent) file.groups.emplace_back();
        file.groups.back().user_agents.push_back(line.value);
        previous_was_agent = true;
        break;
      case DirectiveKind::kAllow:
      case DirectiveKind::kDisallow:
        current_group().rules.push_back(
            {line.directive == DirectiveKind::kAllow ? RuleKind::kAllow : RuleKind::kDisallow,
             line.value});
        previous_was_agent = false;
        break;
      case DirectiveKind::kCrawlDelay: {
        Group& g = current_group();
        file.crawl_delays.push_back({g.user_agents.empty() ? std::string() : g.user_agents.front(),
                                     *text::parse_double(line.value), file.groups.size() - 1});
        previous_was_agent = false;
        break;
      }
      case DirectiveKind::kSitemap:
        file.sitemaps.push_back(line.value);
        break;
    }
  }

  if (file.directive_lines == 0)
    throw Error(ErrorCode::kNotRobotsTxt, "no robots.txt directives found");
  const double unknown_fraction =
      static_cast<double>(file.unknown_lines) /
      static_cast<double>(file.unknown_lines + file.directive_lines);
  if (unknown_fraction > options.max_unknown_fraction)
    throw Error(ErrorCode::kNotRobotsTxt,
                "too many unrecognized lines (" + std::to_string(file.unknown_lines) + ")");
  return file;
}

// Canonical text form. Comment lines are emitted as bare "#" lines so the
// count survives a re-parse; unknown lines are dropped.
inline std::string serialize(const RobotsFile& file) {
  std::string out;
  for (std::size_t i = 0; i < file.comment_lines; ++i) out += "#\n";
  for (std::size_t gi = 0; gi < file.groups.size(); ++gi) {
    const Group& g = file.groups[gi];
    for (const auto& agent : g.user_agents) out += "User-agent: " + agent + "\n";
    for (const auto& delay : file.crawl_delays) {
      if (delay.group_index == gi)
        out += "Crawl-delay: " + text::format_double(delay.seconds) + "\n";
    }
    for (const auto& rule : g.rules)
      out += (rule.kind == RuleKind::kAllow ? "Allow: " : "Disallow: ") + rule.path + "\n";
    out += "\n";
  }
  for (const auto& sitemap : file.sitemaps) out += "Sitemap: " + sitemap + "\n";
  return out;
}

class Wordlist {
 public:
  Wordlist() = default;

  template <typename Range>
  static Wordlist from_entries(const Range& entries) {
    Wordlist w;
    for (const auto& e : entries) w.add(e);
    return w;
  }

  // One token per line; '#' starts a comment line.
  static Wordlist from_text(std::string_view body) {
    Wordlist w;
    for (std::string_view line : text::split_lines(body)) {
      line = text::trim(line);
      if (line.empty() || line.front() == '#') continue;
      w.add(line);
    }
    return w;
  }

  static Wordlist load(const std::filesystem::path& path) {
    return from_text(text::read_file(path));
  }

  // Lowercase, wildcard characters removed, surrounding slashes stripped.
  static std::string normalize(std::string_view token) {
    std::string out;
    for (char c : token) {
      if (c != '*' && c != '$') out.push_back(c);
    }
    std::string_view v = out;
    while (!v.empty() && v.front() == '/') v.remove_prefix(1);
    while (!v.empty() && v.back() == '/') v.remove_suffix(1);
    return text::to_lower(text::trim(v));
  }

  void add(std::string_view token) {
    std::string n = normalize(token);
    if (!n.empty()) entries_.insert(std::move(n));
  }

  bool contains(std::string_view segment) const {
    return entries_.count(normalize(segment)) > 0;
  }

  std::size_t size() const { return entries_.size(); }
  const std::set<std::string>& entries() const { return entries_; }

 private:
  std::set<std::string> entries_;
};

// Small built-in list of common web directory names; the same entries ship
// as data/wordlists/common.txt.
inline const Wordlist& builtin_wordlist() {
  static const Wordlist w = Wordlist::from_entries(std::vector<std::string_view>{
      "admin", "administrator", "api", "app", "assets", "auth", "backup", "backups", "bin",
      "blog", "cache", "cart", "cgi-bin", "checkout", "cms", "config", "console", "content",
      "cp", "cpanel", "css", "dashboard", "data", "db", "debug", "demo", "dev", "docs",
      "download", "downloads", "dump", "export", "feed", "files", "forum", "home", "images",
      "img", "import", "include", "includes", "install", "internal", "js", "lib", "log", "login",
      "logout", "logs", "mail", "manage", "manager", "media", "members", "misc", "modules",
      "old", "panel", "phpmyadmin", "plugins", "portal", "private", "profile", "public",
      "register", "reports", "search", "secret", "secure", "server-status", "service",
      "services", "setup", "shop", "signin", "signup", "site", "sitemap", "src", "staff",
      "static", "stats", "storage", "system", "temp", "templates", "test", "tests", "themes",
      "tmp", "tools", "upload", "uploads", "user", "users", "vendor", "web", "webadmin",
      "wp-admin", "wp-content", "wp-includes", "wp-login.php", "xmlrpc.php"});
  return w;
}

inline constexpr std::size_t kFeatureCount = 6;

inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames = {
    "allow_entries",    "allow_wordlist_hits",    "allow_segments",
    "disallow_entries", "disallow_wordlist_hits", "disallow_segments"};

struct FeatureVector {
  std::size_t allow_entries = 0;
  std::size_t allow_wordlist_hits = 0;
  std::size_t allow_segments = 0;
  std::size_t disallow_entries = 0;
  std::size_t disallow_wordlist_hits = 0;
  std::size_t disallow_segments = 0;

  bool operator==(const FeatureVector&) const = default;

  // Ordered as kFeatureNames.
  std::array<double, kFeatureCount> values() const {
    return {static_cast<double>(allow_entries),    static_cast<double>(allow_wordlist_hits),
            static_cast<double>(allow_segments),   static_cast<double>(disallow_entries),
            static_cast<double>(disallow_wordlist_hits), static_cast<double>(disallow_segments)};
  }
};

inline std::vector<std::string_view> path_segments(std::string_view path) {
  std::vector<std::string_view> out;
  for (std::string_view seg : text::split(path, '/')) {
    if (!seg.empty()) out.push_back(seg);
  }
  return out;
}

inline FeatureVector extract_features(const RobotsFile& file, const Wordlist& wordlist) {
  FeatureVector fv;
  for (const auto& group : file.groups) {
    for (const auto& rule : group.rules) {
      const bool allow = rule.kind == RuleKind::kAllow;
      auto& entries = allow ? fv.allow_entries : fv.disallow_entries;
      auto& segments = allow ? fv.allow_segments : fv.disallow_segments;
      auto& hits = allow ? fv.allow_wordlist_hits : fv.disallow_wordlist_hits;
      ++entries;
      for (std::string_view seg : path_segments(rule.path)) {
        ++segments;
        if (wordlist.contains(seg)) ++hits;
      }
    }
  }
  return fv;
}

struct FeatureMoments {
  double mean = 0;
  double std = 0;

  bool operator==(const FeatureMoments&) const = default;
};

struct CorpusStats {
  std::array<FeatureMoments, kFeatureCount> features{};
  std::size_t sample_count = 0;

  bool operator==(const CorpusStats&) const = default;
};

// Reference statistics of the robots.txt files of the Alexa top 1000
// (846 retrievable files).
inline CorpusStats builtin_corpus_stats() {
  CorpusStats s;
  s.features = {{{10.27, 35.13},
                 {13.96, 46.40},
                 {21.02, 71.86},
                 {76.35, 228.98},
                 {83.76, 272.85},
                 {143.40, 484.55}}};
  s.sample_count = 846;
  return s;
}

// Arithmetic mean and population standard deviation per feature.
inline CorpusStats compute_stats(const std::vector<FeatureVector>& vectors) {
  if (vectors.size() < 2)
    throw Error(ErrorCode::kInsufficientSamples,
                "need at least 2 feature vectors, got " + std::to_string(vectors.size()));
  CorpusStats stats;
  stats.sample_count = vectors.size();
  const double n = static_cast<double>(vectors.size());
  for (std::size_t f = 0; f < kFeatureCount; ++f) {
    double sum = 0;
    for (const auto& v : vectors) sum += v.values()[f];
    const double mean = sum / n;
    double sq = 0;
    for (const auto& v : vectors) {
      const double d = v.values()[f] - mean;
      sq += d * d;
    }
    stats.features[f] = {mean, std::sqrt(sq / n)};
  }
  return stats;
}

inline nlohmann::json stats_to_json(const CorpusStats& stats) {
  nlohmann::json j = nlohmann::json::object();
  for (std::size_t f = 0; f < kFeatureCount; ++f) {
    j[std::string(kFeatureNames[f])] = {{"mean", stats.features[f].mean},
                                        {"std", stats.features[f].std}};
  }
  j["sample_count"] = stats.sample_count;
  return j;
}

inline CorpusStats stats_from_json(const nlohmann::json& j) {
  CorpusStats stats;
  try {
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
      const auto& entry = j.at(std::string(kFeatureNames[f]));
      stats.features[f] = {entry.at("mean").get<double>(), entry.at("std").get<double>()};
      if (stats.features[f].std < 0)
        throw Error(ErrorCode::kParseError, "negative std for " + std::string(kFeatureNames[f]));
    }
    stats.sample_count = j.at("sample_count").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("stats file: ") + e.what());
  }
  return stats;
}

inline CorpusStats load_stats(const std::filesystem::path& path) {
  try {
    return stats_from_json(nlohmann::json::parse(text::read_file(path)));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kParseError, path.string() + ": " + e.what());
  }
}

// 0.5 * (1 - |x - mean| / std), clamped below at zero. Takes raw values so
// non-integer points (e.g. the means themselves) can be scored.
inline std::array<double, kFeatureCount> feature_scores(const std::array<double, kFeatureCount>& x,
                                                        const CorpusStats& stats) {
  std::array<double, kFeatureCount> scores{};
  for (std::size_t f = 0; f < kFeatureCount; ++f) {
    const auto& m = stats.features[f];
    if (!(m.std > 0))
      throw Error(ErrorCode::kZeroStd,
                  "standard deviation of " + std::string(kFeatureNames[f]) + " is zero");
    scores[f] = std::max(0.0, 0.5 * (1.0 - std::abs(x[f] - m.mean) / m.std));
  }
  return scores;
}

inline std::array<double, kFeatureCount> feature_scores(const FeatureVector& fv,
                                                        const CorpusStats& stats) {
  return feature_scores(fv.values(), stats);
}

inline double variance_score(const std::array<double, kFeatureCount>& x, const CorpusStats& stats) {
  double total = 0;
  for (double s : feature_scores(x, stats)) total += s;
  return total;
}

inline double variance_score(const FeatureVector& fv, const CorpusStats& stats) {
  return variance_score(fv.values(), stats);
}

// Longest contiguous run of directive/comment/blank lines that holds at least
// one directive. Ties go to the earliest run.
inline std::optional<std::string> extract_robots_block(std::string_view response) {
  auto lines = text::split_lines(detail::strip_bom(response));
  std::size_t best_start = 0, best_end = 0, best_directives = 0;
  std::size_t start = 0, directives = 0;
  auto close_run = [&](std::size_t end) {
    if (directives > best_directives) {
      best_start = start;
      best_end = end;
      best_directives = directives;
    }
  };
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const LineKind kind = classify_line(lines[i]).kind;
    if (kind == LineKind::kUnknown) {
      close_run(i);
      start = i + 1;
      directives = 0;
    } else if (kind == LineKind::kDirective) {
      ++directives;
    }
  }
  close_run(lines.size());
  if (best_directives == 0) return std::nullopt;
  std::string block;
  for (std::size_t i = best_start; i < best_end; ++i) {
    block.append(lines[i]);
    block.push_back('\n');
  }
  return block;
}

// 2: the whole response is a robots.txt with no unrecognized lines.
// 1: a directive block can be extracted but other text surrounds it.
// 0: no usable robots.txt content.
inline int format_score(std::string_view response) {
  try {
    RobotsFile file = parse_robots(response, {.max_unknown_fraction = 1.0});
    if (file.unknown_lines == 0) return 2;
  } catch (const Error&) {
    return 0;
  }
  return extract_robots_block(response) ? 1 : 0;
}

struct AutomaticScores {
  int format_score = 0;
  double variance_score = 0;
  FeatureVector features;
};

// Format and variance components of a raw model response. A response without
// any robots.txt content gets variance 0 rather than the all-zero-vector score.
inline AutomaticScores score_response(std::string_view response, const CorpusStats& stats,
                                      const Wordlist& wordlist) {
  AutomaticScores out;
  out.format_score = format_score(response);
  if (out.format_score == 0) return out;
  std::string body =
      out.format_score == 2 ? std::string(response) : *extract_robots_block(response);
  out.features = extract_features(parse_robots(body, {.max_unknown_fraction = 1.0}), wordlist);
  out.variance_score = variance_score(out.features, stats);
  return out;
}

inline constexpr double kMaxHumanScore = 5.0;

inline void check_human_score(double value) {
  if (!(value >= 0.0 && value <= kMaxHumanScore))
    throw Error(ErrorCode::kOutOfRange,
                "human score must lie in [0, 5], got " + text::format_double(value));
}

struct RobotsScore {
  double variance_score = 0;
  int format_score = 0;
  double human_score = 0;
  double total = 0;
};

inline RobotsScore total_score(std::optional<int> format, std::optional<double> variance,
                               std::optional<double> human) {
  if (!format) throw Error(ErrorCode::kMissingComponent, "format score not recorded");
  if (!variance) throw Error(ErrorCode::kMissingComponent, "variance score not recorded");
  if (!human) throw Error(ErrorCode::kMissingComponent, "human score not recorded");
  if (*format < 0 || *format > 2)
    throw Error(ErrorCode::kOutOfRange, "format score must be 0, 1 or 2");
  if (!(*variance >= 0.0 && *variance <= 3.0))
    throw Error(ErrorCode::kOutOfRange, "variance score must lie in [0, 3]");
  check_human_score(*human);
  return {*variance, *format, *human, *variance + *format + *human};
}

}  // namespace honeygen::robots
