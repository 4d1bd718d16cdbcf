#pragma once

// Experiment bookkeeping: an append-only JSON Lines store of generation runs
// with later score/rating events folded in on load, plus the reports built
// from it.

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "honeygen/error.hpp"
#include "honeygen/llm_gateway.hpp"
#include "honeygen/prompt_kit.hpp"
#include "honeygen/robots_txt.hpp"
#include "honeygen/text.hpp"
#include "honeygen/token_specs.hpp"

namespace honeygen {

struct RunScores {
  std::optional<int> format;
  std::optional<double> variance;
  std::optional<double> human;

  // Unrated human score counts as 0 for ranking.
  double ranking_total() const {
    return static_cast<double>(format.value_or(0)) + variance.value_or(0) + human.value_or(0);
  }
};

struct RunRecord {
  std::string run_id;
  std::string timestamp;  // UTC, ISO 8601
  BlockTriple triple;
  TokenTypeId token_type = TokenTypeId::A;
  std::string provider;
  int repeat = 0;
  std::string input_payload;
  std::string prompt_text;
  std::optional<std::string> response_text;
  std::string finish_reason = "complete";
  std::optional<llm::ResponseClass> response_class;
  ValidationResult validation;
  RunScores scores;
  std::optional<std::string> honeyword_link;
};

// "<type>-<g><i><o>-<provider>-r<n>", e.g. "A-141-gpt35-r0".
inline std::string make_run_id(TokenTypeId type, const BlockTriple& t, std::string_view provider,
                               int repeat) {
  return std::string(1, to_char(type)) + "-" + std::to_string(t.generator_id) +
         std::to_string(t.input_id) + std::to_string(t.output_id) + "-" + std::string(provider) +
         "-r" + std::to_string(repeat);
}

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// ---------------------------------------------------------------------------
// JSON mapping

inline nlohmann::json validation_to_json(const ValidationResult& v) {
  nlohmann::json findings = nlohmann::json::array();
  for (const auto& f : v.findings) {
    findings.push_back({{"code", f.code},
                        {"message", f.message},
                        {"line", f.line},
                        {"severity", f.severity == Severity::kError ? "error" : "warning"}});
  }
  return {{"valid", v.valid},
          {"findings", findings},
          {"summary", v.summary},
          {"parsed_units", v.parsed_units}};
}

inline ValidationResult validation_from_json(const nlohmann::json& j) {
  ValidationResult v;
  v.valid = j.at("valid").get<bool>();
  for (const auto& f : j.at("findings")) {
    v.findings.push_back({f.at("code").get<std::string>(), f.at("message").get<std::string>(),
                          f.value("line", std::size_t{0}),
                          f.value("severity", std::string("error")) == "warning"
                              ? Severity::kWarning
                              : Severity::kError});
  }
  v.summary = j.value("summary", std::map<std::string, std::size_t>{});
  v.parsed_units = j.value("parsed_units", std::size_t{0});
  return v;
}

inline nlohmann::json run_to_json(const RunRecord& r) {
  nlohmann::json j = {{"run_id", r.run_id},
                      {"timestamp", r.timestamp},
                      {"triple", {r.triple.generator_id, r.triple.input_id, r.triple.output_id}},
                      {"token_type", std::string(1, to_char(r.token_type))},
                      {"provider", r.provider},
                      {"repeat", r.repeat},
                      {"input_payload", r.input_payload},
                      {"prompt_text", r.prompt_text},
                      {"finish_reason", r.finish_reason},
                      {"validation", validation_to_json(r.validation)}};
  j["response_text"] = r.response_text ? nlohmann::json(*r.response_text) : nlohmann::json();
  if (r.response_class) {
    j["response_class"] = {{"kind", std::string(llm::to_string(r.response_class->kind))},
                           {"evidence", r.response_class->evidence}};
  }
  if (r.honeyword_link) j["honeyword_link"] = *r.honeyword_link;
  return j;
}

inline RunRecord run_from_json(const nlohmann::json& j) {
  RunRecord r;
  r.run_id = j.at("run_id").get<std::string>();
  r.timestamp = j.value("timestamp", std::string());
  const auto& t = j.at("triple");
  r.triple = {t.at(0).get<int>(), t.at(1).get<int>(), t.at(2).get<int>()};
  r.token_type = parse_token_type(j.at("token_type").get<std::string>());
  r.provider = j.at("provider").get<std::string>();
  r.repeat = j.value("repeat", 0);
  r.input_payload = j.value("input_payload", std::string());
  r.prompt_text = j.at("prompt_text").get<std::string>();
  if (j.contains("response_text") && !j["response_text"].is_null())
    r.response_text = j["response_text"].get<std::string>();
  r.finish_reason = j.value("finish_reason", std::string("complete"));
  if (j.contains("response_class")) {
    r.response_class = llm::ResponseClass{
        llm::parse_response_kind(j["response_class"].at("kind").get<std::string>()),
        j["response_class"].value("evidence", std::string())};
  }
  if (j.contains("validation")) r.validation = validation_from_json(j["validation"]);
  if (j.contains("honeyword_link")) r.honeyword_link = j["honeyword_link"].get<std::string>();
  return r;
}

inline nlohmann::json rating_to_json(std::string_view llm, TokenTypeId type,
                                     const QualitativeRating& rating) {
  return {{"llm", llm},
          {"token_type", std::string(1, to_char(type))},
          {"syntax", std::string(symbol(rating.syntax))},
          {"credibility", std::string(symbol(rating.credibility))},
          {"variability", std::string(symbol(rating.variability))},
          {"stability", std::string(symbol(rating.stability))},
          {"rater", rating.rater},
          {"run_ids", rating.run_ids}};
}

struct StoredRating {
  std::string llm;
  TokenTypeId token_type = TokenTypeId::A;
  QualitativeRating rating;
};

inline StoredRating rating_from_json(const nlohmann::json& j) {
  StoredRating s;
  s.llm = j.at("llm").get<std::string>();
  s.token_type = parse_token_type(j.at("token_type").get<std::string>());
  s.rating.syntax = parse_grade(j.at("syntax").get<std::string>());
  s.rating.credibility = parse_grade(j.at("credibility").get<std::string>());
  s.rating.variability = parse_grade(j.at("variability").get<std::string>());
  s.rating.stability = parse_grade(j.at("stability").get<std::string>());
  s.rating.rater = j.value("rater", std::string());
  s.rating.run_ids = j.value("run_ids", std::vector<std::string>{});
  return s;
}

// ---------------------------------------------------------------------------
// Store

// Directory layout:
//   runs.jsonl      run records and score/human events, in append order
//   failures.jsonl  attempts that produced no run (missing fixture, errors)
//   ratings.jsonl   qualitative ratings
// One writer per directory. A truncated final line (crash mid-append) is
// skipped on load; any other unparseable line is a data error.
class RunStore {
 public:
  explicit RunStore(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw Error(ErrorCode::kIoFailure, "cannot create run store " + dir_.string());
    reload();
  }

  const std::filesystem::path& dir() const { return dir_; }
  std::filesystem::path runs_path() const { return dir_ / "runs.jsonl"; }
  std::filesystem::path failures_path() const { return dir_ / "failures.jsonl"; }
  std::filesystem::path ratings_path() const { return dir_ / "ratings.jsonl"; }

  // Re-reads every file.
  void reload() {
    std::lock_guard lock(mutex_);
    runs_.clear();
    index_.clear();
    for (const auto& j : read_jsonl(runs_path())) apply_event(j);
  }

  bool contains(std::string_view run_id) const {
    std::lock_guard lock(mutex_);
    return index_.count(std::string(run_id)) != 0;
  }

  std::optional<RunRecord> find(std::string_view run_id) const {
    std::lock_guard lock(mutex_);
    auto it = index_.find(std::string(run_id));
    if (it == index_.end()) return std::nullopt;
    return runs_[it->second];
  }

  // In first-persisted order.
  std::vector<RunRecord> runs() const {
    std::lock_guard lock(mutex_);
    return runs_;
  }

  std::size_t size() const {
    std::lock_guard lock(mutex_);
    return runs_.size();
  }

  void append_run(const RunRecord& record) {
    if (record.response_text && !record.response_class)
      throw Error(ErrorCode::kInvalidArgument, record.run_id + ": response without a class");
    std::lock_guard lock(mutex_);
    if (index_.count(record.run_id))
      throw Error(ErrorCode::kInvalidArgument, "run " + record.run_id + " already persisted");
    nlohmann::json j = run_to_json(record);
    j["event"] = "run";
    append_line(runs_path(), j);
    apply_event(j);
    // Scores carried on the record itself go in as their own events.
    if (record.scores.format && record.scores.variance)
      write_event(score_event(record.run_id, *record.scores.format, *record.scores.variance));
    if (record.scores.human) write_event(human_event(record.run_id, *record.scores.human));
  }

  void record_scores(std::string_view run_id, const robots::AutomaticScores& scores) {
    std::lock_guard lock(mutex_);
    require(run_id);
    write_event(score_event(std::string(run_id), scores.format_score, scores.variance_score));
  }

  void record_human(std::string_view run_id, double value) {
    robots::check_human_score(value);
    std::lock_guard lock(mutex_);
    require(run_id);
    write_event(human_event(std::string(run_id), value));
  }

  void record_failure(const nlohmann::json& failure) {
    std::lock_guard lock(mutex_);
    append_line(failures_path(), failure);
  }

  std::vector<nlohmann::json> failures() const { return read_jsonl(failures_path()); }

  void record_rating(std::string_view llm, TokenTypeId type, const QualitativeRating& rating) {
    check_rating(rating);
    std::lock_guard lock(mutex_);
    append_line(ratings_path(), rating_to_json(llm, type, rating));
  }

  std::vector<StoredRating> ratings() const {
    std::vector<StoredRating> out;
    for (const auto& j : read_jsonl(ratings_path())) {
      try {
        out.push_back(rating_from_json(j));
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::kParseError, ratings_path().string() + ": " + e.what());
      }
    }
    return out;
  }

 private:
  static nlohmann::json score_event(const std::string& run_id, int format, double variance) {
    return {{"event", "score"}, {"run_id", run_id}, {"format", format}, {"variance", variance}};
  }

  static nlohmann::json human_event(const std::string& run_id, double value) {
    return {{"event", "human"}, {"run_id", run_id}, {"value", value}};
  }

  void require(std::string_view run_id) const {
    if (!index_.count(std::string(run_id)))
      throw Error(ErrorCode::kUnknownRun, "no run '" + std::string(run_id) + "'");
  }

  void write_event(const nlohmann::json& j) {
    append_line(runs_path(), j);
    apply_event(j);
  }

  void apply_event(const nlohmann::json& j) {
    try {
      const std::string event = j.value("event", std::string("run"));
      if (event == "run") {
        RunRecord r = run_from_json(j);
        if (index_.count(r.run_id)) return;  // first write wins
        index_.emplace(r.run_id, runs_.size());
        runs_.push_back(std::move(r));
        return;
      }
      auto it = index_.find(j.at("run_id").get<std::string>());
      if (it == index_.end()) return;
      RunScores& s = runs_[it->second].scores;
      if (event == "score") {
        s.format = j.at("format").get<int>();
        s.variance = j.at("variance").get<double>();
      } else if (event == "human") {
        s.human = j.at("value").get<double>();
      }
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kParseError, runs_path().string() + ": " + e.what());
    }
  }

  static void append_line(const std::filesystem::path& path, const nlohmann::json& j) {
    std::ofstream out(path, std::ios::binary | std::ios::app);
    out << j.dump() << '\n';
    out.flush();
    if (!out) throw Error(ErrorCode::kIoFailure, "cannot append to " + path.string());
  }

  static std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& path) {
    std::vector<nlohmann::json> out;
    std::error_code ec;
    if (!std::filesystem::exists(path, ec)) return out;
    const std::string body = text::read_file(path);
    const auto lines = text::split_lines(body);
    for (std::size_t i = 0; i < lines.size(); ++i) {
      if (text::is_blank(lines[i])) continue;
      try {
        out.push_back(nlohmann::json::parse(lines[i]));
      } catch (const nlohmann::json::parse_error& e) {
        const bool last = i + 1 == lines.size() && !body.empty() && body.back() != '\n';
        if (last) break;
        throw Error(ErrorCode::kParseError,
                    path.string() + ":" + std::to_string(i + 1) + ": " + e.what());
      }
    }
    return out;
  }

  std::filesystem::path dir_;
  mutable std::mutex mutex_;
  std::vector<RunRecord> runs_;
  std::map<std::string, std::size_t> index_;
};

// ---------------------------------------------------------------------------
// Reports

struct RankedRun {
  std::size_t rank = 0;
  const RunRecord* run = nullptr;
  double total = 0;
};

// Runs with automatic scores, best first; equal totals by run_id.
inline std::vector<RankedRun> rank_runs(const std::vector<RunRecord>& runs) {
  std::vector<RankedRun> out;
  for (const auto& r : runs)
    if (r.scores.format && r.scores.variance) out.push_back({0, &r, r.scores.ranking_total()});
  std::sort(out.begin(), out.end(), [](const RankedRun& a, const RankedRun& b) {
    if (a.total != b.total) return a.total > b.total;
    return a.run->run_id < b.run->run_id;
  });
  for (std::size_t i = 0; i < out.size(); ++i) out[i].rank = i + 1;
  return out;
}

namespace detail {

inline std::string fmt2(double v) { return text::format_fixed(v, 2); }

inline std::string human_cell(const RunScores& s) { return s.human ? fmt2(*s.human) : "-"; }

}  // namespace detail

inline std::string top_runs_csv(const std::vector<RunRecord>& runs, std::size_t k) {
  std::string out = "rank,run_id,triple,token_type,provider,format,human,variance,total\n";
  const auto ranked = rank_runs(runs);
  for (std::size_t i = 0; i < std::min(k, ranked.size()); ++i) {
    const auto& r = *ranked[i].run;
    out += std::to_string(ranked[i].rank) + "," + r.run_id + ",\"" + r.triple.to_string() +
           "\"," + std::string(1, to_char(r.token_type)) + "," + r.provider + "," +
           std::to_string(*r.scores.format) + "," +
           (r.scores.human ? detail::fmt2(*r.scores.human) : std::string()) + "," +
           detail::fmt2(*r.scores.variance) + "," + detail::fmt2(ranked[i].total) + "\n";
  }
  return out;
}

inline std::string top_runs_table(const std::vector<RunRecord>& runs, std::size_t k) {
  const auto ranked = rank_runs(runs);
  std::vector<std::array<std::string, 7>> rows;
  rows.push_back({"rank", "triple", "run_id", "format", "human", "variance", "total"});
  for (std::size_t i = 0; i < std::min(k, ranked.size()); ++i) {
    const auto& r = *ranked[i].run;
    rows.push_back({std::to_string(ranked[i].rank), r.triple.to_string(), r.run_id,
                    std::to_string(*r.scores.format), detail::human_cell(r.scores),
                    detail::fmt2(*r.scores.variance), detail::fmt2(ranked[i].total)});
  }
  std::array<std::size_t, 7> width{};
  for (const auto& row : rows)
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  std::string out;
  for (std::size_t ri = 0; ri < rows.size(); ++ri) {
    for (std::size_t c = 0; c < rows[ri].size(); ++c) {
      if (c) out += "  ";
      const auto& cell = rows[ri][c];
      // Text columns left-aligned, numbers right-aligned.
      const bool left = c == 1 || c == 2;
      const std::string pad(width[c] - cell.size(), ' ');
      out += left ? cell + pad : pad + cell;
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    out += '\n';
    if (ri == 0) {
      std::size_t total = 0;
      for (auto w : width) total += w;
      out += std::string(total + 2 * (width.size() - 1), '-') + "\n";
    }
  }
  return out;
}

// Human 0..5 into three levels: [0,1] -> 0, (1,3] -> 1, (3,5] -> 2.
inline int human_level(double value) {
  robots::check_human_score(value);
  if (value <= 1.0) return 0;
  if (value <= 3.0) return 1;
  return 2;
}

struct BlockInfluenceRow {
  BlockCategory category = BlockCategory::kGeneratorInstruction;
  int block_id = 0;
  std::size_t format_runs = 0;
  std::array<double, 3> format_fraction{};  // levels 0, 1, 2
  std::size_t human_runs = 0;
  std::array<double, 3> human_fraction{};
};

inline std::string_view category_name(BlockCategory c) {
  switch (c) {
    case BlockCategory::kGeneratorInstruction: return "generator";
    case BlockCategory::kInputPreamble: return "input";
    case BlockCategory::kOutputFormat: return "output";
  }
  return "?";
}

// For every block id in every category, the share of scored runs using that
// block at each format level and each human level. Block ids without scored
// runs appear with zero counts.
inline std::vector<BlockInfluenceRow> block_influence(const std::vector<RunRecord>& runs) {
  struct Counts {
    std::array<std::size_t, 3> format{};
    std::array<std::size_t, 3> human{};
  };
  std::array<std::vector<Counts>, 3> counts = {std::vector<Counts>(kGeneratorBlocks),
                                               std::vector<Counts>(kInputBlocks),
                                               std::vector<Counts>(kOutputBlocks)};
  std::size_t scored = 0;
  for (const auto& r : runs) {
    if (!r.scores.format && !r.scores.human) continue;
    ++scored;
    const std::array<int, 3> ids = {r.triple.generator_id, r.triple.input_id, r.triple.output_id};
    for (std::size_t c = 0; c < 3; ++c) {
      auto& cell = counts[c].at(static_cast<std::size_t>(ids[c]));
      if (r.scores.format) ++cell.format.at(static_cast<std::size_t>(*r.scores.format));
      if (r.scores.human) ++cell.human[static_cast<std::size_t>(human_level(*r.scores.human))];
    }
  }
  if (scored == 0) throw Error(ErrorCode::kNoScoredRuns, "no scored runs in store");

  const std::array<BlockCategory, 3> cats = {BlockCategory::kGeneratorInstruction,
                                             BlockCategory::kInputPreamble,
                                             BlockCategory::kOutputFormat};
  std::vector<BlockInfluenceRow> out;
  for (std::size_t c = 0; c < 3; ++c) {
    for (std::size_t id = 0; id < counts[c].size(); ++id) {
      const auto& cell = counts[c][id];
      BlockInfluenceRow row;
      row.category = cats[c];
      row.block_id = static_cast<int>(id);
      for (auto n : cell.format) row.format_runs += n;
      for (auto n : cell.human) row.human_runs += n;
      for (std::size_t l = 0; l < 3; ++l) {
        if (row.format_runs)
          row.format_fraction[l] =
              static_cast<double>(cell.format[l]) / static_cast<double>(row.format_runs);
        if (row.human_runs)
          row.human_fraction[l] =
              static_cast<double>(cell.human[l]) / static_cast<double>(row.human_runs);
      }
      out.push_back(row);
    }
  }
  return out;
}

inline std::string block_influence_csv(const std::vector<BlockInfluenceRow>& rows) {
  std::string out =
      "category,block_id,format_runs,format_0,format_1,format_2,human_runs,human_0,human_1,"
      "human_2\n";
  for (const auto& r : rows) {
    out += std::string(category_name(r.category)) + "," + std::to_string(r.block_id) + "," +
           std::to_string(r.format_runs);
    for (double f : r.format_fraction) out += "," + text::format_fixed(f, 4);
    out += "," + std::to_string(r.human_runs);
    for (double f : r.human_fraction) out += "," + text::format_fixed(f, 4);
    out += "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Qualitative matrix

// Most frequent grade; ties go to the less favourable grade.
inline Grade modal_grade(const std::vector<Grade>& grades) {
  if (grades.empty()) throw Error(ErrorCode::kInvalidArgument, "no grades to aggregate");
  std::array<std::size_t, 4> n{};
  for (Grade g : grades) ++n[static_cast<std::size_t>(g)];
  std::size_t best = 0;
  // Enum order is good, neutral, bad, not executable: later is worse.
  for (std::size_t i = 1; i < n.size(); ++i)
    if (n[i] >= n[best]) best = i;
  return static_cast<Grade>(best);
}

struct RatingMatrix {
  std::vector<std::string> llms;  // first-seen order
  // (llm, type) -> modal rating, axes in kRatingAxes order
  std::map<std::pair<std::string, TokenTypeId>, std::array<Grade, 4>> cells;

  // "+ + + +" (syntax, credibility, variability, stability); empty if unrated.
  std::string cell(const std::string& llm, TokenTypeId type) const {
    auto it = cells.find({llm, type});
    if (it == cells.end()) return {};
    std::string out;
    for (Grade g : it->second) {
      if (!out.empty()) out.push_back(' ');
      out += symbol(g);
    }
    return out;
  }
};

inline RatingMatrix rating_matrix(const std::vector<StoredRating>& ratings) {
  RatingMatrix m;
  std::map<std::pair<std::string, TokenTypeId>, std::array<std::vector<Grade>, 4>> collected;
  for (const auto& r : ratings) {
    if (std::find(m.llms.begin(), m.llms.end(), r.llm) == m.llms.end()) m.llms.push_back(r.llm);
    auto& slot = collected[{r.llm, r.token_type}];
    const auto axes = r.rating.axes();
    for (std::size_t a = 0; a < 4; ++a) slot[a].push_back(axes[a]);
  }
  for (const auto& [key, axes] : collected) {
    std::array<Grade, 4> modal{};
    for (std::size_t a = 0; a < 4; ++a) modal[a] = modal_grade(axes[a]);
    m.cells[key] = modal;
  }
  return m;
}

// One block of four axis rows per LLM, columns A..G; unrated cells blank.
inline std::string render_rating_matrix(const RatingMatrix& m) {
  std::size_t llm_width = 3;
  for (const auto& l : m.llms) llm_width = std::max(llm_width, l.size());
  std::size_t axis_width = 0;
  for (auto a : kRatingAxes) axis_width = std::max(axis_width, a.size());
  auto pad = [](std::string s, std::size_t w) {
    s.resize(std::max(w, s.size()), ' ');
    return s;
  };
  std::string out = pad("LLM", llm_width) + "  " + pad("Prompt", axis_width);
  for (TokenTypeId t : kAllTokenTypes) out += "  " + std::string(1, to_char(t));
  out += "\n";
  for (std::size_t li = 0; li < m.llms.size(); ++li) {
    const auto& llm = m.llms[li];
    if (li) out += "\n";
    for (std::size_t a = 0; a < kRatingAxes.size(); ++a) {
      std::string line = pad(a == 0 ? llm : "", llm_width) + "  " +
                         pad(std::string(kRatingAxes[a]), axis_width);
      for (TokenTypeId t : kAllTokenTypes) {
        auto it = m.cells.find({llm, t});
        line += "  ";
        line += it == m.cells.end() ? std::string(" ") : std::string(symbol(it->second[a]));
      }
      while (!line.empty() && line.back() == ' ') line.pop_back();
      out += line + "\n";
    }
  }
  return out;
}

}  // namespace honeygen
