#pragma once

// The seven honeytoken types, the special instruction each one contributes
// to a prompt, structural validators for model output, and the four-axis
// qualitative rating.

#include <algorithm>
#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "honeygen/dsv.hpp"
#include "honeygen/error.hpp"
#include "honeygen/robots_txt.hpp"
#include "honeygen/text.hpp"

namespace honeygen {

enum class TokenTypeId { A, B, C, D, E, F, G };

inline constexpr std::array<TokenTypeId, 7> kAllTokenTypes = {
    TokenTypeId::A, TokenTypeId::B, TokenTypeId::C, TokenTypeId::D,
    TokenTypeId::E, TokenTypeId::F, TokenTypeId::G};

inline char to_char(TokenTypeId id) { return static_cast<char>('A' + static_cast<int>(id)); }

inline std::string to_string(TokenTypeId id) { return std::string(1, to_char(id)); }

inline TokenTypeId parse_token_type(std::string_view s) {
  s = text::trim(s);
  if (s.size() == 1) {
    const char c = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
    if (c >= 'A' && c <= 'G') return static_cast<TokenTypeId>(c - 'A');
  }
  throw Error(ErrorCode::kUnknownTokenType, "unknown token type '" + std::string(s) + "'");
}

struct TokenTypeSpec {
  TokenTypeId id = TokenTypeId::A;
  std::string name;
  std::string category;
  std::string special_instruction;
  // Substituted for {honey_token} in the building blocks.
  std::string generator_noun;
};

using TokenSpecTable = std::array<TokenTypeSpec, 7>;

inline const TokenSpecTable& builtin_token_specs() {
  static const TokenSpecTable table = {{
      {TokenTypeId::A, "Robots.txt", "Network/Service (Website)",
       "Based on the given information, return a robots.txt file. Some paths of the robots.txt "
       "should be interesting for a potential attacker.",
       "robots.txt"},
      {TokenTypeId::B, "Honeywords", "Network/Credentials",
       "Based on this information, return 20 different username and password pairs.",
       "honeyword"},
      {TokenTypeId::C, "Ports/Services", "Network Service/Ports",
       "Return a random list of ports and services, including their version for a random IP. "
       "The services should match the given occupation of the user. The result should look "
       "like a Nmap scan.",
       "ports and services list"},
      {TokenTypeId::D, "Invoice File", "Host/File",
       "Based on the field of work of that company, return an invoice list containing 5 items "
       "with Quantity, Name, and Price.",
       "invoice file"},
      {TokenTypeId::E, "Config", "Host/File",
       "Based on the given information, return a config file for that service.", "config file"},
      {TokenTypeId::F, "Log File", "Host/File",
       "Based on the given information, return a log file for that service.", "log file"},
      {TokenTypeId::G, "Database", "Network/Service",
       "Return a database filled with user information: full name, email address, password, "
       "phone number, birthday, company ID (random 6-digit number).",
       "database"},
  }};
  return table;
}

inline const TokenTypeSpec& token_spec(TokenTypeId id, const TokenSpecTable& table = builtin_token_specs()) {
  return table[static_cast<std::size_t>(id)];
}

// ---------------------------------------------------------------------------
// Validation

enum class Severity { kError, kWarning };

struct Finding {
  std::string code;
  std::string message;
  std::size_t line = 0;  // 1-based, 0 when the finding concerns the whole response
  Severity severity = Severity::kError;
};

struct ValidationResult {
  bool valid = false;
  std::vector<Finding> findings;
  std::map<std::string, std::size_t> summary;
  // Number of type-specific units recognized (pairs, port lines, items, ...).
  // Zero means the response had no parsable content at all.
  std::size_t parsed_units = 0;

  void error(std::string code, std::string message, std::size_t line = 0) {
    findings.push_back({std::move(code), std::move(message), line, Severity::kError});
  }
  void warning(std::string code, std::string message, std::size_t line = 0) {
    findings.push_back({std::move(code), std::move(message), line, Severity::kWarning});
  }
  bool has_errors() const {
    return std::any_of(findings.begin(), findings.end(),
                       [](const Finding& f) { return f.severity == Severity::kError; });
  }
};

inline constexpr std::size_t kExpectedHoneywordPairs = 20;
inline constexpr std::size_t kExpectedInvoiceItems = 5;
inline constexpr std::size_t kMinConfigDirectives = 3;
inline constexpr std::size_t kMinLogLines = 3;

namespace validation {

inline bool is_fence(std::string_view line) { return text::trim(line).starts_with("```"); }

inline bool only_chars(std::string_view s, std::string_view allowed) {
  return !s.empty() && s.find_first_not_of(allowed) == std::string_view::npos;
}

// Removes markdown emphasis, list bullets and "1." / "1)" / "(1)" numbering.
inline std::string strip_decorations(std::string_view raw) {
  std::string line = text::replace_all(std::string(text::trim(raw)), "**", "");
  line.erase(std::remove(line.begin(), line.end(), '`'), line.end());
  std::string_view v = text::trim(line);
  bool changed = true;
  while (changed && !v.empty()) {
    changed = false;
    if ((v.front() == '-' || v.front() == '*' || v.front() == '+') && v.size() > 1 &&
        text::is_space(v[1])) {
      v = text::trim(v.substr(1));
      changed = true;
    } else if (v.starts_with("\xE2\x80\xA2")) {  // bullet
      v = text::trim(v.substr(3));
      changed = true;
    } else {
      std::size_t i = v.front() == '(' ? 1 : 0;
      std::size_t digits = 0;
      while (i + digits < v.size() && std::isdigit(static_cast<unsigned char>(v[i + digits]))) ++digits;
      const std::size_t after = i + digits;
      if (digits > 0 && digits <= 3 && after < v.size() && (v[after] == '.' || v[after] == ')') &&
          (after + 1 == v.size() || text::is_space(v[after + 1]))) {
        v = text::trim(v.substr(after + 1));
        changed = true;
      }
    }
  }
  return std::string(v);
}

inline bool has_space(std::string_view s) {
  return std::any_of(s.begin(), s.end(), [](char c) { return text::is_space(c); });
}

inline bool is_user_label(std::string_view s) {
  const std::string l = text::to_lower(text::trim(s));
  return l == "username" || l == "user" || l == "login" || l == "user name" || l == "email";
}

inline bool is_password_label(std::string_view s) {
  const std::string l = text::to_lower(text::trim(s));
  return l == "password" || l == "pass" || l == "pwd" || l == "passwd";
}

}  // namespace validation

struct CredentialPair {
  std::string username;
  std::string password;
  std::size_t line = 0;
};

// Pulls username/password pairs out of a chat response. Accepts
// "<user><sep><password>" with sep one of tab, "|", " - ", ":", ",", markdown
// tables, and labelled "Username: x, Password: y" forms (on one line or on
// two consecutive lines).
inline std::vector<CredentialPair> extract_credential_pairs(std::string_view response) {
  static const std::regex labelled(
      R"(^(?:username|user|login|user name|email)\s*[:=]\s*(\S+?)\s*[,;|]?\s+(?:password|pass|pwd|passwd)\s*[:=]\s*(\S+)$)",
      std::regex::icase);
  static constexpr std::array<std::string_view, 6> kSeparators = {"\t", " | ", "|", " - ", ":", ","};

  std::vector<CredentialPair> pairs;
  std::optional<std::string> pending_user;
  const auto lines = text::split_lines(response);
  for (std::size_t li = 0; li < lines.size(); ++li) {
    if (validation::is_fence(lines[li])) continue;
    std::string line = validation::strip_decorations(lines[li]);
    if (line.empty()) continue;
    // Markdown table row: drop the outer pipes.
    if (line.front() == '|') {
      std::string_view v = line;
      v.remove_prefix(1);
      if (!v.empty() && v.back() == '|') v.remove_suffix(1);
      line = std::string(text::trim(v));
    }
    std::smatch m;
    if (std::regex_match(line, m, labelled)) {
      pairs.push_back({m[1].str(), m[2].str(), li + 1});
      pending_user.reset();
      continue;
    }
    for (std::string_view sep : kSeparators) {
      auto pos = line.find(sep);
      if (pos == std::string::npos) continue;
      std::string_view left = text::trim(std::string_view(line).substr(0, pos));
      std::string_view right = text::trim(std::string_view(line).substr(pos + sep.size()));
      if (sep != "|" && sep != " | " && sep != "\t") {
        // "Username: alice" / "Password: pw" on separate lines.
        if (validation::is_user_label(left) && !right.empty() && !validation::has_space(right)) {
          pending_user = std::string(right);
          break;
        }
        if (validation::is_password_label(left) && !right.empty() &&
            !validation::has_space(right)) {
          if (pending_user) pairs.push_back({*pending_user, std::string(right), li + 1});
          pending_user.reset();
          break;
        }
      }
      if (left.empty() || right.empty() || validation::has_space(left) ||
          validation::has_space(right))
        break;
      if (validation::only_chars(left, "-:=") || validation::only_chars(right, "-:=")) break;
      if (validation::is_user_label(left) && validation::is_password_label(right)) break;
      pairs.push_back({std::string(left), std::string(right), li + 1});
      pending_user.reset();
      break;
    }
  }
  return pairs;
}

namespace validation {

inline ValidationResult validate_robots(std::string_view response) {
  ValidationResult r;
  const int format = robots::format_score(response);
  r.summary["format_score"] = static_cast<std::size_t>(format);
  if (format == 0) {
    r.error("NotRobotsTxt", "no robots.txt directives found");
    return r;
  }
  const std::string body =
      format == 2 ? std::string(response) : *robots::extract_robots_block(response);
  const auto file = robots::parse_robots(body, {.max_unknown_fraction = 1.0});
  r.summary["groups"] = file.groups.size();
  r.summary["rules"] = file.rule_count();
  r.summary["sitemaps"] = file.sitemaps.size();
  r.parsed_units = file.directive_lines;
  if (format == 1) r.warning("ExtraText", "response contains text around the robots.txt");
  r.valid = true;
  return r;
}

inline ValidationResult validate_honeywords(std::string_view response) {
  ValidationResult r;
  const auto pairs = extract_credential_pairs(response);
  r.summary["pair_count"] = pairs.size();
  r.parsed_units = pairs.size();
  if (pairs.empty()) {
    r.error("NoPairs", "no username/password pairs found");
  } else if (pairs.size() < kExpectedHoneywordPairs) {
    r.error("TooFewPairs", "found " + std::to_string(pairs.size()) + " pairs, expected 20");
  } else if (pairs.size() > kExpectedHoneywordPairs) {
    r.error("TooManyPairs", "found " + std::to_string(pairs.size()) + " pairs, expected 20");
  }
  r.valid = !r.has_errors();
  return r;
}

inline ValidationResult validate_ports(std::string_view response) {
  static const std::regex port_line(
      R"(^\s*(\d{1,5})/(tcp|udp|sctp)\s+(\S+)\s+(\S+)(?:\s+(\S.*))?$)", std::regex::icase);
  ValidationResult r;
  std::size_t lines = 0, with_version = 0;
  const auto all = text::split_lines(response);
  for (std::size_t i = 0; i < all.size(); ++i) {
    const std::string line(all[i]);
    std::smatch m;
    if (!std::regex_match(line, m, port_line)) continue;
    if (std::stoul(m[1].str()) > 65535) {
      r.warning("BadPort", "port out of range", i + 1);
      continue;
    }
    ++lines;
    if (m[5].matched) ++with_version;
  }
  r.summary["port_lines"] = lines;
  r.summary["with_version"] = with_version;
  r.parsed_units = lines;
  if (lines == 0) r.error("NoPortLines", "no '<port>/<proto> <state> <service>' lines found");
  r.valid = !r.has_errors();
  return r;
}

inline ValidationResult validate_invoice(std::string_view response) {
  static const std::regex skip_words(
      R"(\b(sub-?total|total|tax|vat|invoice|date|due|balance|discount|shipping)\b)",
      std::regex::icase);
  static const std::regex quantity_token(R"(^(?:x?\d{1,6}x?|\d{1,6}(?:pcs|units?)?)$)",
                                         std::regex::icase);
  static const std::regex price_token(
      R"(^(?:[$€£]\s?\d{1,3}(?:,?\d{3})*(?:\.\d{1,2})?|\d{1,3}(?:,?\d{3})*\.\d{2}(?:[$€£]|usd|eur)?|\d+(?:[$€£]|usd|eur))$)",
      std::regex::icase);
  static const std::regex word_token(R"([A-Za-z]{2,})");
  ValidationResult r;
  std::size_t items = 0;
  const auto all = text::split_lines(response);
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (validation::is_fence(all[i])) continue;
    std::string line = validation::strip_decorations(all[i]);
    if (line.empty() || std::regex_search(line, skip_words)) continue;
    std::replace(line.begin(), line.end(), '|', ' ');
    bool has_quantity = false, has_price = false, has_name = false;
    for (std::string token : text::split_words(line)) {
      while (!token.empty() && std::string_view(",;:()@").find(token.back()) != std::string_view::npos)
        token.pop_back();
      while (!token.empty() && std::string_view("(@").find(token.front()) != std::string_view::npos)
        token.erase(token.begin());
      if (token.empty()) continue;
      if (!has_price && std::regex_match(token, price_token)) {
        has_price = true;
      } else if (!has_quantity && std::regex_match(token, quantity_token)) {
        has_quantity = true;
      } else if (std::regex_search(token, word_token)) {
        has_name = true;
      }
    }
    if (has_quantity && has_price && has_name) ++items;
  }
  r.summary["item_count"] = items;
  r.parsed_units = items;
  if (items != kExpectedInvoiceItems)
    r.error("WrongItemCount", "found " + std::to_string(items) + " invoice items, expected 5");
  r.valid = !r.has_errors();
  return r;
}

inline ValidationResult validate_config(std::string_view response) {
  static const std::regex key_value(R"(^\s*[A-Za-z_][\w.\-/]*\s*[=:]\s*\S.*$)");
  static const std::regex block_directive(R"(^\s*[A-Za-z_][\w.\-]*(?:\s+[^\s;{]+)*\s*[;{]\s*$)");
  static const std::regex apache_directive(R"(^\s*([A-Za-z][\w\-]*)\s+(\S+)(?:\s+\S+){0,2}\s*$)");
  static const std::regex camel_key(R"(^[A-Z][a-z]+[A-Z]\w*$)");
  static const std::regex section(R"(^\s*(?:\[[^\]]+\]|<[A-Za-z][^>]*>|[\w.\-]+:)\s*$)");
  ValidationResult r;
  std::size_t directives = 0, sections = 0;
  for (std::string_view raw : text::split_lines(response)) {
    if (validation::is_fence(raw)) continue;
    const std::string_view t = text::trim(raw);
    if (t.empty() || t.front() == '#' || t.front() == ';' || t.starts_with("//") ||
        t.starts_with("</") || t == "}" || t == "};")
      continue;
    const std::string line(t);
    std::smatch m;
    if (std::regex_match(line, section)) {
      ++sections;
    } else if (std::regex_match(line, key_value) || std::regex_match(line, block_directive)) {
      ++directives;
    } else if (std::regex_match(line, m, apache_directive) && line.back() != '.' &&
               line.back() != ':' &&
               (std::regex_match(m[1].str(), camel_key) ||
                m[2].str().find_first_of("/.$0123456789") != std::string::npos)) {
      ++directives;
    }
  }
  r.summary["directives"] = directives;
  r.summary["sections"] = sections;
  r.parsed_units = directives + sections;
  if (directives < kMinConfigDirectives)
    r.error("TooFewDirectives",
            "found " + std::to_string(directives) + " config directives, expected at least 3");
  r.valid = !r.has_errors();
  return r;
}

inline bool has_timestamp_prefix(std::string_view raw) {
  static const std::regex ts(
      R"(^\s*(?:[\w.:\-]+ [\w\-]+ [\w\-]+ )?\[?(?:)"
      R"(\d{4}-\d{2}-\d{2}[ T]\d{2}:\d{2}(?::\d{2})?)"
      R"(|\d{4}/\d{2}/\d{2} \d{2}:\d{2}:\d{2})"
      R"(|[A-Z][a-z]{2}\s+\d{1,2} \d{2}:\d{2}:\d{2})"
      R"(|\d{2}/[A-Z][a-z]{2}/\d{4}:\d{2}:\d{2}:\d{2})"
      R"(|[A-Z][a-z]{2} [A-Z][a-z]{2} \d{1,2} \d{2}:\d{2}:\d{2})"
      R"(|\d{2}:\d{2}:\d{2}))");
  const std::string line(raw);
  return std::regex_search(line, ts, std::regex_constants::match_continuous);
}

inline ValidationResult validate_log(std::string_view response) {
  ValidationResult r;
  std::size_t lines = 0;
  for (std::string_view raw : text::split_lines(response)) {
    if (!validation::is_fence(raw) && has_timestamp_prefix(raw)) ++lines;
  }
  r.summary["log_lines"] = lines;
  r.parsed_units = lines;
  if (lines < kMinLogLines)
    r.error("TooFewLogLines",
            "found " + std::to_string(lines) + " timestamped lines, expected at least 3");
  r.valid = !r.has_errors();
  return r;
}

}  // namespace validation

// ---------------------------------------------------------------------------
// Database tables (type G)

struct ExtractedTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

enum class UserColumn { kFullName, kEmail, kPassword, kPhone, kBirthday, kCompanyId };

inline constexpr std::array<std::string_view, 6> kRequiredUserColumns = {
    "full name", "email address", "password", "phone number", "birthday", "company ID"};

namespace validation {

// Lowercase alphanumerics only, parenthesised remarks removed.
inline std::string normalize_column(std::string_view raw) {
  std::string out;
  int depth = 0;
  for (char c : raw) {
    if (c == '(') ++depth;
    else if (c == ')') depth = std::max(0, depth - 1);
    else if (depth == 0 && std::isalnum(static_cast<unsigned char>(c)))
      out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

inline std::optional<UserColumn> classify_column(std::string_view raw) {
  const std::string c = normalize_column(raw);
  static const std::map<std::string, UserColumn, std::less<>> kSynonyms = {
      {"fullname", UserColumn::kFullName},      {"name", UserColumn::kFullName},
      {"employeename", UserColumn::kFullName},  {"customername", UserColumn::kFullName},
      {"email", UserColumn::kEmail},            {"emailaddress", UserColumn::kEmail},
      {"mail", UserColumn::kEmail},             {"emailid", UserColumn::kEmail},
      {"password", UserColumn::kPassword},      {"passwd", UserColumn::kPassword},
      {"pwd", UserColumn::kPassword},           {"passwordhash", UserColumn::kPassword},
      {"phone", UserColumn::kPhone},            {"phonenumber", UserColumn::kPhone},
      {"phoneno", UserColumn::kPhone},          {"telephone", UserColumn::kPhone},
      {"mobile", UserColumn::kPhone},           {"mobilenumber", UserColumn::kPhone},
      {"contactnumber", UserColumn::kPhone},    {"birthday", UserColumn::kBirthday},
      {"dateofbirth", UserColumn::kBirthday},   {"dob", UserColumn::kBirthday},
      {"birthdate", UserColumn::kBirthday},     {"companyid", UserColumn::kCompanyId},
      {"companyidentifier", UserColumn::kCompanyId}};
  if (auto it = kSynonyms.find(c); it != kSynonyms.end()) return it->second;
  return std::nullopt;
}

inline std::string strip_quotes(std::string_view v) {
  v = text::trim(v);
  if (v.size() >= 2 && (v.front() == '\'' || v.front() == '"' || v.front() == '`') &&
      v.back() == v.front())
    v = v.substr(1, v.size() - 2);
  return std::string(v);
}

inline std::vector<std::string> split_sql_list(std::string_view body) {
  std::vector<std::string> items;
  std::string cur;
  char quote = 0;
  int depth = 0;
  for (char c : body) {
    if (quote) {
      cur.push_back(c);
      if (c == quote) quote = 0;
    } else if (c == '\'' || c == '"') {
      quote = c;
      cur.push_back(c);
    } else if (c == '(') {
      ++depth;
      cur.push_back(c);
    } else if (c == ')') {
      --depth;
      cur.push_back(c);
    } else if (c == ',' && depth == 0) {
      items.push_back(strip_quotes(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!text::is_blank(cur)) items.push_back(strip_quotes(cur));
  return items;
}

// Top-level parenthesised groups of s starting at pos, quote-aware.
inline std::vector<std::string> paren_groups(std::string_view s) {
  std::vector<std::string> groups;
  char quote = 0;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (quote) {
      if (c == quote) quote = 0;
    } else if (c == '\'' || c == '"') {
      quote = c;
    } else if (c == '(') {
      if (depth++ == 0) start = i + 1;
    } else if (c == ')' && depth > 0) {
      if (--depth == 0) groups.emplace_back(s.substr(start, i - start));
    }
  }
  return groups;
}

inline std::vector<ExtractedTable> sql_tables(std::string_view response) {
  static const std::regex create_re(R"(create\s+table\s+[^\(]*\()", std::regex::icase);
  static const std::regex insert_re(R"(insert\s+into\s+[^\s\(]+\s*(\([^\)]*\))?\s*values)",
                                    std::regex::icase);
  std::vector<ExtractedTable> tables;
  const std::string all(response);
  std::vector<std::string> create_columns;
  for (auto it = std::sregex_iterator(all.begin(), all.end(), create_re);
       it != std::sregex_iterator(); ++it) {
    const std::size_t open = static_cast<std::size_t>(it->position() + it->length()) - 1;
    auto groups = paren_groups(std::string_view(all).substr(open));
    if (groups.empty()) continue;
    ExtractedTable t;
    for (const auto& def : split_sql_list(groups.front())) {
      auto words = text::split_words(def);
      if (words.empty()) continue;
      const std::string first = text::to_lower(words.front());
      if (first == "primary" || first == "key" || first == "constraint" || first == "unique" ||
          first == "foreign" || first == "index" || first == "check")
        continue;
      t.header.push_back(strip_quotes(words.front()));
    }
    create_columns = t.header;
    tables.push_back(std::move(t));
  }
  for (auto it = std::sregex_iterator(all.begin(), all.end(), insert_re);
       it != std::sregex_iterator(); ++it) {
    ExtractedTable t;
    if ((*it)[1].matched) {
      const std::string cols = (*it)[1].str();
      t.header = split_sql_list(std::string_view(cols).substr(1, cols.size() - 2));
    } else {
      t.header = create_columns;
    }
    const std::size_t begin = static_cast<std::size_t>(it->position() + it->length());
    std::size_t end = all.find(';', begin);
    if (end == std::string::npos) end = all.size();
    for (const auto& g : paren_groups(std::string_view(all).substr(begin, end - begin)))
      t.rows.push_back(split_sql_list(g));
    tables.push_back(std::move(t));
  }
  return tables;
}

// Pipe tables and comma/tab separated blocks: the first row of a run of
// consistently-shaped lines is the header.
inline std::vector<ExtractedTable> delimited_tables(std::string_view response) {
  std::vector<ExtractedTable> tables;
  std::optional<ExtractedTable> current;
  char current_sep = 0;
  auto flush = [&] {
    if (current) tables.push_back(std::move(*current));
    current.reset();
  };
  for (std::string_view raw : text::split_lines(response)) {
    std::string_view line = text::trim(raw);
    char sep = 0;
    if (line.find('|') != std::string_view::npos) sep = '|';
    else if (std::count(line.begin(), line.end(), '\t') >= 2) sep = '\t';
    else if (std::count(line.begin(), line.end(), ',') >= 2) sep = ',';
    if (sep == 0) {
      flush();
      continue;
    }
    if (sep == '|') {
      if (line.front() == '|') line.remove_prefix(1);
      if (!line.empty() && line.back() == '|') line.remove_suffix(1);
    }
    std::vector<std::string> cells;
    for (auto& c : dsv::split_record(line, sep)) cells.push_back(strip_quotes(c));
    if (sep == '|' && std::all_of(cells.begin(), cells.end(), [](const std::string& c) {
          return validation::only_chars(text::trim(c), "-: ");
        }))
      continue;  // markdown separator row
    if (!current || current_sep != sep || cells.size() != current->header.size()) {
      flush();
      current = ExtractedTable{cells, {}};
      current_sep = sep;
    } else {
      current->rows.push_back(std::move(cells));
    }
  }
  flush();
  return tables;
}

}  // namespace validation

inline std::vector<ExtractedTable> extract_tables(std::string_view response) {
  auto tables = validation::sql_tables(response);
  for (auto& t : validation::delimited_tables(response)) tables.push_back(std::move(t));
  return tables;
}

namespace validation {

inline ValidationResult validate_database(std::string_view response) {
  static const std::regex six_digits(R"(^\d{6}$)");
  ValidationResult r;
  const auto tables = extract_tables(response);

  const ExtractedTable* best = nullptr;
  std::size_t best_matches = 0;
  std::map<UserColumn, std::size_t> best_columns;
  for (const auto& t : tables) {
    std::map<UserColumn, std::size_t> columns;
    std::optional<std::size_t> first_name, last_name;
    for (std::size_t i = 0; i < t.header.size(); ++i) {
      const std::string n = normalize_column(t.header[i]);
      if (n == "firstname") first_name = i;
      if (n == "lastname" || n == "surname") last_name = i;
      if (auto c = classify_column(t.header[i])) columns.emplace(*c, i);
    }
    if (!columns.count(UserColumn::kFullName) && first_name && last_name)
      columns.emplace(UserColumn::kFullName, *first_name);
    if (columns.size() > best_matches || (columns.size() == best_matches && best &&
                                          t.rows.size() > best->rows.size())) {
      best = &t;
      best_matches = columns.size();
      best_columns = std::move(columns);
    }
  }

  r.summary["tables"] = tables.size();
  if (!best || best_matches == 0) {
    r.error("NoTable", "no table with user columns found");
    return r;
  }
  for (std::size_t c = 0; c < kRequiredUserColumns.size(); ++c) {
    if (!best_columns.count(static_cast<UserColumn>(c)))
      r.error("MissingColumn", "missing column: " + std::string(kRequiredUserColumns[c]));
  }
  r.summary["columns_matched"] = best_columns.size();
  r.summary["row_count"] = best->rows.size();
  r.parsed_units = best->rows.size() + 1;
  if (best->rows.empty()) r.error("NoRows", "table has no data rows");
  if (auto it = best_columns.find(UserColumn::kCompanyId); it != best_columns.end()) {
    std::size_t bad = 0;
    for (const auto& row : best->rows) {
      if (it->second >= row.size() ||
          !std::regex_match(strip_quotes(row[it->second]), six_digits))
        ++bad;
    }
    if (bad > 0)
      r.error("BadCompanyId", std::to_string(bad) + " rows without a 6-digit company ID");
  }
  r.valid = !r.has_errors();
  return r;
}

}  // namespace validation

inline ValidationResult validate(TokenTypeId type, std::string_view response) {
  switch (type) {
    case TokenTypeId::A: return validation::validate_robots(response);
    case TokenTypeId::B: return validation::validate_honeywords(response);
    case TokenTypeId::C: return validation::validate_ports(response);
    case TokenTypeId::D: return validation::validate_invoice(response);
    case TokenTypeId::E: return validation::validate_config(response);
    case TokenTypeId::F: return validation::validate_log(response);
    case TokenTypeId::G: return validation::validate_database(response);
  }
  throw Error(ErrorCode::kUnknownTokenType, "unknown token type");
}

enum class HoneywordResponseCategory { kNone, kFewer, kExact, kMore };

inline HoneywordResponseCategory categorize_honeyword_response(std::string_view response) {
  const std::size_t n = extract_credential_pairs(response).size();
  if (n == 0) return HoneywordResponseCategory::kNone;
  if (n < kExpectedHoneywordPairs) return HoneywordResponseCategory::kFewer;
  if (n == kExpectedHoneywordPairs) return HoneywordResponseCategory::kExact;
  return HoneywordResponseCategory::kMore;
}

// ---------------------------------------------------------------------------
// Qualitative rating

enum class Grade { kGood, kNeutral, kBad, kNotExecutable };

inline std::string_view symbol(Grade g) {
  switch (g) {
    case Grade::kGood: return "+";
    case Grade::kNeutral: return "o";
    case Grade::kBad: return "-";
    case Grade::kNotExecutable: return "x";
  }
  return "?";
}

inline Grade parse_grade(std::string_view s) {
  const std::string v = text::to_lower(text::trim(s));
  if (v == "+" || v == "good") return Grade::kGood;
  if (v == "o" || v == "neutral") return Grade::kNeutral;
  if (v == "-" || v == "bad") return Grade::kBad;
  if (v == "x" || v == "not_executable" || v == "not-executable") return Grade::kNotExecutable;
  throw Error(ErrorCode::kInvalidRating, "unknown grade '" + std::string(s) + "'");
}

struct QualitativeRating {
  Grade syntax = Grade::kNeutral;
  Grade credibility = Grade::kNeutral;
  Grade variability = Grade::kNeutral;
  Grade stability = Grade::kNeutral;
  std::string rater;
  std::vector<std::string> run_ids;

  std::array<Grade, 4> axes() const { return {syntax, credibility, variability, stability}; }
};

inline constexpr std::array<std::string_view, 4> kRatingAxes = {"Syntax", "Credibility",
                                                                "Variability", "Stability"};

// A response that could not be produced at all is not syntax-rated either.
inline void check_rating(const QualitativeRating& rating) {
  const auto axes = rating.axes();
  const bool any_x = std::any_of(axes.begin(), axes.end(),
                                 [](Grade g) { return g == Grade::kNotExecutable; });
  if (any_x && rating.syntax != Grade::kNotExecutable)
    throw Error(ErrorCode::kInvalidRating,
                "an axis is 'x' (not executable) but syntax is '" +
                    std::string(symbol(rating.syntax)) + "'");
}

// ---------------------------------------------------------------------------
// Variability helper

inline std::size_t edit_distance(std::string_view a, std::string_view b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

// Mean pairwise edit distance over responses to one prompt, each pair
// normalized by the longer response. 0 = identical outputs, 1 = nothing shared.
// Advisory only; the variability rating itself is a human judgement.
inline double response_variability(const std::vector<std::string>& responses) {
  if (responses.size() < 2) return 0.0;
  double sum = 0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < responses.size(); ++i) {
    for (std::size_t j = i + 1; j < responses.size(); ++j) {
      const std::size_t longest = std::max(responses[i].size(), responses[j].size());
      sum += longest == 0 ? 0.0
                          : static_cast<double>(edit_distance(responses[i], responses[j])) /
                                static_cast<double>(longest);
      ++pairs;
    }
  }
  return sum / static_cast<double>(pairs);
}

}  // namespace honeygen
