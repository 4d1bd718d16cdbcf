#pragma once

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <filesystem>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "honeygen/robots_txt.hpp"
#include "honeygen/text.hpp"

namespace honeygen::robots {

enum class FetchStatus { kOk, kUnreachable, kNon200, kTlsFailure, kUnparseable, kTooManyRedirects };

constexpr std::string_view to_string(FetchStatus s) {
  switch (s) {
    case FetchStatus::kOk: return "ok";
    case FetchStatus::kUnreachable: return "unreachable";
    case FetchStatus::kNon200: return "non-200";
    case FetchStatus::kTlsFailure: return "tls-failure";
    case FetchStatus::kUnparseable: return "unparseable";
    case FetchStatus::kTooManyRedirects: return "too-many-redirects";
  }
  return "unknown";
}

struct SiteOutcome {
  std::string host;
  FetchStatus status = FetchStatus::kUnreachable;
  int http_status = 0;
  std::string detail;
};

struct CrawlReport {
  std::size_t fetched = 0;
  std::size_t failed = 0;
  std::vector<SiteOutcome> sites;
};

struct CrawlOptions {
  std::string scheme = "https";
  std::chrono::seconds timeout{10};
  int max_redirects = 3;
  std::string user_agent = "honeygen-corpus/0.1 (robots.txt statistics; no retries)";
  std::size_t parallelism = 8;
};

// "host:8080" -> "host_8080.robots.txt"
inline std::string corpus_file_name(std::string_view host) {
  std::string name;
  for (char c : host) {
    const bool safe = std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-';
    name.push_back(safe ? c : '_');
  }
  return name + ".robots.txt";
}

namespace detail {

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

inline std::optional<SplitUrl> split_url(std::string_view url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string_view::npos) return std::nullopt;
  auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string_view::npos) return SplitUrl{std::string(url), "/"};
  return SplitUrl{std::string(url.substr(0, path_start)), std::string(url.substr(path_start))};
}

inline bool is_tls_error(httplib::Error e) {
  return e == httplib::Error::SSLConnection || e == httplib::Error::SSLLoadingCerts ||
         e == httplib::Error::SSLServerVerification;
}

inline SiteOutcome fetch_robots(const std::string& host, const std::filesystem::path& out_dir,
                                const CrawlOptions& options) {
  SiteOutcome outcome;
  outcome.host = host;
  std::string url = options.scheme + "://" + host + "/robots.txt";
  for (int redirects = 0;; ++redirects) {
    auto parts = split_url(url);
    if (!parts) {
      outcome.status = FetchStatus::kUnreachable;
      outcome.detail = "bad url " + url;
      return outcome;
    }
    httplib::Client client(parts->origin);
    if (!client.is_valid()) {
      outcome.status = FetchStatus::kUnreachable;
      outcome.detail = "unsupported url " + url;
      return outcome;
    }
    client.set_connection_timeout(options.timeout);
    client.set_read_timeout(options.timeout);
    client.set_write_timeout(options.timeout);
    client.set_follow_location(false);
    auto res = client.Get(parts->path, {{"User-Agent", options.user_agent}});
    if (!res) {
      outcome.status = is_tls_error(res.error()) ? FetchStatus::kTlsFailure
                                                 : FetchStatus::kUnreachable;
      outcome.detail = httplib::to_string(res.error());
      return outcome;
    }
    outcome.http_status = res->status;
    if (res->status >= 300 && res->status < 400 && res->has_header("Location")) {
      if (redirects >= options.max_redirects) {
        outcome.status = FetchStatus::kTooManyRedirects;
        outcome.detail = "more than " + std::to_string(options.max_redirects) + " redirects";
        return outcome;
      }
      std::string location = res->get_header_value("Location");
      url = location.find("://") != std::string::npos ? location : parts->origin + location;
      continue;
    }
    if (res->status != 200) {
      outcome.status = FetchStatus::kNon200;
      outcome.detail = "HTTP " + std::to_string(res->status);
      return outcome;
    }
    try {
      parse_robots(res->body);
    } catch (const Error& e) {
      outcome.status = FetchStatus::kUnparseable;
      outcome.detail = e.what();
      return outcome;
    }
    text::write_file(out_dir / corpus_file_name(host), res->body);
    outcome.status = FetchStatus::kOk;
    return outcome;
  }
}

}  // namespace detail

inline nlohmann::json crawl_report_to_json(const CrawlReport& report) {
  nlohmann::json sites = nlohmann::json::array();
  for (const auto& s : report.sites) {
    sites.push_back({{"host", s.host},
                     {"status", std::string(to_string(s.status))},
                     {"http_status", s.http_status},
                     {"detail", s.detail}});
  }
  return {{"fetched", report.fetched}, {"failed", report.failed}, {"sites", sites}};
}

// Fetches <scheme>://<host>/robots.txt for every host with bounded
// concurrency. Accepted bodies land in out_dir/<host>.robots.txt, the
// per-site outcomes in out_dir/crawl_report.json.
inline CrawlReport crawl_corpus(const std::vector<std::string>& hosts,
                                const std::filesystem::path& out_dir,
                                const CrawlOptions& options = {}) {
  std::filesystem::create_directories(out_dir);
  CrawlReport report;
  report.sites.resize(hosts.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < hosts.size(); i = next++) {
      try {
        report.sites[i] = detail::fetch_robots(hosts[i], out_dir, options);
      } catch (const std::exception& e) {
        report.sites[i] = {hosts[i], FetchStatus::kUnreachable, 0, e.what()};
      }
    }
  };
  const std::size_t n_workers =
      std::max<std::size_t>(1, std::min(options.parallelism, hosts.size()));
  {
    std::vector<std::jthread> workers;
    for (std::size_t i = 0; i < n_workers; ++i) workers.emplace_back(worker);
  }
  for (const auto& s : report.sites) {
    if (s.status == FetchStatus::kOk)
      ++report.fetched;
    else
      ++report.failed;
  }
  text::write_file(out_dir / "crawl_report.json", crawl_report_to_json(report).dump(2) + "\n");
  return report;
}

}  // namespace honeygen::robots
