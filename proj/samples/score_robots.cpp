// Scores a robots.txt (or a raw model response) from a file or stdin.
//   score_robots path/to/robots.txt

#include <cstdio>
#include <iostream>
#include <iterator>

#include "honeygen/robots_txt.hpp"

using namespace honeygen;

int main(int argc, char** argv) {
  std::string body;
  if (argc > 1)
    body = text::read_file(argv[1]);
  else
    body.assign(std::istreambuf_iterator<char>(std::cin), {});

  const auto scores = robots::score_response(body, robots::builtin_corpus_stats(), robots::builtin_wordlist());
  std::printf("format    %d\nvariance  %.4f\n", scores.format_score, scores.variance_score);
  const auto values = scores.features.values();
  for (std::size_t i = 0; i < values.size(); ++i)
    std::printf("  %-24s %g\n", std::string(robots::kFeatureNames[i]).c_str(), values[i]);
  return 0;
}
