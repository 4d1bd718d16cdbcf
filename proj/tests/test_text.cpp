#include <gtest/gtest.h>

#include <filesystem>

#include "honeygen/dsv.hpp"
#include "honeygen/text.hpp"

using namespace honeygen;

TEST(Text, SplitLinesHandlesAllLineEndings) {
  const auto lines = text::split_lines("a\r\nb\rc\nd");
  ASSERT_EQ(lines.size(), 4u);
  EXPECT_EQ(lines[0], "a");
  EXPECT_EQ(lines[1], "b");
  EXPECT_EQ(lines[2], "c");
  EXPECT_EQ(lines[3], "d");
  EXPECT_EQ(text::split_lines("x\n").size(), 1u);
  EXPECT_EQ(text::split_lines("x\n\n").size(), 2u);
  EXPECT_TRUE(text::split_lines("").empty());
}

TEST(Text, TrimAndCase) {
  EXPECT_EQ(text::trim("  \t a b \r\n"), "a b");
  EXPECT_EQ(text::to_lower("DisAllow"), "disallow");
  EXPECT_TRUE(text::iequals("User-Agent", "user-agent"));
  EXPECT_FALSE(text::iequals("User-Agent", "user-agents"));
  EXPECT_TRUE(text::icontains("I CANNOT do that", "cannot"));
}

TEST(Text, ReplaceAllDoesNotRescanReplacement) {
  EXPECT_EQ(text::replace_all("aaa", "a", "aa"), "aaaaaa");
  EXPECT_EQ(text::replace_all("{x}{x}", "{x}", ""), "");
}

TEST(Text, CountOccurrencesIsNonOverlapping) {
  EXPECT_EQ(text::count_occurrences("aaaa", "aa"), 2u);
  EXPECT_EQ(text::count_occurrences("abc", ""), 0u);
}

TEST(Text, NumberFormatting) {
  EXPECT_EQ(text::format_fixed(8.714, 2), "8.71");
  EXPECT_EQ(text::format_double(0.1), "0.1");
  EXPECT_EQ(text::parse_double(" 2.5 "), 2.5);
  EXPECT_FALSE(text::parse_double("2.5x").has_value());
  EXPECT_FALSE(text::parse_double("").has_value());
}

TEST(Text, Sha256KnownVector) {
  EXPECT_EQ(text::sha256_hex("abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Text, FileRoundTripAndErrors) {
  const auto path = std::filesystem::temp_directory_path() / "honeygen_text_roundtrip.bin";
  text::write_file(path, std::string("a\0b\r\n", 5));
  EXPECT_EQ(text::read_file(path), std::string("a\0b\r\n", 5));
  std::filesystem::remove(path);
  try {
    text::read_file(path);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnreadableFile);
  }
}

TEST(Dsv, QuotedFields) {
  std::vector<std::string> f;
  ASSERT_TRUE(dsv::split_record(R"(a,"b,c","d""e",)", ',', f));
  ASSERT_EQ(f.size(), 4u);
  EXPECT_EQ(f[1], "b,c");
  EXPECT_EQ(f[2], "d\"e");
  EXPECT_EQ(f[3], "");
  EXPECT_FALSE(dsv::split_record(R"(a,"unterminated)", ',', f));
}

TEST(Dsv, QuoteRoundTrip) {
  for (std::string s : {"plain", "with,comma", "with\"quote", ""}) {
    const auto rec = dsv::quote_field(s, ',') + "," + dsv::quote_field("x", ',');
    const auto f = dsv::split_record(rec, ',');
    ASSERT_EQ(f.size(), 2u);
    EXPECT_EQ(f[0], s);
  }
}
