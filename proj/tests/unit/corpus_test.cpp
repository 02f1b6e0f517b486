#include <gtest/gtest.h>

#include <sstream>

#include "guesswork/corpus.hpp"
#include "guesswork/errors.hpp"

using namespace guesswork;

namespace {

std::vector<CountRow> parse(const std::string& text) {
  std::istringstream in(text);
  return parse_frequency_text(in);
}

std::string error_of(const std::string& text) {
  try {
    empirical_from_counts(parse(text));
  } catch (const InputError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Corpus, ReadsFixture) {
  const auto rows = read_frequency_file(std::string(GW_FIXTURES) + "/tiny_corpus.tsv");
  ASSERT_EQ(rows.size(), 3u);
  const Pmf p = empirical_from_counts(rows);
  EXPECT_EQ(p.symbol(0), "123456");
  EXPECT_DOUBLE_EQ(p[0], 0.5);
  EXPECT_DOUBLE_EQ(p[2], 0.2);
}

TEST(Corpus, SortsByCountThenSymbol) {
  const Pmf p = empirical_from_counts(parse("b\t5\na\t5\nc\t10\n"));
  EXPECT_EQ(p.symbols(), (Alphabet{"c", "a", "b"}));
}

TEST(Corpus, SkipsCommentsBlankLinesAndCarriageReturns) {
  const auto rows = parse("# header\n\npass word\t3\r\nx\ty\t2\n");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].symbol, "pass word");
  EXPECT_EQ(rows[1].symbol, "x\ty");
  EXPECT_EQ(rows[1].line, 4u);
}

TEST(Corpus, ReportsLineNumbers) {
  EXPECT_NE(error_of("a\t1\nb\t2\na\t3\n").find("line 3"), std::string::npos);
  EXPECT_NE(error_of("a\t1\nb\t0\n").find("line 2"), std::string::npos);
  std::istringstream bad("a\t1\nb\tmany\n");
  try {
    parse_frequency_text(bad);
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
  std::istringstream no_tab("justaword\n");
  EXPECT_THROW(parse_frequency_text(no_tab), InputError);
}

TEST(Corpus, EmptyInputIsAnError) {
  EXPECT_THROW(empirical_from_counts(parse("# nothing\n")), InputError);
  EXPECT_THROW(read_frequency_file("/nonexistent/file.tsv"), InputError);
}

TEST(Corpus, TopKRenormalizes) {
  const Pmf p = empirical_from_counts(parse("a\t50\nb\t30\nc\t20\n"));
  const Pmf t = truncate_top_k(p, 2);
  ASSERT_EQ(t.size(), 2u);
  EXPECT_NEAR(t[0], 50.0 / 80.0, 1e-15);
  EXPECT_EQ(t.symbol(1), "b");
}
