#include <gtest/gtest.h>

#include <cmath>

#include "guesswork/errors.hpp"
#include "guesswork/numeric.hpp"
#include "guesswork/serialization.hpp"

using namespace guesswork;

TEST(Json, RealsRoundTripIncludingInfinity) {
  EXPECT_EQ(real_to_json(kInf), "inf");
  EXPECT_EQ(real_to_json(-kInf), "-inf");
  EXPECT_TRUE(std::isinf(real_from_json(Json("inf"), "x")));
  EXPECT_EQ(real_from_json(real_to_json(0.1), "x"), 0.1);
  EXPECT_THROW(real_from_json(Json("abc"), "x"), InputError);
}

TEST(Json, PmfRoundTrip) {
  const Pmf p(Alphabet{"pw1", "pw2", "pw3"}, {0.5, 0.3, 0.2});
  const Json j = pmf_to_json(p, std::string("deadbeef"));
  EXPECT_EQ(j.at("source_hash"), "deadbeef");
  const Pmf back = pmf_from_json(Json::parse(j.dump()));
  EXPECT_EQ(back.symbols(), p.symbols());
  for (std::size_t i = 0; i < p.size(); ++i) EXPECT_EQ(back[i], p[i]);
}

TEST(Json, PmfErrorsAreInputErrors) {
  EXPECT_THROW(pmf_from_json(Json::parse(R"({"symbols":["a"],"probs":[0.5]})")), InputError);
  EXPECT_THROW(pmf_from_json(Json::parse(R"({"symbols":["a","a"],"probs":[0.5,0.5]})")), InputError);
  EXPECT_THROW(pmf_from_json(Json::parse(R"({"probs":"x"})")), InputError);
}

TEST(Json, MarkovRoundTrip) {
  const MarkovModel m({"a", "b"}, SquareMatrix::from_rows({{0.8, 0.2}, {0.4, 0.6}}));
  const MarkovModel back = markov_from_json(markov_to_json(m));
  EXPECT_EQ(back.states(), m.states());
  EXPECT_EQ(back.transitions().to_rows(), m.transitions().to_rows());
  EXPECT_THROW(markov_from_json(Json::parse(R"({"states":["a","b"],"transitions":[[1,0],[0.5,0.5]]})")), InputError);
}

TEST(Json, ReportAndStats) {
  ExponentReport r{kInf, Pmf::uniform(2), ExponentSolver::kTiltedBisection, 0.0, 0.5, std::nullopt};
  const Json j = report_to_json(r);
  EXPECT_EQ(j.at("value"), "inf");
  EXPECT_EQ(j.at("solver"), "tilted-bisection");
  SimStats s;
  s.trials = 10;
  s.mean_G = 2.5;
  const Json sj = stats_to_json(s);
  EXPECT_EQ(sj.at("trials"), 10);
  EXPECT_EQ(sj.at("mean_G"), 2.5);
}
