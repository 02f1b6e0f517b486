#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "guesswork/serialization.hpp"

namespace fs = std::filesystem;
using guesswork::Json;

namespace {

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("gw_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(std::vector<std::string> args, const fs::path& out_dir = {}) {
    args.insert(args.begin(), {"--out", (out_dir.empty() ? dir_ : out_dir).string()});
    out_.str("");
    err_.str("");
    return guesswork::cli::run(args, out_, err_);
  }
  Json stdout_json() const { return Json::parse(out_.str()); }
  Json file_json(const fs::path& p) const {
    std::ifstream in(p);
    return Json::parse(in);
  }

  fs::path dir_;
  std::ostringstream out_;
  std::ostringstream err_;
};

std::string fixture(const std::string& name) { return std::string(GW_FIXTURES) + "/" + name; }

}  // namespace

TEST(Sha, KnownDigest) {
  EXPECT_EQ(guesswork::cli::sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_F(Cli, MomentsForBernoulli) {
  ASSERT_EQ(run({"moments", "--bernoulli", "0.2", "--rho", "1"}), 0) << err_.str();
  const Json j = stdout_json();
  EXPECT_EQ(j.at("command"), "moments");
  EXPECT_NEAR(j.at("exact_guesswork").get<double>(), 1.2, 1e-15);
  EXPECT_NEAR(j.at("arikan_upper").get<double>(), 1.8, 1e-14);
  EXPECT_TRUE(fs::exists(dir_ / "moments.json"));
  EXPECT_TRUE(fs::exists(dir_ / "resolved_config.json"));
}

TEST_F(Cli, BitsFlagChangesUnits) {
  ASSERT_EQ(run({"--bits", "moments", "--probs", "0.25", "0.25", "0.25", "0.25", "--rho", "1"}), 0) << err_.str();
  const Json j = stdout_json();
  EXPECT_EQ(j.at("unit"), "bits");
  EXPECT_NEAR(j.at("sync_exponent").get<double>(), 2.0, 1e-12);
}

TEST_F(Cli, FlagsOverrideConfig) {
  const fs::path cfg = dir_ / "cfg.json";
  std::ofstream(cfg) << R"({"bernoulli": 0.3, "rho": 2})";
  ASSERT_EQ(run({"--config", cfg.string(), "moments", "--rho", "1"}), 0) << err_.str();
  const Json resolved = file_json(dir_ / "resolved_config.json");
  EXPECT_EQ(resolved.at("config").at("rho"), 1.0);
  EXPECT_EQ(resolved.at("config").at("bernoulli"), 0.3);
}

TEST_F(Cli, IngestWritesDistribution) {
  ASSERT_EQ(run({"ingest", fixture("tiny_corpus.tsv")}), 0) << err_.str();
  const guesswork::Pmf p = guesswork::pmf_from_json(file_json(dir_ / "distribution.json"));
  EXPECT_EQ(p.symbol(0), "123456");
  EXPECT_EQ(stdout_json().at("source_hash").get<std::string>().size(), 64u);
  EXPECT_EQ(run({"ingest", fixture("duplicate_corpus.tsv")}), 2);
  EXPECT_NE(err_.str().find("line"), std::string::npos);
}

TEST_F(Cli, ExponentsVerify) {
  ASSERT_EQ(run({"--verify", "exponents", "--bernoulli", "0.2", "--alpha", "0.3", "--beta", "1"}), 0) << err_.str();
  const Json j = stdout_json();
  EXPECT_NEAR(j.at("sync_success").at("value").get<double>(), 0.0463938113, 1e-9);
  EXPECT_EQ(run({"exponents", "--bernoulli", "0.2", "--alpha", "0.9"}), 2);
}

TEST_F(Cli, ListExponentConvention) {
  ASSERT_EQ(run({"exponents", "--bernoulli", "0.2", "--list-exponent", "0.5"}), 0) << err_.str();
  EXPECT_NEAR(stdout_json().at("alpha").get<double>(), 0.5 * std::log(2.0), 1e-15);
}

TEST_F(Cli, SimulateThenReport) {
  const fs::path sim = dir_ / "sim";
  const fs::path mom = dir_ / "mom";
  ASSERT_EQ(run({"--verify", "--config", fixture("simulate_bernoulli.json"), "simulate", "--trials", "20000"}, sim), 0)
      << err_.str();
  ASSERT_EQ(run({"moments", "--bernoulli", "0.2", "--rho", "1"}, mom), 0) << err_.str();
  ASSERT_EQ(run({"report", (sim / "simulate.json").string(), (mom / "moments.json").string(), "--tolerance-se", "4"}), 0)
      << err_.str();
  const Json j = stdout_json();
  std::size_t ok = 0;
  for (const auto& row : j.at("rows")) {
    EXPECT_NE(row.at("status"), "MISMATCH") << row.dump();
    if (row.at("status") == "OK") ++ok;
  }
  EXPECT_EQ(ok, 3u);
  EXPECT_TRUE(fs::exists(dir_ / "report.csv"));
}

TEST_F(Cli, ReportRejectsDifferentAlphabets) {
  const fs::path a = dir_ / "a";
  const fs::path b = dir_ / "b";
  ASSERT_EQ(run({"moments", "--bernoulli", "0.2"}, a), 0);
  ASSERT_EQ(run({"moments", "--probs", "0.5", "0.3", "0.2"}, b), 0);
  EXPECT_EQ(run({"report", (a / "moments.json").string(), (b / "moments.json").string()}), 2);
}

TEST_F(Cli, SimulationIsReproducible) {
  ASSERT_EQ(run({"--config", fixture("simulate_bernoulli.json"), "simulate", "--trials", "500"}, dir_ / "x"), 0);
  const std::string first = out_.str();
  ASSERT_EQ(run({"--config", fixture("simulate_bernoulli.json"), "simulate", "--trials", "500"}, dir_ / "x"), 0);
  const Json a = Json::parse(first);
  const Json b = stdout_json();
  EXPECT_EQ(a.at("quantities"), b.at("quantities"));
}

TEST_F(Cli, MarkovAndZipf) {
  ASSERT_EQ(run({"--verify", "markov", "--chain", fixture("two_state_chain.json"), "--rho", "1"}), 0) << err_.str();
  EXPECT_GT(stdout_json().at("lambda").get<double>(), 1.0);
  EXPECT_EQ(run({"markov", "--chain", fixture("reducible_chain.json")}), 2);
  ASSERT_EQ(run({"--verify", "zipf", "--m", "100", "--s", "1"}), 0) << err_.str();
  EXPECT_EQ(run({"zipf", "--m", "100", "--s", "1.5", "--variant", "cdf"}), 1);
}

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(run({}), 2);
  EXPECT_EQ(run({"moments", "--nope"}), 2);
  EXPECT_EQ(run({"moments", "--bernoulli", "0.2", "--rho", "-1"}), 1);
}
