#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "cli.hpp"
#include "fixtures.hpp"
#include "vulnaudit/cleaning.hpp"
#include "vulnaudit/ingestion.hpp"
#include "vulnaudit/review.hpp"

namespace vulnaudit {
namespace {

namespace fs = std::filesystem;
using testing::planted_function;
using testing::sample;

const fs::path kData = VULNAUDIT_TEST_DATA;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("vulnaudit_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string write(const std::string& name, const Dataset& d) const {
    save_dataset(d, path(name));
    return path(name);
  }

  fs::path dir_;
};

TEST_F(CliTest, AuditCleanFixture) {
  Dataset d("clean");
  for (std::size_t i = 0; i < 12; ++i) {
    d.add(sample("s" + std::to_string(i), planted_function(i), Label::Vulnerable,
                 testing::day(static_cast<int>(i))));
  }
  const auto in = write("clean.jsonl", d);
  const auto r = run_cli({"audit", "--input", in, "--report", path("r.json")});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("uniqueness: 1.0 (12/12) [full_dataset]"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("consistency: 1.0 (12/12)"), std::string::npos);
  EXPECT_NE(r.out.find("completeness: 1.0 (12/12)"), std::string::npos);
  EXPECT_NE(r.out.find("currentness: "), std::string::npos);
  EXPECT_EQ(r.out.find("accuracy"), std::string::npos);
  EXPECT_TRUE(fs::exists(path("r.json")));
}

TEST_F(CliTest, AuditMalformedInput) {
  std::ofstream(path("bad.jsonl")) << R"({"id":"a","code":"x","label":"vulnerable"})" "\n"
                                   << "{broken\n";
  const auto r = run_cli({"audit", "--input", path("bad.jsonl")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("line 2"), std::string::npos) << r.err;
  EXPECT_EQ(run_cli({"audit", "--input", path("missing.jsonl")}).code, 2);
}

TEST_F(CliTest, AuditGoldenReport) {
  const auto r = run_cli({"audit", "--input", (kData / "defects.jsonl").string(), "--report",
                          path("report.json"), "--clusters", path("clusters.jsonl")});
  ASSERT_EQ(r.code, 0) << r.err;
  // Hand-computed: b1~b2 same-label near-miss, a1/a2 cross-label exact copy,
  // four incomplete plants, JSD over the 77 older and 18 newer tokens.
  EXPECT_NE(r.out.find("uniqueness: 0.75 (6/8)"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("consistency: 0.75 (6/8)"), std::string::npos);
  EXPECT_NE(r.out.find("completeness: 0.5 (4/8)"), std::string::npos);
  EXPECT_NE(r.out.find("currentness: 0.56428287907479"), std::string::npos) << r.out;
  EXPECT_EQ(slurp(path("report.json")), slurp(kData / "defects_report.json"));
  EXPECT_EQ(slurp(path("clusters.jsonl")),
            "{\"tier\":\"type3\",\"members\":[\"b1\",\"b2\"],"
            "\"label_profile\":{\"vulnerable\":2,\"non_vulnerable\":0}}\n");
}

TEST_F(CliTest, AuditThresholdFlags) {
  const auto in = (kData / "defects.jsonl").string();
  const auto strict = run_cli({"audit", "--input", in, "--type3-multiset", "0.95"});
  EXPECT_NE(strict.out.find("uniqueness: 1.0 (8/8)"), std::string::npos) << strict.out;
  const auto rep = run_cli({"audit", "--input", in, "--uniqueness-convention", "representative"});
  EXPECT_NE(rep.out.find("uniqueness: 0.875 (7/8)"), std::string::npos) << rep.out;
  EXPECT_EQ(run_cli({"audit", "--input", in, "--uniqueness-convention", "x"}).code, 2);
  EXPECT_EQ(run_cli({"audit", "--input", in, "--type3-set", "2"}).code, 2);
}

TEST_F(CliTest, Validate) {
  const auto r = run_cli({"validate", "--input", (kData / "defects.jsonl").string()});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out,
            "samples: 8\nvulnerable: 4\nnon_vulnerable: 4\nmissing_date: 1\nempty_code: 1\n");
}

TEST_F(CliTest, CleanCompletenessRemovesPlants) {
  const auto r = run_cli({"clean", "--input", (kData / "defects.jsonl").string(), "--output",
                          path("out.jsonl"), "--ops", "completeness", "--log", path("log.jsonl")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto log = slurp(path("log.jsonl"));
  EXPECT_EQ(log,
            "{\"id\":\"c1\",\"reason\":\"incomplete:truncated_start\"}\n"
            "{\"id\":\"c2\",\"reason\":\"incomplete:truncated_end\"}\n"
            "{\"id\":\"c3\",\"reason\":\"incomplete:declaration_only\"}\n"
            "{\"id\":\"c4\",\"reason\":\"incomplete:empty\"}\n");
  EXPECT_EQ(load_dataset(path("out.jsonl")).size(), 4u);
}

TEST_F(CliTest, CleanThenAuditReachesOne) {
  const auto in = write("planted.jsonl", testing::planted_fixture().dataset);
  ASSERT_EQ(run_cli({"clean", "--input", in, "--output", path("clean.jsonl"), "--ops",
                     "dedup,consistency"})
                .code,
            0);
  const auto r = run_cli({"audit", "--input", path("clean.jsonl")});
  EXPECT_NE(r.out.find("uniqueness: 1.0"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("consistency: 1.0"), std::string::npos) << r.out;
}

TEST_F(CliTest, CleanTestOnlyNeedsSplit) {
  const auto r = run_cli({"clean", "--input", (kData / "defects.jsonl").string(), "--output",
                          path("o.jsonl"), "--ops", "consistency", "--scope", "test-only"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("--split"), std::string::npos);
  EXPECT_EQ(run_cli({"clean", "--input", (kData / "defects.jsonl").string(), "--output",
                     path("o.jsonl"), "--ops", "bogus"})
                .code,
            2);
}

TEST_F(CliTest, CleanTestOnlyWithSplit) {
  const auto in = (kData / "defects.jsonl").string();
  SplitAssignment split;
  split.partitions = {{PartitionRole::Train, {"a1", "b1", "b2", "c1", "c3", "c4"}},
                      {PartitionRole::Validation, {"c2"}},
                      {PartitionRole::Test, {"a2"}}};
  save_split(split, path("split.json"));
  const auto r = run_cli({"clean", "--input", in, "--output", path("o.jsonl"), "--ops",
                          "consistency", "--scope", "test-only", "--split", path("split.json"),
                          "--split-out", path("split2.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_FALSE(load_dataset(path("o.jsonl")).contains("a2"));
  EXPECT_TRUE(load_split(path("split2.json")).ids(PartitionRole::Test).empty());
}

TEST_F(CliTest, SplitDeterministic) {
  const auto in = write("p.jsonl", testing::planted_fixture().dataset);
  ASSERT_EQ(run_cli({"split", "--input", in, "--seed", "7", "--out", path("a.json")}).code, 0);
  ASSERT_EQ(run_cli({"split", "--input", in, "--seed", "7", "--out", path("b.json")}).code, 0);
  EXPECT_EQ(slurp(path("a.json")), slurp(path("b.json")));
  ASSERT_EQ(run_cli({"split", "--input", in, "--seed", "8", "--out", path("c.json")}).code, 0);
  EXPECT_NE(slurp(path("a.json")), slurp(path("c.json")));
  const auto t = run_cli({"split", "--input", in, "--protocol", "temporal", "--out", path("t.json")});
  EXPECT_EQ(t.code, 0);
  EXPECT_EQ(load_split(path("t.json")).partitions.size(), 10u);
}

TEST_F(CliTest, TemporalSplitOnUndatedData) {
  Dataset d("undated");
  for (int i = 0; i < 20; ++i) d.add(sample("s" + std::to_string(i), "x"));
  const auto r = run_cli({"split", "--input", write("u.jsonl", d), "--protocol", "temporal",
                          "--out", path("t.json")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("insufficient"), std::string::npos) << r.err;
}

TEST_F(CliTest, SplitDedupCrossSetMatchesPlants) {
  Dataset d("pairs");
  std::map<std::string, std::string> partner;
  for (std::size_t i = 0; i < 30; ++i) {
    const auto a = "a" + std::to_string(i);
    const auto b = "b" + std::to_string(i);
    d.add(sample(a, planted_function(i)));
    d.add(sample(b, planted_function(i, "int", 1)));
    partner[a] = b;
    partner[b] = a;
  }
  for (std::size_t i = 100; i < 140; ++i) d.add(sample("u" + std::to_string(i), planted_function(i)));
  const auto in = write("pairs.jsonl", d);
  ASSERT_EQ(run_cli({"split", "--input", in, "--seed", "3", "--out", path("plain.json")}).code, 0);
  const auto r = run_cli({"split", "--input", in, "--seed", "3", "--dedup-cross-set", "--out",
                          path("dedup.json"), "--log", path("log.jsonl")});
  ASSERT_EQ(r.code, 0) << r.err;

  const auto plain = load_split(path("plain.json"));
  const auto test = plain.ids(PartitionRole::Test);
  std::set<std::string> in_test(test.begin(), test.end());
  std::size_t expected = 0;
  for (const auto& id : test) {
    auto it = partner.find(id);
    if (it != partner.end() && !in_test.contains(it->second)) ++expected;
  }
  const auto dedup = load_split(path("dedup.json"));
  EXPECT_EQ(test.size() - dedup.ids(PartitionRole::Test).size(), expected);
  EXPECT_NE(r.out.find("removed from test: " + std::to_string(expected)), std::string::npos) << r.out;
}

ReviewSheet graded_sheet(int correct, int total, bool raters_agree) {
  std::vector<std::string> ids;
  for (int i = 0; i < total; ++i) ids.push_back("e" + std::to_string(i));
  ReviewSheet sheet("d", ids);
  for (int i = 0; i < total; ++i) {
    const auto v = i < correct ? Verdict::Correct : Verdict::Incorrect;
    sheet.set_verdict(ids[i], 0, v);
    sheet.set_verdict(ids[i], 1, raters_agree || i % 2 ? v : Verdict::Correct);
    sheet.adjudicate(ids[i], v);
  }
  return sheet;
}

TEST_F(CliTest, ReviewWorkflow) {
  Dataset d("pool");
  for (int i = 0; i < 300; ++i) {
    d.add(sample("s" + std::to_string(i), "x", i % 3 ? Label::Vulnerable : Label::NonVulnerable));
  }
  const auto in = write("pool.jsonl", d);
  auto r = run_cli({"review-sample", "--input", in, "--n", "70", "--seed", "1", "--out", path("a.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  run_cli({"review-sample", "--input", in, "--n", "70", "--seed", "1", "--out", path("b.json")});
  EXPECT_EQ(slurp(path("a.json")), slurp(path("b.json")));
  EXPECT_EQ(load_review_sheet(path("a.json")).size(), 70u);

  r = run_cli({"review-sample", "--input", in, "--seed", "1", "--out", path("c.json")});
  EXPECT_EQ(load_review_sheet(path("c.json")).size(), cochran_sample_size(0.9, 0.1, 0.5, 200));
  EXPECT_EQ(run_cli({"review-sample", "--input", in, "--n", "500", "--out", path("d.json")}).code, 2);

  save_review_sheet(graded_sheet(40, 70, true), path("agree.json"));
  r = run_cli({"review-kappa", "--sheet", path("agree.json")});
  EXPECT_EQ(r.out, "kappa: 1.0\n");
  save_review_sheet(graded_sheet(56, 70, true), path("score.json"));
  r = run_cli({"review-score", "--sheet", path("score.json")});
  EXPECT_EQ(r.out, "accuracy: 0.8 (56/70)\n");

  save_review_sheet(ReviewSheet("d", {"x"}), path("open.json"));
  EXPECT_EQ(run_cli({"review-score", "--sheet", path("open.json")}).code, 2);
}

TEST_F(CliTest, StatsFromFiles) {
  std::ofstream(path("a.csv")) << "run,mcc\n1,1\n2,2\n3,3\n";
  std::ofstream(path("b.csv")) << "4\n5\n6\n";
  auto r = run_cli({"stats", "--test", "mwu", "--a", path("a.csv"), "--a-column", "1", "--b",
                    path("b.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "U: 0.0\np: 0.1\nmethod: exact\n");

  std::ofstream(path("x.tsv")) << "1\t1\n2\t3\n3\t2\n4\t4\n";
  r = run_cli({"stats", "--test", "kendall", "--a", path("x.tsv"), "--b", path("x.tsv"),
               "--b-column", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.substr(0, 14), "tau_b: 0.66666");

  std::ofstream(path("bad.csv")) << "1\nfoo\n";
  EXPECT_EQ(run_cli({"stats", "--test", "mwu", "--a", path("bad.csv"), "--b", path("b.csv")}).code, 2);
  EXPECT_EQ(run_cli({"stats", "--test", "ttest", "--a", path("a.csv"), "--b", path("b.csv")}).code, 2);
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run_cli({}).code, 2);
  EXPECT_EQ(run_cli({"frobnicate"}).code, 2);
  EXPECT_EQ(run_cli({"audit"}).code, 2);
  const auto help = run_cli({"--help"});
  EXPECT_EQ(help.code, 0);
  EXPECT_NE(help.out.find("audit"), std::string::npos);
}

}  // namespace
}  // namespace vulnaudit
