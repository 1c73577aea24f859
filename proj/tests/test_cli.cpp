#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "emars/cli.hpp"
#include "emars/fact_io.hpp"
#include "test_support.hpp"

using namespace emars;
using namespace emars::testing;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "emars");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("emars_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()) + "_" +
            std::to_string(std::random_device{}()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string tmp(const std::string& name) const { return (dir_ / name).string(); }

  std::string facts_file(const std::string& name, const std::vector<Fact>& facts) const {
    std::ofstream o(tmp(name));
    write_facts(o, facts);
    return tmp(name);
  }

  std::string ingest_spouse() {
    const Result r = run({"ingest", "--entities", source_path("fixtures/spouse.json"), "--out", tmp("base.snap")});
    EXPECT_EQ(r.code, cli::kOk) << r.err;
    return tmp("base.snap");
  }

  fs::path dir_;
};

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) {
    if (!l.empty()) out.push_back(l);
  }
  return out;
}

}  // namespace

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, cli::kUsage);
  EXPECT_EQ(run({"frobnicate"}).code, cli::kUsage);
  EXPECT_EQ(run({"ingest"}).code, cli::kUsage);
  EXPECT_EQ(run({"explain", "--in", source_path("fixtures/spouse.json")}).code, cli::kUsage);
  const Result help = run({"--help"});
  EXPECT_EQ(help.code, cli::kOk);
  EXPECT_NE(help.out.find("pipeline"), std::string::npos);
}

TEST_F(Cli, IngestWritesSnapshotAndReport) {
  const Result r = run({"ingest", "--entities", source_path("fixtures/spouse.json"), "--out", tmp("base.snap")});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const auto report = nlohmann::json::parse(r.out);
  EXPECT_EQ(report["facts_emitted"], 1);
  EXPECT_EQ(report["references_ignored"], 1);
  const Store s = load_snapshot(tmp("base.snap"));
  EXPECT_EQ(s.size(), 1u);
}

TEST_F(Cli, CloseQueryExplainCheck) {
  const std::string base = ingest_spouse();
  const Result c = run({"check", "--in", base, "--constraints", source_path("constraints/spouse_symmetric.mapl")});
  EXPECT_EQ(c.code, cli::kViolations);
  EXPECT_EQ(lines(c.out).size(), 1u);
  EXPECT_NE(c.err.find("warning"), std::string::npos);

  const Result cl = run({"close", "--in", base, "--rules", source_path("rules/spouse_symmetric.marpl"), "--out",
                         tmp("closed.snap"), "--no-timing"});
  ASSERT_EQ(cl.code, cli::kOk) << cl.err;
  const auto report = nlohmann::json::parse(cl.out);
  // The mirrored fact carries no rank, so mirroring it back adds a rank-less Q1 -> Q2.
  EXPECT_EQ(report["facts_after"], 3);
  EXPECT_FALSE(report.contains("wall_ms"));

  const Result q = run({"query", "--in", tmp("closed.snap"), "spouse(Q2, ?x)"});
  ASSERT_EQ(q.code, cli::kOk) << q.err;
  const auto ql = lines(q.out);
  ASSERT_EQ(ql.size(), 1u);
  EXPECT_EQ(nlohmann::json::parse(ql[0])["bindings"]["x"], "Q1");

  const Result e = run({"explain", "--in", tmp("closed.snap"), "spouse(Q2, Q1)"});
  ASSERT_EQ(e.code, cli::kOk) << e.err;
  const auto tree = nlohmann::json::parse(lines(e.out).at(0));
  EXPECT_EQ(tree["rule"], "spouse_symmetric");
  EXPECT_EQ(tree["premises"].size(), 1u);

  const Result h = run({"explain", "--human", "--in", tmp("closed.snap"), "spouse(Q2, Q1)"});
  EXPECT_NE(h.out.find("spouse_symmetric"), std::string::npos);

  const Result ok = run({"check", "--in", tmp("closed.snap"), "--constraints",
                         source_path("constraints/spouse_symmetric.mapl")});
  EXPECT_EQ(ok.code, cli::kOk) << ok.err;
  EXPECT_TRUE(ok.out.empty());
  EXPECT_TRUE(ok.err.empty());
}

TEST_F(Cli, ErrorExitCodes) {
  const std::string base = ingest_spouse();
  {
    std::ofstream bad(tmp("bad.marpl"));
    bad << "P1(x, y) -> P2(x, y)\n";
  }
  EXPECT_EQ(run({"close", "--in", base, "--rules", tmp("bad.marpl")}).code, cli::kParseError);
  {
    std::ofstream unsafe(tmp("unsafe.marpl"));
    unsafe << "P1(x, y) -> P2(x, z).\n";
  }
  EXPECT_EQ(run({"close", "--in", base, "--rules", tmp("unsafe.marpl")}).code, cli::kParseError);
  EXPECT_EQ(run({"query", "--in", base, "spouse(Q2,"}).code, cli::kParseError);
  EXPECT_EQ(run({"explain", "--in", base, "spouse(Q7, Q8)"}).code, cli::kEvaluationError);
  {
    std::ofstream junk(tmp("junk.snap"));
    junk << "not a snapshot\n";
  }
  EXPECT_EQ(run({"query", "--in", tmp("junk.snap"), "spouse(?x, ?y)"}).code, cli::kParseError);

  std::vector<Fact> chain;
  for (int i = 1; i <= 8; ++i) chain.push_back(fact(alias("subclass_of"), Q(i), Q(i + 1)));
  const Result lim = run({"close", "--facts", facts_file("chain.jsonl", chain), "--ontology", "--max-facts", "10",
                          "--out", tmp("lim.snap")});
  EXPECT_EQ(lim.code, cli::kLimitExceeded);
  EXPECT_NE(lim.err.find("maxFacts"), std::string::npos);
}

TEST_F(Cli, FemaleHumanQuery) {
  std::vector<Fact> facts;
  std::set<Term, TermLess> female;
  for (int i = 1; i <= 20; ++i) {
    facts.push_back(fact(alias("instance_of"), Q(100 + i), alias("human")));
    const bool f = i % 5 < 2;
    facts.push_back(fact(alias("sex_or_gender"), Q(100 + i), f ? alias("female") : Q(6581097)));
    if (f) female.insert(Q(100 + i));
  }
  const Result c = run({"close", "--facts", facts_file("people.jsonl", facts), "--rules",
                        source_path("rules/female_human.marpl"), "--out", tmp("people.snap")});
  ASSERT_EQ(c.code, cli::kOk) << c.err;
  const Result q = run({"query", "--in", tmp("people.snap"), "instance_of(?x, female_human)"});
  std::set<Term, TermLess> got;
  for (const auto& l : lines(q.out)) got.insert(term_from_json(nlohmann::json::parse(l)["bindings"]["x"]));
  EXPECT_EQ(got, female);
  EXPECT_EQ(female.size(), 8u);
}

TEST_F(Cli, PipelineMatchesStages) {
  const std::string entities = source_path("fixtures/ingest_100.json");
  const std::string rules = source_path("rules/temporal_qualifiers.marpl");
  const std::string constraints = source_path("constraints/single_value.mapl");
  const Result p = run({"pipeline", "--entities", entities, "--rules", rules, "--ontology", "--constraints",
                        constraints, "--builtins", "--no-timing", "--out-dir", tmp("out")});
  ASSERT_TRUE(p.code == cli::kOk || p.code == cli::kViolations) << p.err;

  ASSERT_EQ(run({"ingest", "--entities", entities, "--out", tmp("base.snap"), "--report", tmp("ingest.json")}).code,
            cli::kOk);
  ASSERT_EQ(run({"close", "--in", tmp("base.snap"), "--rules", rules, "--ontology", "--no-timing", "--out",
                 tmp("closed.snap"), "--report", tmp("closure.json")})
                .code,
            cli::kOk);
  const Result c = run({"check", "--in", tmp("closed.snap"), "--constraints", constraints, "--builtins", "--out",
                        tmp("violations.jsonl")});
  EXPECT_EQ(c.code, p.code);

  EXPECT_EQ(read_file(tmp("out/base.snap")), read_file(tmp("base.snap")));
  EXPECT_EQ(read_file(tmp("out/closed.snap")), read_file(tmp("closed.snap")));
  EXPECT_EQ(read_file(tmp("out/ingest_report.json")), read_file(tmp("ingest.json")));
  EXPECT_EQ(read_file(tmp("out/closure_report.json")), read_file(tmp("closure.json")));
  EXPECT_EQ(read_file(tmp("out/violations.jsonl")), read_file(tmp("violations.jsonl")));

  const auto summary = nlohmann::json::parse(p.out);
  EXPECT_EQ(summary["facts_emitted"], 284);
  EXPECT_EQ(summary["violations"], lines(read_file(tmp("violations.jsonl"))).size());
}

TEST_F(Cli, ConfigFile) {
  const std::string base = ingest_spouse();
  {
    std::ofstream cfg(tmp("emars.ini"));
    cfg << "[query]\nin=" << base << "\n";
  }
  const Result q = run({"--config", tmp("emars.ini"), "query", "spouse(?x, ?y)"});
  EXPECT_EQ(q.code, cli::kOk) << q.err;
  EXPECT_EQ(lines(q.out).size(), 1u);
}
