#include "medmap/cli.h"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"
#include "medmap/unicode.h"
#include "test_util.h"

namespace medmap::cli {
namespace {

namespace fs = std::filesystem;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    std::random_device rd;
    dir_ = fs::temp_directory_path() / ("medmap_cli_" + std::to_string(rd()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string Path(const std::string& name) const { return (dir_ / name).string(); }
  std::string Write(const std::string& name, const std::string& content) const {
    std::ofstream(Path(name), std::ios::binary) << content;
    return Path(name);
  }
  static std::string Fixture(const std::string& rel) {
    return medmap::testing::DataDir() + "/fixtures/" + rel;
  }

  int Run(std::vector<std::string> args) {
    out_.str("");
    err_.str("");
    return RunCli(args, out_, err_);
  }

  int BuildExp2Ks() {
    return Run({"build-ks", "--records", Fixture("exp2/records.psv"), "--out", Path("ks.txt")});
  }

  fs::path dir_;
  std::ostringstream out_;
  std::ostringstream err_;
};

TEST_F(CliTest, BuildKsManifestMatchesFilterCount) {
  ASSERT_EQ(BuildExp2Ks(), kOk) << err_.str();
  const auto manifest = nlohmann::json::parse(out_.str());
  // Independent count: Italian records in the Disorders group, deduplicated
  // on (cui, term).
  const auto records = medmap::testing::Records(ReadFile(Fixture("exp2/records.psv")));
  const auto& disorders = SemanticGroupDef::Disorders();
  std::set<std::pair<std::string, std::string>> kept;
  for (const ConceptRecord& r : records) {
    if (r.language == "it" && disorders.Contains(r.semantic_type)) {
      kept.insert({r.cui, NormalizeTerm(r.term)});
    }
  }
  EXPECT_EQ(manifest["retained"].get<std::size_t>(), kept.size());
  EXPECT_EQ(manifest["input_records"].get<std::size_t>(), records.size());
  EXPECT_TRUE(fs::exists(Path("ks.txt")));
}

TEST_F(CliTest, BuildKsEmptyRecordsWarns) {
  const auto records = Write("empty.psv", "");
  EXPECT_EQ(Run({"build-ks", "--records", records, "--out", Path("ks.txt")}), kOk);
  EXPECT_NE(err_.str().find("warning"), std::string::npos);
  EXPECT_TRUE(fs::exists(Path("ks.txt")));
}

TEST_F(CliTest, BuildKsBadCuiNamesTheLine) {
  const auto records = Write("bad.psv",
                             "C0013604|it|edema|Y|Finding|X\nC13|it|tosse|Y|Finding|X\n");
  EXPECT_EQ(Run({"build-ks", "--records", records, "--out", Path("ks.txt")}),
            kContractViolation);
  EXPECT_NE(err_.str().find(":2"), std::string::npos) << err_.str();
  EXPECT_FALSE(fs::exists(Path("ks.txt")));
}

TEST_F(CliTest, MissingInputIsIoFailure) {
  EXPECT_EQ(Run({"build-ks", "--records", Path("nope.psv"), "--out", Path("ks.txt")}),
            kIoFailure);
  EXPECT_NE(err_.str().find("--records"), std::string::npos);
}

TEST_F(CliTest, UnknownFlagIsContractViolation) {
  EXPECT_EQ(Run({"annotate", "--bogus"}), kContractViolation);
  EXPECT_EQ(Run({}), kContractViolation);
}

TEST_F(CliTest, HelpListsFlags) {
  EXPECT_EQ(Run({"annotate", "--help"}), kOk);
  for (const char* flag : {"--ignore-word-order", "--filter-mode", "--ks", "--corpus",
                           "--normalization", "--out", "--config"}) {
    EXPECT_NE(out_.str().find(flag), std::string::npos) << flag;
  }
  EXPECT_EQ(Run({"--help"}), kOk);
  EXPECT_NE(out_.str().find("repro-exp3"), std::string::npos);
}

TEST_F(CliTest, AnnotateEmptyCorpus) {
  ASSERT_EQ(BuildExp2Ks(), kOk);
  const auto corpus = Write("empty.jsonl", "");
  EXPECT_EQ(Run({"annotate", "--ks", Path("ks.txt"), "--corpus", corpus, "--out",
                 Path("a.jsonl")}),
            kOk)
      << err_.str();
  EXPECT_EQ(ReadFile(Path("a.jsonl")), "");
}

TEST_F(CliTest, AnnotateLanguageMismatch) {
  ASSERT_EQ(BuildExp2Ks(), kOk);
  const auto corpus = Write(
      "en.jsonl",
      "{\"doc_id\":\"x\",\"domain\":\"other\",\"language\":\"en\",\"sentences\":[\"edema\"]}\n");
  EXPECT_EQ(Run({"annotate", "--ks", Path("ks.txt"), "--corpus", corpus, "--out",
                 Path("a.jsonl")}),
            kContractViolation);
  EXPECT_FALSE(fs::exists(Path("a.jsonl")));
  EXPECT_FALSE(fs::exists(Path("a.jsonl.tmp")));
}

std::set<std::string> Keys(const std::string& jsonl) {
  std::set<std::string> out;
  std::istringstream in(jsonl);
  for (const Annotation& a : ReadAnnotations(in)) {
    out.insert(a.doc_id + ":" + std::to_string(a.sentence) + ":" +
               std::to_string(a.span.begin) + "-" + std::to_string(a.span.end) + ":" + a.cui);
  }
  return out;
}

TEST_F(CliTest, IgnoreWordOrderOnlyAddsAnnotations) {
  ASSERT_EQ(BuildExp2Ks(), kOk);
  const std::vector<std::string> base = {
      "annotate", "--ks", Path("ks.txt"), "--corpus", Fixture("exp2/corpus.jsonl"),
      "--normalization", Fixture("exp2/normalization.tsv"), "--filter-mode", "relaxed"};
  auto off = base;
  off.insert(off.end(), {"--out", Path("off.jsonl")});
  auto on = base;
  on.insert(on.end(), {"--ignore-word-order", "--out", Path("on.jsonl")});
  ASSERT_EQ(Run(off), kOk) << err_.str();
  ASSERT_EQ(Run(on), kOk) << err_.str();
  const auto a = Keys(ReadFile(Path("off.jsonl")));
  const auto b = Keys(ReadFile(Path("on.jsonl")));
  EXPECT_FALSE(a.empty());
  for (const auto& k : a) EXPECT_TRUE(b.count(k)) << k;
}

TEST_F(CliTest, ConfigFileAndFlagPrecedence) {
  ASSERT_EQ(BuildExp2Ks(), kOk);
  const auto config = Write("run.ini", "ks=" + Path("ks.txt") + "\ncorpus=" +
                                           Fixture("exp2/corpus.jsonl") +
                                           "\nfilter-mode=relaxed\nout=" + Path("cfg.jsonl") +
                                           "\n");
  ASSERT_EQ(Run({"annotate", "--config", config}), kOk) << err_.str();
  ASSERT_EQ(Run({"annotate", "--config", config, "--filter-mode", "strict", "--out",
                 Path("strict.jsonl")}),
            kOk)
      << err_.str();
  const auto relaxed = Keys(ReadFile(Path("cfg.jsonl")));
  const auto strict = Keys(ReadFile(Path("strict.jsonl")));
  EXPECT_GT(relaxed.size(), strict.size());
  EXPECT_EQ(Run({"annotate", "--config", config, "--filter-mode", "loose"}),
            kContractViolation);
}

TEST_F(CliTest, EvaluateMisalignedGold) {
  ASSERT_EQ(BuildExp2Ks(), kOk);
  ASSERT_EQ(Run({"annotate", "--ks", Path("ks.txt"), "--corpus", Fixture("exp2/corpus.jsonl"),
                 "--out", Path("a.jsonl")}),
            kOk);
  const auto gold = Write("gold.tsv", "card-01\t0\t0\t5\tedemi\tC0013604\tcardiology\tY\n");
  EXPECT_EQ(Run({"evaluate", "--annotations", Path("a.jsonl"), "--gold", gold, "--corpus",
                 Fixture("exp2/corpus.jsonl"), "--ks", Path("ks.txt"), "--out",
                 Path("r.json")}),
            kContractViolation);
  EXPECT_NE(err_.str().find("gold row"), std::string::npos) << err_.str();
  EXPECT_FALSE(fs::exists(Path("r.json")));
}

TEST_F(CliTest, EvaluateZeroAnnotations) {
  ASSERT_EQ(BuildExp2Ks(), kOk);
  const auto empty = Write("a.jsonl", "");
  const auto gold = Write("gold.tsv", "card-01\t0\t13\t18\tedemi\tC0013604\tcardiology\tY\n");
  ASSERT_EQ(Run({"evaluate", "--annotations", empty, "--gold", gold, "--corpus",
                 Fixture("exp2/corpus.jsonl"), "--ks", Path("ks.txt"), "--out",
                 Path("r.json")}),
            kOk)
      << err_.str();
  const auto report = nlohmann::json::parse(ReadFile(Path("r.json")));
  EXPECT_EQ(report["metrics"]["overall"]["recall"].get<double>(), 0.0);
  EXPECT_TRUE(report["metrics"]["overall"]["precision"].is_null());
  EXPECT_NE(out_.str().find("n/a"), std::string::npos);
}

TEST_F(CliTest, TranslateGlossaryAndEmptyGlossary) {
  const std::vector<std::string> base = {"translate", "--corpus",
                                         Fixture("exp3/corpus_it.jsonl"), "--seed", "7"};
  auto with = base;
  with.insert(with.end(), {"--glossary", Fixture("exp3/glossary_it_en.tsv"), "--out",
                           Path("en.jsonl")});
  ASSERT_EQ(Run(with), kOk) << err_.str();
  const std::string en = ReadFile(Path("en.jsonl"));
  EXPECT_NE(en.find("stagnation"), std::string::npos);
  EXPECT_NE(en.find("peripheral edema"), std::string::npos);
  ASSERT_EQ(Run(with), kOk);
  EXPECT_EQ(ReadFile(Path("en.jsonl")), en);

  const auto empty = Write("empty.tsv", "");
  auto pass = base;
  pass.insert(pass.end(), {"--glossary", empty, "--out", Path("same.jsonl")});
  ASSERT_EQ(Run(pass), kOk);
  EXPECT_NE(err_.str().find("warning"), std::string::npos);
  std::istringstream a(ReadFile(Fixture("exp3/corpus_it.jsonl")));
  std::istringstream b(ReadFile(Path("same.jsonl")));
  const auto src = ReadCorpus(a);
  const auto out = ReadCorpus(b);
  ASSERT_EQ(src.size(), out.size());
  for (std::size_t i = 0; i < src.size(); ++i) {
    EXPECT_EQ(out[i].sentences, src[i].sentences);
    EXPECT_EQ(out[i].language, "en");
  }
}

TEST_F(CliTest, TranslateNeedsExactlyOneBackend) {
  EXPECT_EQ(Run({"translate", "--corpus", Fixture("exp3/corpus_it.jsonl"), "--out",
                 Path("x.jsonl")}),
            kContractViolation);
  EXPECT_EQ(Run({"translate", "--corpus", Fixture("exp3/corpus_it.jsonl"), "--glossary",
                 Fixture("exp3/glossary_it_en.tsv"), "--endpoint", "http://127.0.0.1:1/t",
                 "--out", Path("x.jsonl")}),
            kContractViolation);
}

TEST_F(CliTest, TranslateDeadEndpointIsIoFailure) {
  EXPECT_EQ(Run({"translate", "--corpus", Fixture("exp3/corpus_it.jsonl"), "--endpoint",
                 "http://127.0.0.1:1/t", "--retries", "0", "--timeout-ms", "200", "--out",
                 Path("x.jsonl")}),
            kIoFailure);
  EXPECT_NE(err_.str().find("sentence"), std::string::npos) << err_.str();
  EXPECT_FALSE(fs::exists(Path("x.jsonl")));
}

TEST_F(CliTest, ReproMatchesCheckedInOutputs) {
  EXPECT_EQ(Run({"repro-exp2", "--out", Path("exp2")}), kOk) << err_.str();
  EXPECT_EQ(Run({"repro-exp3", "--out", Path("exp3")}), kOk) << err_.str();
}

TEST(WriteFileAtomicTest, ReplacesWholeFile) {
  const auto path = (fs::temp_directory_path() / "medmap_atomic_test.txt").string();
  WriteFileAtomic(path, "first");
  WriteFileAtomic(path, "2");
  EXPECT_EQ(ReadFile(path), "2");
  EXPECT_FALSE(fs::exists(path + ".tmp"));
  fs::remove(path);
  EXPECT_THROW(WriteFileAtomic("/nonexistent-dir/x", "a"), IoError);
  EXPECT_THROW(ReadFile("/nonexistent-dir/x"), IoError);
}

}  // namespace
}  // namespace medmap::cli
