#include "medmap/variants.h"

#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "medmap/errors.h"
#include "test_util.h"

namespace medmap {
namespace {

VariantGenerator Rules(const std::string& language, const std::string& tsv) {
  std::istringstream in(tsv);
  return VariantGenerator::Identity(language).WithRules(
      VariantGenerator::LoadRules(in, "rules"));
}

VariantGenerator ShippedRules(const std::string& language) {
  std::ifstream in(testing::DataDir() + "/rules/" + language + ".tsv");
  EXPECT_TRUE(in.good());
  return VariantGenerator::Identity(language).WithRules(
      VariantGenerator::LoadRules(in, language + ".tsv"));
}

TEST(GenerateVariantsTest, IdentityGeneratorYieldsTheWordOnly) {
  const auto v = GenerateVariants("edemi", VariantGenerator::Identity("it"));
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0], (Variant{"edemi", 0, {}}));
}

TEST(GenerateVariantsTest, EnglishPluralRule) {
  const auto gen = Rules("en", "es\tis\t1\tinflection\n");
  const auto v = GenerateVariants("stenoses", gen);
  ASSERT_EQ(v.size(), 2u);
  EXPECT_EQ(v[0], (Variant{"stenoses", 0, {}}));
  EXPECT_EQ(v[1], (Variant{"stenosis", 1, {Transform::kInflection}}));
}

TEST(GenerateVariantsTest, EmptyWord) {
  const auto v = GenerateVariants("", ShippedRules("it"));
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].text, "");
  EXPECT_EQ(v[0].distance, 0);
}

TEST(GenerateVariantsTest, DeduplicatesKeepingMinimumDistance) {
  std::istringstream lex("edemi\tedema\t2\tsynonym\n");
  const auto gen = Rules("it", "i\ta\t1\tinflection\n")
                       .WithLexicon(VariantGenerator::LoadLexicon(lex, "lex"));
  const auto v = GenerateVariants("edemi", gen);
  ASSERT_EQ(v.size(), 2u);
  EXPECT_EQ(v[1].text, "edema");
  EXPECT_EQ(v[1].distance, 1);
}

TEST(GenerateVariantsTest, SuffixNeedsAStem) {
  const auto v = GenerateVariants("i", Rules("it", "i\ta\t1\tinflection\n"));
  EXPECT_EQ(v.size(), 1u);
}

TEST(GenerateVariantsTest, DeletionRule) {
  const auto v = GenerateVariants("neuropathies", ShippedRules("en"));
  std::set<std::string> texts;
  for (const Variant& x : v) texts.insert(x.text);
  EXPECT_TRUE(texts.count("neuropathy"));
  EXPECT_TRUE(texts.count("neuropathi"));
}

TEST(ExpandPhraseTest, IdentityKeepsEachWord) {
  const auto sets = ExpandPhrase({"stenosi", "vascolari"}, VariantGenerator::Identity("it"));
  ASSERT_EQ(sets.size(), 2u);
  EXPECT_EQ(sets[0], (std::vector<Variant>{{"stenosi", 0, {}}}));
  EXPECT_EQ(sets[1], (std::vector<Variant>{{"vascolari", 0, {}}}));
  const auto x = ExpandPhrase({"x"}, VariantGenerator::Identity("it"));
  EXPECT_EQ(x[0], (std::vector<Variant>{{"x", 0, {}}}));
}

TEST(ExpandPhraseTest, ItalianPluralRulesReachTheSingular) {
  const auto gen = Rules("it", "i\te\t1\tinflection\ni\ta\t1\tinflection\n");
  const auto sets = ExpandPhrase({"edemi"}, gen);
  EXPECT_NE(std::find(sets[0].begin(), sets[0].end(),
                      Variant{"edema", 1, {Transform::kInflection}}),
            sets[0].end());
}

TEST(LoadRulesTest, Errors) {
  std::istringstream bad_cost("i\ta\t0\tinflection\n");
  EXPECT_THROW(VariantGenerator::LoadRules(bad_cost, "r"), RecordError);
  std::istringstream bad_tag("i\ta\t1\tmorphing\n");
  EXPECT_THROW(VariantGenerator::LoadRules(bad_tag, "r"), RecordError);
  std::istringstream fields("i\ta\t1\n");
  EXPECT_THROW(VariantGenerator::LoadRules(fields, "r"), RecordError);
  std::istringstream empty_lex("\tedema\t1\tsynonym\n");
  EXPECT_THROW(VariantGenerator::LoadLexicon(empty_lex, "l"), RecordError);
}

TEST(TransformTest, Costs) {
  EXPECT_EQ(DefaultCost(Transform::kInflection), 1);
  EXPECT_EQ(DefaultCost(Transform::kSpelling), 1);
  EXPECT_EQ(DefaultCost(Transform::kSynonym), 2);
  EXPECT_EQ(DefaultCost(Transform::kAcronym), 2);
  EXPECT_EQ(ParseTransform(TransformName(Transform::kDerivation)), Transform::kDerivation);
}

// Identity first, distance 0 only for the word itself, and adding rules
// never drops a variant.
TEST(GenerateVariantsPropertyTest, IdentityAndMonotonicity) {
  std::mt19937_64 rng(11);
  const std::string letters = "aeiostnrc";
  auto random_word = [&] {
    std::string w;
    for (std::size_t i = 0, n = 1 + rng() % 8; i < n; ++i) w += letters[rng() % letters.size()];
    return w;
  };
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<SuffixRule> rules;
    for (std::size_t r = 0, n = rng() % 5; r < n; ++r) {
      rules.push_back({random_word().substr(0, 1 + rng() % 2), random_word().substr(0, 2),
                       1 + static_cast<int>(rng() % 3), Transform::kInflection});
    }
    const auto small = VariantGenerator::Identity("it").WithRules(rules);
    auto more = rules;
    more.push_back({random_word().substr(0, 1), random_word().substr(0, 1), 1,
                    Transform::kSpelling});
    const auto big = VariantGenerator::Identity("it").WithRules(more);
    const std::string word = random_word();
    const auto a = GenerateVariants(word, small);
    const auto b = GenerateVariants(word, big);
    ASSERT_EQ(a[0], (Variant{word, 0, {}}));
    for (const Variant& v : a) {
      ASSERT_EQ(v.distance == 0, v.text == word);
      ASSERT_EQ(v.distance == 0, v.history.empty());
      const auto it = std::find_if(b.begin(), b.end(),
                                   [&](const Variant& x) { return x.text == v.text; });
      ASSERT_NE(it, b.end());
      ASSERT_LE(it->distance, v.distance);
    }
  }
}

}  // namespace
}  // namespace medmap
