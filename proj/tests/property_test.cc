#include <gtest/gtest.h>

#include "acceptance_checks.h"

namespace medmap::acceptance {
namespace {

constexpr int kCases = 1000;

#define EXPECT_CHECK(expr)            \
  do {                                \
    const CheckResult r = (expr);     \
    EXPECT_TRUE(r.pass) << r.detail;  \
  } while (0)

TEST(PropertyTest, WordOrderSuperset) { EXPECT_CHECK(WordOrderSuperset(kCases, 101)); }
TEST(PropertyTest, RelaxedContainsStrict) { EXPECT_CHECK(RelaxedContainsStrict(kCases, 202)); }
TEST(PropertyTest, IdentityMatchesBruteForce) {
  EXPECT_CHECK(IdentityMatchesBruteForce(kCases, 303));
}
TEST(PropertyTest, MappingEnumerationMatchesBruteForce) {
  EXPECT_CHECK(MappingEnumerationMatchesBruteForce(kCases, 404));
}
TEST(PropertyTest, VerdictPartition) { EXPECT_CHECK(VerdictPartition(kCases, 505)); }
TEST(PropertyTest, NormalizeIdempotent) { EXPECT_CHECK(NormalizeIdempotent(kCases, 606)); }

TEST(FixtureTest, ItalianVerdicts) { EXPECT_CHECK(ItalianFixtureVerdicts(MEDMAP_DATA_DIR)); }
TEST(FixtureTest, TranslatedVerdicts) {
  EXPECT_CHECK(TranslatedFixtureVerdicts(MEDMAP_DATA_DIR));
}
TEST(FixtureTest, FailureReasons) { EXPECT_CHECK(FailureReasonLabels(MEDMAP_DATA_DIR)); }
TEST(FixtureTest, CoverageArithmetic) { EXPECT_CHECK(CoverageArithmetic()); }
TEST(FixtureTest, FMeasure) { EXPECT_CHECK(FMeasureReproduction()); }

}  // namespace
}  // namespace medmap::acceptance
