#include <gtest/gtest.h>

#include <set>

#include "oracles.hpp"

using namespace causalx;
using causalx::testing::gradient_check;
using causalx::testing::random_grad_case;

class GradientSuite : public ::testing::TestWithParam<int> {};

TEST_P(GradientSuite, EveryBlockMatchesCentralDifferences) {
  const auto c = random_grad_case(static_cast<std::uint64_t>(GetParam()));
  for (const auto& block : gradient_check(c.params, c.inputs, c.gold)) {
    EXPECT_LT(block.relative_error, 1e-4) << c.description << " " << block.name;
  }
}

INSTANTIATE_TEST_SUITE_P(RandomConfigs, GradientSuite, ::testing::Range(0, 50));

TEST(GradientSuiteCoverage, AllFourCombinationsAppear) {
  std::set<std::string> kinds;
  for (int s = 0; s < 50; ++s) {
    const auto c = random_grad_case(static_cast<std::uint64_t>(s));
    kinds.insert(std::string(to_string(c.params.rnn_kind())) + "/" +
                 std::string(to_string(c.params.decoder())));
  }
  EXPECT_EQ(kinds.size(), 4u);
}
