#pragma once

#include <span>
#include <string_view>

namespace causalx {

enum class Decision { Reject, FailToReject };
std::string_view to_string(Decision decision);

struct SignificanceResult {
  double mean_a = 0.0;
  double mean_b = 0.0;
  double t = 0.0;
  double df = 0.0;
  double p = 1.0;
  Decision decision = Decision::FailToReject;
};

double mean(std::span<const double> values);
// Sample standard deviation (n - 1); 0 for fewer than 2 values.
double sample_stddev(std::span<const double> values);

// Two-sided Welch t-test with Welch-Satterthwaite degrees of freedom.
// Needs at least 2 finite values per group. Both variances zero: equal means
// give p = 1, different means give p = 0.
SignificanceResult welch_t_test(std::span<const double> a, std::span<const double> b,
                                double alpha = 0.05);

}  // namespace causalx
