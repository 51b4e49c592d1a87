#include "causalx/stats.hpp"

#include <cmath>
#include <string>

#include <boost/math/distributions/students_t.hpp>

#include "causalx/error.hpp"

namespace causalx {

std::string_view to_string(Decision decision) {
  return decision == Decision::Reject ? "REJECT" : "FTR";
}

double mean(std::span<const double> values) {
  if (values.empty()) return 0.0;
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

double sample_stddev(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  const double m = mean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

SignificanceResult welch_t_test(std::span<const double> a, std::span<const double> b,
                                double alpha) {
  if (a.size() < 2 || b.size() < 2) {
    throw ValidationError("welch_t_test needs at least 2 values per group (got " +
                          std::to_string(a.size()) + " and " + std::to_string(b.size()) + ")");
  }
  for (auto group : {a, b}) {
    for (double v : group) {
      if (!std::isfinite(v)) throw ValidationError("welch_t_test: non-finite sample");
    }
  }
  if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("alpha must lie in (0, 1)");

  SignificanceResult r;
  r.mean_a = mean(a);
  r.mean_b = mean(b);
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double sa = sample_stddev(a);
  const double sb = sample_stddev(b);
  const double va = sa * sa / na;
  const double vb = sb * sb / nb;
  const double se2 = va + vb;

  if (se2 == 0.0) {
    r.df = na + nb - 2.0;
    if (r.mean_a == r.mean_b) {
      r.t = 0.0;
      r.p = 1.0;
    } else {
      r.t = r.mean_a > r.mean_b ? INFINITY : -INFINITY;
      r.p = 0.0;
    }
  } else {
    r.t = (r.mean_a - r.mean_b) / std::sqrt(se2);
    r.df = se2 * se2 / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
    const boost::math::students_t dist(r.df);
    r.p = 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(r.t)));
    if (r.p > 1.0) r.p = 1.0;
  }
  r.decision = r.p < alpha ? Decision::Reject : Decision::FailToReject;
  return r;
}

}  // namespace causalx
