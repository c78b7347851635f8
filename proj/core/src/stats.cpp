// SPDX-License-Identifier: Apache-2.0

#include "bigfive/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/distributions/students_t.hpp>

namespace bigfive {

double students_t_two_tailed(double t, double dof) {
  if (!std::isfinite(t)) return 0.0;
  const boost::math::students_t dist(dof);
  return std::clamp(2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t))), 0.0, 1.0);
}

CorrelationResult pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw StatisticsError("pearson: inputs differ in length");
  const std::size_t n = x.size();
  if (n < 3) throw StatisticsError("pearson: need at least 3 pairs");

  // Single-pass co-moment update (Welford); stable for large offsets.
  double mean_x = 0.0, mean_y = 0.0, m2x = 0.0, m2y = 0.0, cxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) {
      throw StatisticsError("pearson: non-finite input at index " + std::to_string(i));
    }
    const double k = static_cast<double>(i + 1);
    const double dx = x[i] - mean_x;
    mean_x += dx / k;
    const double dy = y[i] - mean_y;
    mean_y += dy / k;
    m2x += dx * (x[i] - mean_x);
    m2y += dy * (y[i] - mean_y);
    cxy += dx * (y[i] - mean_y);
  }
  if (!(m2x > 0.0) || !(m2y > 0.0)) {
    throw StatisticsError("pearson: undefined for zero-variance input");
  }

  CorrelationResult out;
  out.n = n;
  out.r = std::clamp(cxy / std::sqrt(m2x * m2y), -1.0, 1.0);
  const double dof = static_cast<double>(n - 2);
  const double one_minus_r2 = 1.0 - out.r * out.r;
  if (one_minus_r2 <= 0.0) {
    out.p_value = 0.0;
  } else {
    out.p_value = students_t_two_tailed(out.r * std::sqrt(dof / one_minus_r2), dof);
  }
  return out;
}

std::string significance_stars(double p_value) {
  if (p_value < 0.001) return "***";
  if (p_value < 0.01) return "**";
  return "";
}

}  // namespace bigfive
