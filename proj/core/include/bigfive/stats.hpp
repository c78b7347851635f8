// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <string>

#include "bigfive/error.hpp"

namespace bigfive {

/// Raised when a statistic is undefined for the given data.
class StatisticsError : public Error {
 public:
  using Error::Error;
};

struct CorrelationResult {
  double r = 0.0;        // in [-1, 1]
  double p_value = 1.0;  // two-tailed
  std::size_t n = 0;
};

/// Sample Pearson correlation with a two-tailed p-value from Student's t on
/// n-2 degrees of freedom. Needs equal lengths, n >= 3, and nonzero variance
/// in both inputs; otherwise throws StatisticsError.
CorrelationResult pearson(std::span<const double> x, std::span<const double> y);

/// P(|T| >= |t|) for Student's t with `dof` degrees of freedom.
double students_t_two_tailed(double t, double dof);

/// "***" for p < .001, "**" for p < .01, empty otherwise.
std::string significance_stars(double p_value);

}  // namespace bigfive
