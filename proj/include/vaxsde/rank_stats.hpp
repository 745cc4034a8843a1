#pragma once

#include <span>
#include <vector>

namespace vaxsde {

/// Ranks starting at 1; ties receive their average rank.
std::vector<double> average_ranks(std::span<const double> values);

enum class Alternative { Increasing, Decreasing, TwoSided };

struct RankCorrelation {
  double rho = 0.0;
  double p_value = 1.0;
  bool exact = false;  // permutation enumeration rather than the t approximation
};

/// Spearman rank correlation with a p-value for the given alternative.
/// Exact by enumeration for n <= 9, Student-t approximation otherwise.
RankCorrelation spearman(std::span<const double> a, std::span<const double> b,
                         Alternative alternative);

}  // namespace vaxsde
