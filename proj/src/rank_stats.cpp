#include "vaxsde/rank_stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <boost/math/distributions/students_t.hpp>

namespace vaxsde {

std::vector<double> average_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return values[i] < values[j]; });
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

namespace {

double pearson(std::span<const double> a, std::span<const double> b) {
  const auto n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

}  // namespace

RankCorrelation spearman(std::span<const double> a, std::span<const double> b,
                         Alternative alternative) {
  if (a.size() != b.size()) throw std::invalid_argument("spearman: size mismatch");
  if (a.size() < 3) throw std::invalid_argument("spearman: need at least 3 pairs");
  const auto ra = average_ranks(a);
  const auto rb = average_ranks(b);
  RankCorrelation out;
  out.rho = pearson(ra, rb);
  const std::size_t n = a.size();

  if (n <= 9) {
    // exact permutation distribution of rho under independence
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<double> permuted(n);
    std::size_t total = 0, extreme = 0;
    const double eps = 1e-12;
    do {
      for (std::size_t i = 0; i < n; ++i) permuted[i] = rb[perm[i]];
      const double r = pearson(ra, permuted);
      ++total;
      switch (alternative) {
        case Alternative::Increasing: extreme += r >= out.rho - eps; break;
        case Alternative::Decreasing: extreme += r <= out.rho + eps; break;
        case Alternative::TwoSided: extreme += std::abs(r) >= std::abs(out.rho) - eps; break;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
    out.p_value = static_cast<double>(extreme) / static_cast<double>(total);
    out.exact = true;
    return out;
  }

  const double df = static_cast<double>(n) - 2.0;
  const boost::math::students_t dist(df);
  double t;
  if (std::abs(out.rho) >= 1.0) {
    t = std::copysign(std::numeric_limits<double>::infinity(), out.rho);
  } else {
    t = out.rho * std::sqrt(df / (1.0 - out.rho * out.rho));
  }
  auto upper = [&](double v) {
    if (std::isinf(v)) return v > 0 ? 0.0 : 1.0;
    return boost::math::cdf(boost::math::complement(dist, v));
  };
  switch (alternative) {
    case Alternative::Increasing: out.p_value = upper(t); break;
    case Alternative::Decreasing: out.p_value = upper(-t); break;
    case Alternative::TwoSided: out.p_value = std::min(1.0, 2.0 * upper(std::abs(t))); break;
  }
  return out;
}

}  // namespace vaxsde
