#pragma once

// Hypothesis tests and interval estimates used by the analyses.
//
// Welch's t and one-way ANOVA take their tail probabilities from
// Boost.Math's Student t and Fisher F distributions. The two-sample
// Kolmogorov-Smirnov p-value uses the asymptotic Kolmogorov distribution
// evaluated at sqrt(nm/(n+m)) * D; on heavily tied integer data this is
// conservative (p tends to be too large).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <numeric>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "qden/errors.hpp"

namespace qden::stats {

enum class TestName : std::uint8_t { welch_t, anova_oneway, ks_two_sample };

inline constexpr std::string_view to_string(TestName t) {
  switch (t) {
    case TestName::welch_t: return "welch_t";
    case TestName::anova_oneway: return "anova";
    case TestName::ks_two_sample: return "ks";
  }
  return "?";
}

struct StatResult {
  TestName test = TestName::welch_t;
  double statistic = 0.0;
  double df = std::numeric_limits<double>::quiet_NaN();
  /// Denominator degrees of freedom; ANOVA only.
  double df2 = std::numeric_limits<double>::quiet_NaN();
  double p_value = std::numeric_limits<double>::quiet_NaN();
  /// Set when the statistic is undefined (e.g. zero variance everywhere).
  bool degenerate = false;
};

inline double mean(std::span<const double> xs) {
  if (xs.empty()) throw InputError("mean of an empty sample");
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

/// Unbiased sample variance (n - 1 denominator).
inline double variance(std::span<const double> xs) {
  if (xs.size() < 2) throw InputError("variance needs at least two values");
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return ss / static_cast<double>(xs.size() - 1);
}

inline std::vector<double> to_doubles(std::span<const int> xs) { return {xs.begin(), xs.end()}; }

/// Two-sided Welch unequal-variance t test.
inline StatResult welch_t(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) throw InputError("welch_t needs at least two values per sample");
  StatResult r;
  r.test = TestName::welch_t;
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double va = variance(a) / na;
  const double vb = variance(b) / nb;
  const double se2 = va + vb;
  if (se2 <= 0.0) {
    r.degenerate = true;
    r.statistic = std::numeric_limits<double>::quiet_NaN();
    return r;
  }
  r.statistic = (mean(a) - mean(b)) / std::sqrt(se2);
  r.df = se2 * se2 / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
  const boost::math::students_t dist(r.df);
  r.p_value = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(r.statistic))));
  return r;
}

/// One-way ANOVA with equal weighting of observations; df = (k-1, N-k).
inline StatResult anova_oneway(const std::vector<std::vector<double>>& groups) {
  if (groups.size() < 2) throw InputError("anova needs at least two groups");
  StatResult r;
  r.test = TestName::anova_oneway;
  double grand = 0.0;
  std::size_t n_total = 0;
  for (const auto& g : groups) {
    if (g.size() < 2) throw InputError("anova needs at least two values per group");
    grand += std::accumulate(g.begin(), g.end(), 0.0);
    n_total += g.size();
  }
  grand /= static_cast<double>(n_total);
  double ss_between = 0.0;
  double ss_within = 0.0;
  for (const auto& g : groups) {
    const double m = mean(g);
    ss_between += static_cast<double>(g.size()) * (m - grand) * (m - grand);
    for (double x : g) ss_within += (x - m) * (x - m);
  }
  const double k = static_cast<double>(groups.size());
  r.df = k - 1.0;
  r.df2 = static_cast<double>(n_total) - k;
  const double ms_between = ss_between / r.df;
  const double ms_within = ss_within / r.df2;
  if (ms_within <= 0.0) {
    if (ms_between <= 0.0) {
      r.degenerate = true;
      r.statistic = std::numeric_limits<double>::quiet_NaN();
    } else {
      r.statistic = std::numeric_limits<double>::infinity();
      r.p_value = 0.0;
    }
    return r;
  }
  r.statistic = ms_between / ms_within;
  const boost::math::fisher_f dist(r.df, r.df2);
  r.p_value = boost::math::cdf(boost::math::complement(dist, r.statistic));
  return r;
}

/// Survival function of the Kolmogorov distribution, P(K > lambda).
inline double kolmogorov_sf(double lambda) {
  if (lambda <= 0.0) return 1.0;
  constexpr double pi = std::numbers::pi;
  if (lambda < 1.18) {
    // Small-lambda series for the CDF converges fast here.
    const double w = std::sqrt(2.0 * pi) / lambda;
    double cdf = 0.0;
    for (int k = 1; k <= 20; ++k) {
      const double j = 2.0 * k - 1.0;
      cdf += std::exp(-j * j * pi * pi / (8.0 * lambda * lambda));
    }
    return std::clamp(1.0 - w * cdf, 0.0, 1.0);
  }
  double sf = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sf += (k % 2 == 1 ? term : -term);
    if (term < 1e-300) break;
  }
  return std::clamp(2.0 * sf, 0.0, 1.0);
}

/// Two-sample, two-sided Kolmogorov-Smirnov test. ECDFs are compared at
/// every observed value, so ties are handled exactly for D.
inline StatResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw InputError("ks_two_sample needs non-empty samples");
  std::vector<double> sa(a.begin(), a.end());
  std::vector<double> sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  const double na = static_cast<double>(sa.size());
  const double nb = static_cast<double>(sb.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < sa.size() && j < sb.size()) {
    const double x = std::min(sa[i], sb[j]);
    while (i < sa.size() && sa[i] == x) ++i;
    while (j < sb.size() && sb[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  StatResult r;
  r.test = TestName::ks_two_sample;
  r.statistic = d;
  const double en = na * nb / (na + nb);
  r.p_value = kolmogorov_sf(std::sqrt(en) * d);
  return r;
}

/// min(1, p * m) for each p.
inline std::vector<double> bonferroni(std::span<const double> p_values, std::size_t m) {
  if (m < p_values.size()) throw InputError("bonferroni m must cover every test");
  std::vector<double> out;
  out.reserve(p_values.size());
  for (double p : p_values) out.push_back(std::min(1.0, p * static_cast<double>(m)));
  return out;
}

struct Interval {
  double mean = 0.0;
  double low = 0.0;
  double high = 0.0;
};

/// t-based 95% interval: mean +/- t(0.975, n-1) * sd / sqrt(n).
inline Interval mean_ci95(std::span<const double> xs) {
  if (xs.size() < 2) throw InputError("mean_ci95 needs at least two values");
  const double n = static_cast<double>(xs.size());
  const double m = mean(xs);
  const double se = std::sqrt(variance(xs) / n);
  const boost::math::students_t dist(n - 1.0);
  const double half = boost::math::quantile(dist, 0.975) * se;
  return {m, m - half, m + half};
}

struct Proportion {
  double estimate = 0.0;
  double low = 0.0;
  double high = 0.0;
};

/// Wilson score interval for a binomial proportion (z = 1.959964 for 95%).
inline Proportion wilson_interval(long successes, long trials, double z = 1.959963984540054) {
  if (trials <= 0) throw InputError("wilson_interval needs at least one trial");
  if (successes < 0 || successes > trials) throw InputError("successes out of range");
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
  const double half = z / (1.0 + z2 / n) * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  // Pin the closed ends; centre - half rounds to a tiny nonzero at 0 successes.
  const double low = successes == 0 ? 0.0 : std::max(0.0, centre - half);
  const double high = successes == trials ? 1.0 : std::min(1.0, centre + half);
  return {p, low, high};
}

/// Ranks with ties given their average rank (1-based).
inline std::vector<double> average_ranks(std::span<const double> xs) {
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  std::vector<double> ranks(xs.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && xs[order[j + 1]] == xs[order[i]]) ++j;
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

/// Pearson correlation; NaN when either side is constant.
inline double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw InputError("pearson needs paired samples of size >= 2");
  const double mx = mean(x);
  const double my = mean(y);
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0.0 || syy <= 0.0) return std::numeric_limits<double>::quiet_NaN();
  return sxy / std::sqrt(sxx * syy);
}

inline double spearman(std::span<const double> x, std::span<const double> y) {
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  return pearson(rx, ry);
}

struct LineFit {
  double intercept = 0.0;
  double slope = 0.0;
};

/// Ordinary least squares y = intercept + slope * x.
inline LineFit least_squares(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw InputError("least_squares needs paired samples of size >= 2");
  const double mx = mean(x);
  const double my = mean(y);
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx <= 0.0) throw InputError("least_squares needs non-constant x");
  const double slope = sxy / sxx;
  return {my - slope * mx, slope};
}

}  // namespace qden::stats
