// stats.hpp: summaries and simple tests for Monte Carlo samples.
#pragma once

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <vector>

#include "idla/types.hpp"

namespace idla::stats {

struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
  double stddev = 0.0;
  std::vector<std::pair<double, double>> quantiles;  // (level, value)
  double min = 0.0;
  double max = 0.0;
  std::size_t trials = 0;
  std::uint64_t master_seed = 0;
  std::vector<double> values;  // retained on request

  std::optional<double> quantile(double level) const {
    for (const auto& [p, q] : quantiles)
      if (std::abs(p - level) < 1e-12) return q;
    return std::nullopt;
  }
};

/// Type-7 (linear interpolation) sample quantile of sorted data.
inline double quantile_sorted(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) throw DomainError("quantile of an empty sample");
  if (p <= 0.0) return sorted.front();
  if (p >= 1.0) return sorted.back();
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

inline Estimate summarize(std::vector<double> values, const std::vector<double>& levels = {0.5, 0.9, 0.99},
                          std::uint64_t seed = 0, bool keep_values = false) {
  if (values.empty()) throw DomainError("cannot summarize an empty sample");
  Estimate e;
  e.trials = values.size();
  e.master_seed = seed;
  const double n = static_cast<double>(values.size());
  e.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - e.mean) * (v - e.mean);
  e.stddev = values.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  e.std_error = e.stddev / std::sqrt(n);
  if (keep_values) e.values = values;
  std::sort(values.begin(), values.end());
  e.min = values.front();
  e.max = values.back();
  for (double p : levels) e.quantiles.emplace_back(p, quantile_sorted(values, p));
  return e;
}

struct TestResult {
  double statistic = 0.0;
  std::size_t df = 0;
  double p_value = 1.0;
};

inline double chi_square_sf(double x, std::size_t df) {
  if (df == 0) return 1.0;
  if (x <= 0.0) return 1.0;
  return boost::math::gamma_q(static_cast<double>(df) / 2.0, x / 2.0);
}

/// Two-sample chi-square homogeneity test on integer-valued samples. Adjacent
/// values are pooled left to right until every expected count is at least 5.
inline TestResult chi_square_homogeneity(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.empty() || b.empty()) throw DomainError("homogeneity test needs two nonempty samples");
  std::map<double, std::pair<double, double>> counts;
  for (double x : a) counts[x].first += 1.0;
  for (double x : b) counts[x].second += 1.0;
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  const double total = na + nb;
  const double smaller = std::min(na, nb);

  std::vector<std::pair<double, double>> bins;
  std::pair<double, double> acc{0.0, 0.0};
  for (const auto& [value, c] : counts) {
    acc.first += c.first;
    acc.second += c.second;
    if ((acc.first + acc.second) * smaller / total >= 5.0) {
      bins.push_back(acc);
      acc = {0.0, 0.0};
    }
  }
  if (acc.first + acc.second > 0.0) {
    if (bins.empty()) {
      bins.push_back(acc);
    } else {
      bins.back().first += acc.first;
      bins.back().second += acc.second;
    }
  }

  TestResult r;
  if (bins.size() < 2) return r;
  for (const auto& [ca, cb] : bins) {
    const double col = ca + cb;
    const double ea = col * na / total, eb = col * nb / total;
    r.statistic += (ca - ea) * (ca - ea) / ea + (cb - eb) * (cb - eb) / eb;
  }
  r.df = bins.size() - 1;
  r.p_value = chi_square_sf(r.statistic, r.df);
  return r;
}

/// Goodness of fit of observed category counts to probabilities `probs` (the
/// last category absorbs the remaining mass). Categories are pooled from the
/// right until every expected count is at least 5.
inline TestResult chi_square_gof(const std::vector<double>& observed, const std::vector<double>& probs) {
  if (observed.size() != probs.size() || observed.empty()) throw DomainError("gof needs matching nonempty inputs");
  const double n = std::accumulate(observed.begin(), observed.end(), 0.0);
  std::vector<std::pair<double, double>> bins;  // (observed, expected)
  std::pair<double, double> acc{0.0, 0.0};
  for (std::size_t k = observed.size(); k-- > 0;) {
    acc.first += observed[k];
    acc.second += probs[k] * n;
    if (acc.second >= 5.0) {
      bins.push_back(acc);
      acc = {0.0, 0.0};
    }
  }
  if (acc.second > 0.0 || acc.first > 0.0) {
    if (bins.empty()) {
      bins.push_back(acc);
    } else {
      bins.back().first += acc.first;
      bins.back().second += acc.second;
    }
  }
  TestResult r;
  if (bins.size() < 2) return r;
  for (const auto& [o, e] : bins) r.statistic += (o - e) * (o - e) / e;
  r.df = bins.size() - 1;
  r.p_value = chi_square_sf(r.statistic, r.df);
  return r;
}

/// Dvoretzky-Kiefer-Wolfowitz band half-width for an empirical CDF of n
/// samples at confidence 1 - alpha.
inline double dkw_epsilon(std::size_t n, double alpha) {
  return std::sqrt(std::log(2.0 / alpha) / (2.0 * static_cast<double>(n)));
}

struct Ratio {
  double value = 0.0;
  double std_error = 0.0;
};

/// mean(a) / mean(b) for independent samples, delta-method standard error.
inline Ratio ratio_of_means(const Estimate& a, const Estimate& b) {
  if (b.mean == 0.0) throw DomainError("ratio with zero denominator mean");
  Ratio r;
  r.value = a.mean / b.mean;
  const double ra = a.mean == 0.0 ? 0.0 : a.std_error / a.mean;
  const double rb = b.std_error / b.mean;
  r.std_error = std::abs(r.value) * std::sqrt(ra * ra + rb * rb);
  return r;
}

/// Standard deviation of the fraction of successes in n Bernoulli(p) trials.
inline double binomial_sigma(double p, std::size_t n) {
  return std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

}  // namespace idla::stats
