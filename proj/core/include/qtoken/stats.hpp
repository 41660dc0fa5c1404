#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace qtoken::stats {

/// log C(n, k)
double log_choose(int n, int k);

/// log of the binomial pmf P[X = k], X ~ Bin(n, p).
double log_binomial_pmf(int n, int k, double p);

/// Upper tail P[X >= k] for X ~ Bin(n, p), evaluated in log space.
/// Exact summation of pmf terms; stable down to ~1e-300 in the log.
double log_binomial_tail(int n, int k, double p);
double binomial_tail(int n, int k, double p);

/// Lower tail P[X <= k].
double binomial_cdf(int n, int k, double p);

/// Poisson tails (exact term summation).
double poisson_cdf(double mean, int k);
double poisson_tail(double mean, int k);  // P[X >= k]

/// Clopper-Pearson one-sided upper confidence bound for a Bernoulli
/// probability given `successes` out of `trials`, at confidence 1 - alpha.
double clopper_pearson_upper(std::int64_t successes, std::int64_t trials,
                             double alpha);

/// Wilson score interval for a binomial proportion (two-sided, z sigmas).
std::pair<double, double> wilson_interval(std::int64_t successes,
                                          std::int64_t trials, double z);

/// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Chi-square upper critical value (quantile of 1 - alpha) for df degrees
/// of freedom.
double chi_squared_critical(int df, double alpha);

double mean(const std::vector<double>& v);
double variance(const std::vector<double>& v);  // unbiased

}  // namespace qtoken::stats
