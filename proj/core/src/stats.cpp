#include "qtoken/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/chi_squared.hpp>

namespace qtoken::stats {

double log_choose(int n, int k) {
  if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

double log_binomial_pmf(int n, int k, double p) {
  if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
  if (p <= 0.0) return k == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
  if (p >= 1.0) return k == n ? 0.0 : -std::numeric_limits<double>::infinity();
  return log_choose(n, k) + k * std::log(p) + (n - k) * std::log1p(-p);
}

double log_binomial_tail(int n, int k, double p) {
  if (k <= 0) return 0.0;
  if (k > n) return -std::numeric_limits<double>::infinity();
  if (p <= 0.0) return -std::numeric_limits<double>::infinity();
  if (p >= 1.0) return 0.0;
  // log-sum-exp over j = k..n anchored at the largest term.
  double max_term = -std::numeric_limits<double>::infinity();
  for (int j = k; j <= n; ++j)
    max_term = std::max(max_term, log_binomial_pmf(n, j, p));
  double acc = 0.0;
  for (int j = k; j <= n; ++j)
    acc += std::exp(log_binomial_pmf(n, j, p) - max_term);
  return max_term + std::log(acc);
}

double binomial_tail(int n, int k, double p) {
  return std::exp(log_binomial_tail(n, k, p));
}

double binomial_cdf(int n, int k, double p) {
  if (k >= n) return 1.0;
  if (k < 0) return 0.0;
  return 1.0 - binomial_tail(n, k + 1, p);
}

double poisson_cdf(double mean, int k) {
  if (k < 0) return 0.0;
  double term = std::exp(-mean);
  double acc = term;
  for (int j = 1; j <= k; ++j) {
    term *= mean / j;
    acc += term;
  }
  return std::min(acc, 1.0);
}

double poisson_tail(double mean, int k) {
  if (k <= 0) return 1.0;
  return 1.0 - poisson_cdf(mean, k - 1);
}

double clopper_pearson_upper(std::int64_t successes, std::int64_t trials,
                             double alpha) {
  if (trials <= 0) throw std::invalid_argument("clopper_pearson: trials <= 0");
  if (successes < 0 || successes > trials)
    throw std::invalid_argument("clopper_pearson: successes out of range");
  if (successes == trials) return 1.0;
  boost::math::beta_distribution<double> beta(
      static_cast<double>(successes + 1),
      static_cast<double>(trials - successes));
  return boost::math::quantile(beta, 1.0 - alpha);
}

std::pair<double, double> wilson_interval(std::int64_t successes,
                                          std::int64_t trials, double z) {
  if (trials <= 0) return {0.0, 1.0};
  const double n = static_cast<double>(trials);
  const double phat = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (phat + z2 / (2.0 * n)) / denom;
  const double half =
      z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("fit_slope: need matching vectors, size >= 2");
  const double mx = mean(x);
  const double my = mean(y);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  return sxy / sxx;
}

double chi_squared_critical(int df, double alpha) {
  boost::math::chi_squared_distribution<double> dist(df);
  return boost::math::quantile(dist, 1.0 - alpha);
}

double mean(const std::vector<double>& v) {
  double acc = 0.0;
  for (double x : v) acc += x;
  return acc / static_cast<double>(v.size());
}

double variance(const std::vector<double>& v) {
  const double m = mean(v);
  double acc = 0.0;
  for (double x : v) acc += (x - m) * (x - m);
  return acc / static_cast<double>(v.size() - 1);
}

}  // namespace qtoken::stats
