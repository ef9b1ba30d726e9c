#include "aoi/orderstats.hpp"

#include <cmath>
#include <string>

namespace aoi {

namespace {

void check_order(std::int64_t k, std::int64_t n) {
  if (n < 1 || k < 1 || k > n) {
    throw InvalidArgument("order statistic index out of range: k=" + std::to_string(k) +
                          ", n=" + std::to_string(n));
  }
}

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw InvalidArgument("alpha must lie in (0, 1), got " + std::to_string(alpha));
  }
}

}  // namespace

ShiftedExp::ShiftedExp(double rate, double shift) : rate_(rate), shift_(shift) {
  if (!(rate > 0.0) || !std::isfinite(rate)) {
    throw InvalidArgument("delay rate must be positive and finite");
  }
  if (!(shift >= 0.0) || !std::isfinite(shift)) {
    throw InvalidArgument("delay shift must be nonnegative and finite");
  }
}

double harmonic(std::int64_t n) {
  double s = 0.0;
  for (std::int64_t j = 1; j <= n; ++j) s += 1.0 / static_cast<double>(j);
  return s;
}

double gen_harmonic(std::int64_t n) {
  double s = 0.0;
  for (std::int64_t j = 1; j <= n; ++j) {
    const double x = static_cast<double>(j);
    s += 1.0 / (x * x);
  }
  return s;
}

HarmonicCache::HarmonicCache(std::int64_t max_n) : max_n_(max_n) {
  if (max_n < 1) throw InvalidArgument("HarmonicCache needs max_n >= 1");
  const auto size = static_cast<std::size_t>(max_n) + 1;
  h_.resize(size);
  g_.resize(size);
  h_prefix_.resize(size);
  h_[0] = g_[0] = h_prefix_[0] = 0.0;
  for (std::size_t j = 1; j < size; ++j) {
    const double x = static_cast<double>(j);
    h_[j] = h_[j - 1] + 1.0 / x;
    g_[j] = g_[j - 1] + 1.0 / (x * x);
    h_prefix_[j] = h_prefix_[j - 1] + h_[j];
  }
}

std::size_t HarmonicCache::check(std::int64_t j) const {
  if (j < 0 || j > max_n_) {
    throw InvalidArgument("harmonic index " + std::to_string(j) + " outside cache of size " +
                          std::to_string(max_n_));
  }
  return static_cast<std::size_t>(j);
}

double os_mean(const HarmonicCache& hc, const ShiftedExp& d, std::int64_t k, std::int64_t n) {
  check_order(k, n);
  return d.shift() + (hc.h(n) - hc.h(n - k)) / d.rate();
}

double os_var(const HarmonicCache& hc, const ShiftedExp& d, std::int64_t k, std::int64_t n) {
  check_order(k, n);
  return (hc.g(n) - hc.g(n - k)) / (d.rate() * d.rate());
}

double os_second_moment(const HarmonicCache& hc, const ShiftedExp& d, std::int64_t k,
                        std::int64_t n) {
  check_order(k, n);
  const double c = d.shift();
  const double lam = d.rate();
  const double dh = hc.h(n) - hc.h(n - k);
  const double dg = hc.g(n) - hc.g(n - k);
  return c * c + (2.0 * c / lam) * dh + (dh * dh + dg) / (lam * lam);
}

double mean_first_k(const HarmonicCache& hc, const ShiftedExp& d, std::int64_t k,
                    std::int64_t n) {
  check_order(k, n);
  // sum_{i=1}^{k} H_{n-i} = sum_{j=n-k}^{n-1} H_j
  const double tail = hc.h_prefix(n - 1) - hc.h_prefix(n - k - 1);
  const double lam = d.rate();
  return d.shift() + hc.h(n) / lam - tail / (static_cast<double>(k) * lam);
}

double mean_first_k_approx(const ShiftedExp& d, double alpha) {
  check_alpha(alpha);
  const double lam = d.rate();
  return d.shift() + 1.0 / lam + (1.0 - alpha) / (alpha * lam) * std::log1p(-alpha);
}

double delta_threshold(const ShiftedExp& d, double alpha) {
  check_alpha(alpha);
  return d.shift() - std::log1p(-alpha) / d.rate();
}

void sample_delays(const ShiftedExp& d, std::mt19937_64& rng, std::span<double> out) {
  for (double& x : out) x = d.shift() + sample_exponential(rng, d.rate());
}

std::vector<double> sample_delays(const ShiftedExp& d, std::int64_t n, std::mt19937_64& rng) {
  if (n < 1) throw InvalidArgument("sample_delays needs n >= 1");
  std::vector<double> out(static_cast<std::size_t>(n));
  sample_delays(d, rng, out);
  return out;
}

void sample_order_prefix(const ShiftedExp& d, std::int64_t n, std::mt19937_64& rng,
                         std::span<double> out) {
  if (out.empty() || static_cast<std::int64_t>(out.size()) > n) {
    throw InvalidArgument("sample_order_prefix needs 1 <= k <= n");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double remaining = static_cast<double>(n - static_cast<std::int64_t>(i));
    acc += sample_exponential(rng, d.rate() * remaining);
    out[i] = d.shift() + acc;
  }
}

}  // namespace aoi
