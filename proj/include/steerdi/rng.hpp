#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace steerdi {

/// splitmix64: tiny, seedable, and plenty for sampling counts. Stream
/// derivation mixes (root seed, stream tag) so per-setting substreams are
/// reproducible independently of evaluation order.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  static Rng stream(std::uint64_t root, std::uint64_t tag) {
    Rng mixer(root ^ (0x9e3779b97f4a7c15ULL * (tag + 1)));
    mixer.next_u64();
    return Rng(mixer.next_u64());
  }

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// uniform in (0,1), 53-bit, never exactly 0
  double next_double() {
    const double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    return u > 0 ? u : 0x1.0p-53;
  }

 private:
  std::uint64_t state_;
};

/// Exact binomial sampler via geometric skips over failures; O(n*min(p,1-p))
/// which is fine at desk-scale budgets.
inline long long binomial_sample(long long n, double p, Rng& rng) {
  if (n < 0 || p < 0.0 || p > 1.0) throw std::invalid_argument("binomial_sample: bad arguments");
  if (n == 0 || p == 0.0) return 0;
  if (p == 1.0) return n;
  if (p > 0.5) return n - binomial_sample(n, 1.0 - p, rng);

  const double log_q = std::log1p(-p);
  long long successes = 0;
  long long i = -1;
  while (true) {
    i += 1 + static_cast<long long>(std::floor(std::log(rng.next_double()) / log_q));
    if (i >= n) break;
    ++successes;
  }
  return successes;
}

/// Multinomial draw by chained conditional binomials.
inline std::vector<long long> multinomial_sample(long long n, const std::vector<double>& probs, Rng& rng) {
  std::vector<long long> out(probs.size(), 0);
  double remaining = 0;
  for (double p : probs) {
    if (p < -1e-12) throw std::invalid_argument("multinomial_sample: negative probability");
    remaining += std::max(0.0, p);
  }
  long long left = n;
  for (size_t i = 0; i + 1 < probs.size() && left > 0; ++i) {
    const double p = std::max(0.0, probs[i]);
    const double cond = remaining > 0 ? std::min(1.0, p / remaining) : 0.0;
    out[i] = binomial_sample(left, cond, rng);
    left -= out[i];
    remaining -= p;
  }
  if (!probs.empty()) out.back() += left;
  return out;
}

/// Poisson sampler: Knuth product for small mean, Hormann's PTRS transformed
/// rejection for large mean. Exact and O(1) per draw for large lambda.
inline long long poisson_sample(double lambda, Rng& rng) {
  if (lambda < 0) throw std::invalid_argument("poisson_sample: negative mean");
  if (lambda == 0) return 0;
  if (lambda < 10.0) {
    const double limit = std::exp(-lambda);
    long long k = 0;
    double prod = rng.next_double();
    while (prod > limit) {
      ++k;
      prod *= rng.next_double();
    }
    return k;
  }
  // PTRS
  const double b = 0.931 + 2.53 * std::sqrt(lambda);
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);
  const double log_lambda = std::log(lambda);
  while (true) {
    double u = rng.next_double() - 0.5;
    double v = rng.next_double();
    const double us = 0.5 - std::abs(u);
    const long long k = static_cast<long long>(std::floor((2 * a / us + b) * u + lambda + 0.43));
    if (us >= 0.07 && v <= v_r) return k;
    if (k < 0 || (us < 0.013 && v > us)) continue;
    if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
        k * log_lambda - lambda - std::lgamma(static_cast<double>(k) + 1.0))
      return k;
  }
}

}  // namespace steerdi
