#pragma once

// Special functions and distribution distances used by the experiments.

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "cardguess/deck.hpp"

namespace cardguess {

/// Probability mass function on the dense integer range [lo, lo + p.size()).
struct Pmf {
  int lo = 0;
  std::vector<double> p;

  static Pmf point_mass(int k) { return Pmf{k, {1.0}}; }

  /// Empirical pmf of integer counts keyed by value.
  template <typename Count>
  static Pmf from_histogram(const std::map<int, Count>& hist) {
    if (hist.empty()) return Pmf{};
    const int first = hist.begin()->first;
    const int last = hist.rbegin()->first;
    double total = 0;
    for (const auto& [k, c] : hist) total += static_cast<double>(c);
    Pmf out{first, std::vector<double>(static_cast<std::size_t>(last - first + 1), 0.0)};
    for (const auto& [k, c] : hist) out.p[static_cast<std::size_t>(k - first)] = static_cast<double>(c) / total;
    return out;
  }

  bool empty() const noexcept { return p.empty(); }
  int hi() const noexcept { return lo + static_cast<int>(p.size()) - 1; }

  double operator[](int k) const {
    if (k < lo || k > hi()) return 0.0;
    return p[static_cast<std::size_t>(k - lo)];
  }

  double total() const {
    double s = 0;
    for (double x : p) s += x;
    return s;
  }

  double mean() const {
    double s = 0;
    for (std::size_t i = 0; i < p.size(); ++i) s += p[i] * (lo + static_cast<double>(i));
    return s;
  }

  double variance() const {
    const double mu = mean();
    double s = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double d = lo + static_cast<double>(i) - mu;
      s += p[i] * d * d;
    }
    return s;
  }

  /// Drops boundary entries below `threshold` and renormalizes.
  void trim(double threshold = 1e-15) {
    std::size_t first = 0, last = p.size();
    while (first < last && p[first] < threshold) ++first;
    while (last > first && p[last - 1] < threshold) --last;
    if (first == 0 && last == p.size()) return;
    double dropped = 0;
    for (std::size_t i = 0; i < first; ++i) dropped += p[i];
    for (std::size_t i = last; i < p.size(); ++i) dropped += p[i];
    p = std::vector<double>(p.begin() + static_cast<std::ptrdiff_t>(first), p.begin() + static_cast<std::ptrdiff_t>(last));
    lo += static_cast<int>(first);
    if (dropped > 0) {
      const double scale = 1.0 / (1.0 - dropped);
      for (double& x : p) x *= scale;
    }
  }
};

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0;
  double carry_ = 0;
};

/// H(k) = sum_{s<=k} 1/s.
inline double harmonic(long long k) {
  if (k < 1) throw std::invalid_argument("harmonic: k must be >= 1");
  CompensatedSum acc;
  for (long long s = k; s >= 1; --s) acc.add(1.0 / static_cast<double>(s));
  return acc.value();
}

/// H2(k) = sum_{s<=k} 1/s^2.
inline double harmonic2(long long k) {
  if (k < 1) throw std::invalid_argument("harmonic2: k must be >= 1");
  CompensatedSum acc;
  for (long long s = k; s >= 1; --s) {
    const auto x = static_cast<double>(s);
    acc.add(1.0 / (x * x));
  }
  return acc.value();
}

/// Leading-order mean (and variance) of the greedy score: H(m) ln n.
inline double predicted_mean(long long n, int m) {
  if (n < 2 || m < 1) throw std::invalid_argument("predicted_mean: need n >= 2 and m >= 1");
  return harmonic(m) * std::log(static_cast<double>(n));
}

/// Falling factorial (x)_k.
inline double falling_factorial(double x, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= (x - i);
  return r;
}

inline double binomial(double n, int k) {
  if (k < 0 || n < k) return 0.0;
  double r = 1.0;
  for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
  return r;
}

/// Exact E[W_{j,t}] under a uniform shuffle:
///   C(t, j+1) * sum_i (m_i)_{j+1} / (|m|)_{j+1}.
inline double lambda_exact(const Deck& deck, int j, int t) {
  if (j < 1 || j >= deck.max_mult()) throw std::invalid_argument("lambda_exact: need 1 <= j < max multiplicity");
  if (t < 0 || t > deck.total()) throw std::invalid_argument("lambda_exact: t out of range");
  if (t <= j) return 0.0;
  double same_type = 0;
  for (int m : deck.multiplicities()) same_type += falling_factorial(m, j + 1);
  return binomial(t, j + 1) * same_type / falling_factorial(deck.total(), j + 1);
}

/// Large-n form for balanced decks: t^{j+1}/n^j * C(m, j+1)/m^{j+1}.
inline double lambda_balanced_asymptotic(long long n, int m, int j, double t) {
  return std::pow(t, j + 1) / std::pow(static_cast<double>(n), j) * binomial(m, j + 1) / std::pow(m, j + 1);
}

inline double poisson_pmf(double lambda, long long k) {
  if (k < 0) return 0.0;
  if (lambda <= 0) throw std::invalid_argument("poisson_pmf: lambda must be > 0");
  const auto kd = static_cast<double>(k);
  return std::exp(-lambda + kd * std::log(lambda) - std::lgamma(kd + 1.0));
}

/// Poisson(lambda) on [0, K] with K covering all but ~1e-12 of the mass.
/// lambda == 0 gives the point mass at 0.
inline Pmf poisson_law(double lambda, int at_least_to = 0) {
  if (lambda <= 0) return Pmf::point_mass(0);
  const int upper = std::max(at_least_to, static_cast<int>(std::ceil(lambda + 40.0 * std::sqrt(lambda) + 40.0)));
  Pmf out{0, std::vector<double>(static_cast<std::size_t>(upper) + 1)};
  for (int k = 0; k <= upper; ++k) out.p[static_cast<std::size_t>(k)] = poisson_pmf(lambda, k);
  return out;
}

/// Half the L1 distance over the union of the supports.
inline double tv_distance(const Pmf& a, const Pmf& b) {
  if (a.empty() && b.empty()) return 0.0;
  const int lo = a.empty() ? b.lo : (b.empty() ? a.lo : std::min(a.lo, b.lo));
  const int hi = a.empty() ? b.hi() : (b.empty() ? a.hi() : std::max(a.hi(), b.hi()));
  CompensatedSum acc;
  for (int k = lo; k <= hi; ++k) acc.add(std::abs(a[k] - b[k]));
  return std::clamp(0.5 * acc.value(), 0.0, 1.0);
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

/// sup_x |F(x) - Phi((x - mu)/sigma)| for the step CDF F of `pmf`. Both
/// one-sided limits are checked at every jump, which attains the supremum.
inline double kolmogorov_gap(const Pmf& pmf, double mu, double sigma) {
  if (!(sigma > 0)) throw std::invalid_argument("kolmogorov_gap: sigma must be > 0");
  double below = 0;
  double gap = 0;
  for (std::size_t i = 0; i < pmf.p.size(); ++i) {
    const double z = (pmf.lo + static_cast<double>(i) - mu) / sigma;
    const double phi = normal_cdf(z);
    const double at = below + pmf.p[i];
    gap = std::max({gap, std::abs(below - phi), std::abs(at - phi)});
    below = at;
  }
  return gap;
}

}  // namespace cardguess
