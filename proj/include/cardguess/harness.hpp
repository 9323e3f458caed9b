#pragma once

// Seeded Monte Carlo experiments for the greedy score.
//
// Replicate r of an experiment with seed s always draws from
// RngStream(s).substream(r), and every aggregate is reduced in replicate
// order, so reports do not depend on the number of workers.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cardguess/deck.hpp"
#include "cardguess/exact_engine.hpp"
#include "cardguess/game.hpp"
#include "cardguess/parallel.hpp"
#include "cardguess/rng.hpp"
#include "cardguess/stats_math.hpp"
#include "cardguess/tie_stats.hpp"

namespace cardguess {

struct Interval {
  double lo = 0;
  double hi = 0;
  bool contains(double x) const noexcept { return lo <= x && x <= hi; }
};

/// Averages of the per-replicate tie counts.
struct TieSummary {
  std::vector<double> mean_w_tilde;  // E[W~_j], j = 1..m
  double mean_mu_prime = 0;
  double var_mu_prime = 0;
  double mean_sigma2_prime = 0;
};

struct ExperimentReport {
  std::string deck;
  int num_types = 0;
  int max_mult = 0;
  std::int64_t reps = 0;
  std::uint64_t seed = 0;
  double mean = 0;
  double var = 0;
  double predicted = 0;
  std::optional<double> ks_gap;  // empty when the score is constant
  std::map<int, std::int64_t> histogram;
  std::optional<TieSummary> ties;

  double standard_error() const { return std::sqrt(var / static_cast<double>(reps)); }
};

/// Raw per-replicate output of run_replicates.
struct ReplicateData {
  std::vector<int> scores;
  std::vector<int> w_tilde;  // reps x max_mult, row-major
  int max_mult = 0;

  std::span<const int> tie_row(std::size_t r) const {
    return std::span<const int>(w_tilde).subspan(r * static_cast<std::size_t>(max_mult), static_cast<std::size_t>(max_mult));
  }
};

namespace detail {

struct GameWorker {
  explicit GameWorker(const Deck& deck) : cards(deck.expanded()), fresh(cards), game(deck) {}
  std::vector<CardType> cards;
  std::vector<CardType> fresh;
  GreedyGame game;
};

inline double histogram_mean(const std::map<int, std::int64_t>& hist, double* variance) {
  std::int64_t n = 0, s1 = 0;
  long double s2 = 0;
  for (const auto& [k, c] : hist) {
    n += c;
    s1 += static_cast<std::int64_t>(k) * c;
    s2 += static_cast<long double>(k) * k * c;
  }
  const long double mean = static_cast<long double>(s1) / n;
  if (variance) *variance = n > 1 ? static_cast<double>((s2 - static_cast<long double>(s1) * mean) / (n - 1)) : 0.0;
  return static_cast<double>(mean);
}

inline double sample_variance(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  CompensatedSum s;
  for (double x : xs) s.add(x);
  const double mean = s.value() / static_cast<double>(xs.size());
  CompensatedSum d;
  for (double x : xs) d.add((x - mean) * (x - mean));
  return d.value() / static_cast<double>(xs.size() - 1);
}

inline double sample_mean(std::span<const double> xs) {
  CompensatedSum s;
  for (double x : xs) s.add(x);
  return xs.empty() ? 0.0 : s.value() / static_cast<double>(xs.size());
}

/// Percentile interval of a sorted sample.
inline Interval percentile_interval(std::vector<double> values, double level) {
  std::sort(values.begin(), values.end());
  const double tail = (1.0 - level) / 2.0;
  const auto pick = [&](double q) {
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(values.size() - 1, lo + 1);
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
  };
  return {pick(tail), pick(1.0 - tail)};
}

}  // namespace detail

/// One replicate: shuffle with `rng`, then play greedy with uniform ties on
/// the same stream. W~_j is the tie count s at the first step whose maximal
/// multiplicity is j, which equals the bottom-up tie count.
inline int play_replicate(detail::GameWorker& worker, RngStream& rng, std::span<int> w_tilde_out) {
  std::copy(worker.fresh.begin(), worker.fresh.end(), worker.cards.begin());
  shuffle(std::span<CardType>(worker.cards), rng);
  auto& game = worker.game;
  game.reset();
  int score = 0;
  int last_j = 0;
  for (CardType card : worker.cards) {
    const int j = game.max_mult();
    if (j != last_j) {
      w_tilde_out[static_cast<std::size_t>(j) - 1] = game.num_tied();
      last_j = j;
    }
    score += game.guess(TieRule::uniform, rng) == card ? 1 : 0;
    game.reveal(card);
  }
  return score;
}

inline ReplicateData run_replicates(const Deck& deck, std::int64_t reps, std::uint64_t seed, int workers) {
  if (reps < 1) throw std::invalid_argument("reps must be >= 1");
  ReplicateData data;
  data.max_mult = deck.max_mult();
  data.scores.assign(static_cast<std::size_t>(reps), 0);
  data.w_tilde.assign(static_cast<std::size_t>(reps) * static_cast<std::size_t>(deck.max_mult()), 0);
  const RngStream root(seed);
  parallel_for(
      reps, workers, [&] { return detail::GameWorker(deck); },
      [&](detail::GameWorker& worker, std::int64_t r) {
        RngStream rng = root.substream(static_cast<std::uint64_t>(r));
        const auto row = static_cast<std::size_t>(r) * static_cast<std::size_t>(deck.max_mult());
        data.scores[static_cast<std::size_t>(r)] =
            play_replicate(worker, rng, std::span<int>(data.w_tilde).subspan(row, static_cast<std::size_t>(deck.max_mult())));
      });
  return data;
}

inline std::vector<ConditionalMoments> conditional_moments_per_replicate(const Deck& deck, const ReplicateData& data) {
  const HarmonicTable table(deck.num_types());
  std::vector<ConditionalMoments> out(data.scores.size());
  for (std::size_t r = 0; r < out.size(); ++r) out[r] = conditional_moments(data.tie_row(r), table);
  return out;
}

inline ExperimentReport summarize(const Deck& deck, const ReplicateData& data, std::uint64_t seed) {
  ExperimentReport rep;
  rep.deck = to_spec(deck);
  rep.num_types = deck.num_types();
  rep.max_mult = deck.max_mult();
  rep.reps = static_cast<std::int64_t>(data.scores.size());
  rep.seed = seed;
  for (int s : data.scores) ++rep.histogram[s];
  rep.mean = detail::histogram_mean(rep.histogram, &rep.var);
  rep.predicted = deck.num_types() >= 2 ? predicted_mean(deck.num_types(), deck.max_mult()) : 0.0;
  if (rep.var > 0) rep.ks_gap = kolmogorov_gap(Pmf::from_histogram(rep.histogram), rep.mean, std::sqrt(rep.var));

  TieSummary ties;
  ties.mean_w_tilde.assign(static_cast<std::size_t>(deck.max_mult()), 0.0);
  for (std::size_t r = 0; r < data.scores.size(); ++r) {
    const auto row = data.tie_row(r);
    for (std::size_t j = 0; j < row.size(); ++j) ties.mean_w_tilde[j] += row[j];
  }
  for (double& x : ties.mean_w_tilde) x /= static_cast<double>(data.scores.size());
  const auto moments = conditional_moments_per_replicate(deck, data);
  std::vector<double> mu(moments.size()), sigma2(moments.size());
  for (std::size_t r = 0; r < moments.size(); ++r) {
    mu[r] = moments[r].mu_prime;
    sigma2[r] = moments[r].sigma2_prime;
  }
  ties.mean_mu_prime = detail::sample_mean(mu);
  ties.var_mu_prime = detail::sample_variance(mu);
  ties.mean_sigma2_prime = detail::sample_mean(sigma2);
  rep.ties = std::move(ties);
  return rep;
}

inline ExperimentReport run_mc(const Deck& deck, std::int64_t reps, std::uint64_t seed, int workers = 1) {
  return summarize(deck, run_replicates(deck, reps, seed, workers), seed);
}

// ---------------------------------------------------------------------------
// Mean and CLT across deck sizes

struct MeanIncrement {
  int n_from = 0;
  int n_to = 0;
  double observed = 0;   // mean(n_to) - mean(n_from)
  double predicted = 0;  // H(m) ln(n_to / n_from)
  double pooled_se = 0;
};

struct CltResult {
  int m = 0;
  std::vector<ExperimentReport> reports;
  std::vector<MeanIncrement> increments;  // consecutive pairs of n
};

/// Seed used for the deck with n types inside clt_experiment.
inline std::uint64_t seed_for_size(std::uint64_t seed, int n) {
  return splitmix64(seed ^ (0xc1f651c67c62c6e0ULL + static_cast<std::uint64_t>(n)));
}

inline CltResult clt_experiment(int m, std::span<const int> n_list, std::int64_t reps, std::uint64_t seed,
                                int workers = 1) {
  CltResult out;
  out.m = m;
  for (int n : n_list) {
    const std::uint64_t s = seed_for_size(seed, n);
    out.reports.push_back(run_mc(Deck::balanced(n, m), reps, s, workers));
  }
  for (std::size_t i = 1; i < out.reports.size(); ++i) {
    const auto& a = out.reports[i - 1];
    const auto& b = out.reports[i];
    out.increments.push_back({a.num_types, b.num_types, b.mean - a.mean,
                              harmonic(m) * std::log(static_cast<double>(b.num_types) / a.num_types),
                              std::sqrt(a.var / static_cast<double>(a.reps) + b.var / static_cast<double>(b.reps))});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Poisson approximation of W_{j,t}

struct PoissonReport {
  std::string deck;
  int num_types = 0;
  int j = 0;
  int t = 0;
  std::int64_t reps = 0;
  std::uint64_t seed = 0;
  double lambda = 0;
  std::map<int, std::int64_t> histogram;  // empirical law of W_{j,t}
  double tv = 0;
  Interval tv_ci;  // bootstrap 99% percentile interval
  double t_over_n = 0;
};

/// tv between an empirical histogram and Poisson(lambda).
inline double poisson_tv(const std::map<int, std::int64_t>& hist, double lambda) {
  const Pmf empirical = Pmf::from_histogram(hist);
  return tv_distance(empirical, poisson_law(lambda, empirical.hi()));
}

namespace detail {

/// Draws the bottom t cards of a uniform arrangement by a partial
/// Fisher-Yates pass, tallies W_{j,t}, and restores the buffer.
struct SuffixSampler {
  SuffixSampler(const Deck& deck) : cards(deck.expanded()), counts(static_cast<std::size_t>(deck.num_types()), 0) {}

  std::uint64_t draw(int j, int t, RngStream& rng) {
    const std::size_t n = cards.size();
    swaps.clear();
    std::uint64_t w = 0;
    for (std::size_t i = 0; i < static_cast<std::size_t>(t); ++i) {
      const std::size_t k = i + static_cast<std::size_t>(rng.uniform_below(n - i));
      std::swap(cards[i], cards[k]);
      swaps.push_back(k);
      int& c = counts[cards[i]];
      w += static_cast<std::uint64_t>(binomial(c, j) + 0.5);  // new (j+1)-sets through this card
      ++c;
    }
    for (std::size_t i = static_cast<std::size_t>(t); i-- > 0;) {
      counts[cards[i]] = 0;
      std::swap(cards[i], cards[swaps[i]]);
    }
    return w;
  }

  std::vector<CardType> cards;
  std::vector<int> counts;
  std::vector<std::size_t> swaps;
};

}  // namespace detail

inline PoissonReport poisson_experiment(const Deck& deck, int j, int t, std::int64_t reps, std::uint64_t seed,
                                        int workers = 1, int bootstrap_resamples = 200) {
  if (j < 1 || j >= deck.max_mult()) throw std::invalid_argument("poisson_experiment: need 1 <= j < max multiplicity");
  if (t < 0 || t > deck.total()) throw std::invalid_argument("poisson_experiment: t out of range");
  if (reps < 1) throw std::invalid_argument("reps must be >= 1");
  PoissonReport rep;
  rep.deck = to_spec(deck);
  rep.num_types = deck.num_types();
  rep.j = j;
  rep.t = t;
  rep.reps = reps;
  rep.seed = seed;
  rep.lambda = lambda_exact(deck, j, t);
  rep.t_over_n = static_cast<double>(t) / deck.num_types();

  std::vector<int> values(static_cast<std::size_t>(reps));
  const RngStream root(seed);
  parallel_for(
      reps, workers, [&] { return detail::SuffixSampler(deck); },
      [&](detail::SuffixSampler& sampler, std::int64_t r) {
        RngStream rng = root.substream(static_cast<std::uint64_t>(r));
        values[static_cast<std::size_t>(r)] = static_cast<int>(sampler.draw(j, t, rng));
      });
  for (int v : values) ++rep.histogram[v];
  rep.tv = poisson_tv(rep.histogram, rep.lambda);

  RngStream boot(splitmix64(seed ^ 0x5bd1e9955bd1e995ULL));
  const int top = rep.histogram.rbegin()->first;
  const Pmf reference = poisson_law(rep.lambda, top);
  std::vector<double> resampled;
  std::vector<std::int64_t> tally(static_cast<std::size_t>(top) + 1);
  for (int b = 0; b < bootstrap_resamples; ++b) {
    std::fill(tally.begin(), tally.end(), 0);
    for (std::int64_t i = 0; i < reps; ++i) ++tally[static_cast<std::size_t>(values[static_cast<std::size_t>(boot.uniform_below(static_cast<std::uint64_t>(reps)))])];
    Pmf empirical{0, std::vector<double>(tally.size())};
    for (std::size_t k = 0; k < tally.size(); ++k) empirical.p[k] = static_cast<double>(tally[k]) / static_cast<double>(reps);
    resampled.push_back(tv_distance(empirical, reference));
  }
  rep.tv_ci = bootstrap_resamples > 0 ? detail::percentile_interval(resampled, 0.99) : Interval{rep.tv, rep.tv};
  return rep;
}

// ---------------------------------------------------------------------------
// Law of total variance: Var(S) = Var(mu') + E[sigma'^2]

struct VarianceDecomposition {
  std::string deck;
  std::int64_t reps = 0;
  std::uint64_t seed = 0;
  double mean_score = 0;
  double var_score = 0;
  double var_mu_prime = 0;
  double mean_sigma2_prime = 0;
  double residual = 0;
  Interval residual_ci;  // bootstrap 99% percentile interval
};

namespace detail {
struct DecompositionStats {
  double var_score, var_mu, mean_sigma2;
};

inline DecompositionStats decomposition_stats(std::span<const double> score, std::span<const double> mu,
                                              std::span<const double> sigma2) {
  return {sample_variance(score), sample_variance(mu), sample_mean(sigma2)};
}
}  // namespace detail

inline VarianceDecomposition variance_decomposition(const Deck& deck, std::int64_t reps, std::uint64_t seed,
                                                    int workers = 1, int bootstrap_resamples = 200) {
  const ReplicateData data = run_replicates(deck, reps, seed, workers);
  const auto moments = conditional_moments_per_replicate(deck, data);
  const auto count = static_cast<std::size_t>(reps);
  std::vector<double> score(count), mu(count), sigma2(count);
  for (std::size_t r = 0; r < count; ++r) {
    score[r] = data.scores[r];
    mu[r] = moments[r].mu_prime;
    sigma2[r] = moments[r].sigma2_prime;
  }
  VarianceDecomposition vd;
  vd.deck = to_spec(deck);
  vd.reps = reps;
  vd.seed = seed;
  vd.mean_score = detail::sample_mean(score);
  const auto full = detail::decomposition_stats(score, mu, sigma2);
  vd.var_score = full.var_score;
  vd.var_mu_prime = full.var_mu;
  vd.mean_sigma2_prime = full.mean_sigma2;
  vd.residual = full.var_score - full.var_mu - full.mean_sigma2;

  RngStream boot(splitmix64(seed ^ 0x2545f4914f6cdd1dULL));
  std::vector<double> residuals;
  std::vector<double> bs(count), bm(count), bv(count);
  for (int b = 0; b < bootstrap_resamples; ++b) {
    for (std::size_t i = 0; i < count; ++i) {
      const auto k = static_cast<std::size_t>(boot.uniform_below(count));
      bs[i] = score[k];
      bm[i] = mu[k];
      bv[i] = sigma2[k];
    }
    const auto st = detail::decomposition_stats(bs, bm, bv);
    residuals.push_back(st.var_score - st.var_mu - st.mean_sigma2);
  }
  vd.residual_ci = bootstrap_resamples > 0 ? detail::percentile_interval(residuals, 0.99) : Interval{vd.residual, vd.residual};
  return vd;
}

// ---------------------------------------------------------------------------
// Normal approximation of the conditional score (exact, no sampling)

struct ConditionalGap {
  std::vector<int> w_tilde;
  double mu_prime = 0;
  double sigma2_prime = 0;
  std::optional<double> gap;  // empty when sigma' = 0
  bool degenerate() const noexcept { return !gap.has_value(); }
};

inline std::vector<ConditionalGap> conditional_clt_check(std::span<const std::vector<int>> w_tilde_list) {
  std::vector<ConditionalGap> out;
  for (const auto& w : w_tilde_list) {
    ConditionalGap g;
    g.w_tilde = w;
    const auto cm = conditional_moments(w);
    g.mu_prime = cm.mu_prime;
    g.sigma2_prime = cm.sigma2_prime;
    if (cm.sigma2_prime > 0) g.gap = kolmogorov_gap(conditional_pmf(w), cm.mu_prime, std::sqrt(cm.sigma2_prime));
    out.push_back(std::move(g));
  }
  return out;
}

}  // namespace cardguess
