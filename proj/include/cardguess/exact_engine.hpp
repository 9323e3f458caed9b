#pragma once

// Exact score laws for small decks.
//
// Three independent routes to the law of the greedy score:
//   exact_pmf           recursion over multiplicity profiles
//   brute_force_pmf     every distinct arrangement, exact tie-break weights
//   decomposition_pmf   every arrangement's tie counts, mixed Bernoulli sums
// plus a maximizing dynamic program over all guessing strategies.

#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cardguess/deck.hpp"
#include "cardguess/game.hpp"
#include "cardguess/stats_math.hpp"
#include "cardguess/tie_stats.hpp"

namespace cardguess {

struct ResourceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using ScorePmf = Pmf;

/// a[j-1] = number of types with exactly j cards left.
struct Profile {
  std::vector<int> a;

  static Profile of(const Deck& deck) {
    Profile p{std::vector<int>(static_cast<std::size_t>(deck.max_mult()), 0)};
    for (int m : deck.multiplicities()) ++p.a[static_cast<std::size_t>(m) - 1];
    return p;
  }

  int remaining() const {
    int r = 0;
    for (std::size_t j = 0; j < a.size(); ++j) r += static_cast<int>(j + 1) * a[j];
    return r;
  }

  /// Largest j with a_j > 0, or 0 when empty.
  int top() const {
    for (std::size_t j = a.size(); j > 0; --j) {
      if (a[j - 1] > 0) return static_cast<int>(j);
    }
    return 0;
  }

  /// Profile after revealing a card from a type that had j cards.
  Profile after_reveal(int j) const {
    Profile next = *this;
    --next.a[static_cast<std::size_t>(j) - 1];
    if (j > 1) ++next.a[static_cast<std::size_t>(j) - 2];
    return next;
  }

  auto operator<=>(const Profile&) const = default;
};

struct ExactOptions {
  /// exact_pmf refuses decks with n * max_mult above this.
  long long max_profile_size = 64;
};

namespace detail {

inline void drop_zero_tails(Pmf& pmf) { pmf.trim(std::numeric_limits<double>::min()); }

inline void require_small(const Deck& deck, int limit, const char* what) {
  if (deck.total() > limit) {
    throw ResourceError(std::string(what) + ": deck has " + std::to_string(deck.total()) + " cards, limit is " +
                        std::to_string(limit));
  }
}

class ProfileRecursion {
 public:
  const std::vector<double>& law(const Profile& profile) {
    if (auto it = memo_.find(profile); it != memo_.end()) return it->second;
    const int left = profile.remaining();
    std::vector<double> out(static_cast<std::size_t>(left) + 1, 0.0);
    if (left == 0) {
      out[0] = 1.0;
    } else {
      const int jmax = profile.top();
      const double inv = 1.0 / left;
      for (int j = 1; j <= jmax; ++j) {
        const int types = profile.a[static_cast<std::size_t>(j) - 1];
        if (types == 0) continue;
        // The guess names one specific type holding jmax cards.
        const double hit = j == jmax ? j * inv : 0.0;
        const double miss = j * (j == jmax ? types - 1 : types) * inv;
        const auto& sub = law(profile.after_reveal(j));
        for (std::size_t k = 0; k < sub.size(); ++k) {
          out[k] += miss * sub[k];
          out[k + 1] += hit * sub[k];
        }
      }
    }
    return memo_.emplace(profile, std::move(out)).first->second;
  }

 private:
  std::map<Profile, std::vector<double>> memo_;
};

}  // namespace detail

/// Upper bound on reachable profiles: C(n + m, m).
inline double profile_count_estimate(const Deck& deck) {
  return binomial(deck.num_types() + deck.max_mult(), deck.max_mult());
}

/// Exact law of the greedy score by recursion over multiplicity profiles.
inline ScorePmf exact_pmf(const Deck& deck, const ExactOptions& options = {}) {
  const long long size = static_cast<long long>(deck.num_types()) * deck.max_mult();
  if (size > options.max_profile_size) {
    throw ResourceError("exact_pmf: n*max_mult = " + std::to_string(size) + " exceeds budget " +
                        std::to_string(options.max_profile_size) + " (about " +
                        std::to_string(static_cast<long long>(profile_count_estimate(deck))) + " profiles)");
  }
  detail::ProfileRecursion recursion;
  Pmf out{0, recursion.law(Profile::of(deck))};
  detail::drop_zero_tails(out);
  return out;
}

/// Calls fn(arrangement) once for every distinct ordering of the deck.
inline void for_each_arrangement(const Deck& deck, const std::function<void(const Arrangement&)>& fn) {
  Arrangement a{deck.expanded()};
  do {
    fn(a);
  } while (std::next_permutation(a.cards.begin(), a.cards.end()));
}

inline long long arrangement_count(const Deck& deck) {
  // multinomial |m|! / prod m_i!, built up type by type
  double count = 1;
  int placed = 0;
  for (int m : deck.multiplicities()) {
    placed += m;
    count *= binomial(placed, m);
  }
  return static_cast<long long>(count + 0.5);
}

/// Law of the greedy score for one fixed arrangement, with the guess's
/// tie-break randomness integrated out exactly.
inline ScorePmf arrangement_score_law(const Deck& deck, const Arrangement& arrangement, TieRule rule) {
  GreedyGame game(deck);
  RngStream unused(0);
  std::vector<double> law{1.0};
  for (CardType card : arrangement.cards) {
    double p = 0.0;
    if (game.count(card) == game.max_mult()) {
      p = rule == TieRule::uniform ? 1.0 / game.num_tied() : (game.guess(rule, unused) == card ? 1.0 : 0.0);
    }
    if (p > 0) {
      law.push_back(0.0);
      for (std::size_t k = law.size() - 1; k > 0; --k) law[k] = law[k] * (1 - p) + law[k - 1] * p;
      law[0] *= (1 - p);
    }
    game.reveal(card);
  }
  return Pmf{0, std::move(law)};
}

/// Enumeration oracle: averages arrangement_score_law over all arrangements.
inline ScorePmf brute_force_pmf(const Deck& deck, TieRule rule = TieRule::uniform) {
  detail::require_small(deck, 12, "brute_force_pmf");
  std::vector<double> acc(static_cast<std::size_t>(deck.total()) + 1, 0.0);
  long long count = 0;
  for_each_arrangement(deck, [&](const Arrangement& a) {
    const auto law = arrangement_score_law(deck, a, rule);
    for (std::size_t k = 0; k < law.p.size(); ++k) acc[k] += law.p[k];
    ++count;
  });
  for (double& x : acc) x /= static_cast<double>(count);
  Pmf out{0, std::move(acc)};
  detail::drop_zero_tails(out);
  return out;
}

/// Best achievable expected score over all guessing strategies.
inline double optimal_value(const Deck& deck) {
  detail::require_small(deck, 12, "optimal_value");
  std::map<std::vector<int>, double> memo;
  std::function<double(const std::vector<int>&)> value = [&](const std::vector<int>& counts) -> double {
    if (counts.empty()) return 0.0;
    if (auto it = memo.find(counts); it != memo.end()) return it->second;
    int left = 0;
    for (int c : counts) left += c;
    // future play does not depend on the current guess; only its hit chance does
    double best_hit = 0.0;
    for (int g : counts) best_hit = std::max(best_hit, static_cast<double>(g) / left);
    double future = 0.0;
    for (std::size_t k = 0; k < counts.size(); ++k) {
      if (k > 0 && counts[k] == counts[k - 1]) continue;
      const auto same = std::count(counts.begin(), counts.end(), counts[k]);
      std::vector<int> next = counts;
      if (--next[k] == 0) next.erase(next.begin() + static_cast<std::ptrdiff_t>(k));
      std::sort(next.begin(), next.end(), std::greater<>());
      future += static_cast<double>(same * counts[k]) / left * value(next);
    }
    return memo[counts] = best_hit + future;
  };
  std::vector<int> start = deck.multiplicities();
  std::sort(start.begin(), start.end(), std::greater<>());
  return value(start);
}

/// Precomputed H(k) and H2(k) for k <= limit.
class HarmonicTable {
 public:
  explicit HarmonicTable(int limit) : h_(static_cast<std::size_t>(limit) + 1, 0.0), h2_(h_) {
    CompensatedSum a, b;
    for (int k = 1; k <= limit; ++k) {
      const double x = k;
      a.add(1.0 / x);
      b.add(1.0 / (x * x));
      h_[static_cast<std::size_t>(k)] = a.value();
      h2_[static_cast<std::size_t>(k)] = b.value();
    }
  }
  int limit() const noexcept { return static_cast<int>(h_.size()) - 1; }
  double h(int k) const { return h_.at(static_cast<std::size_t>(k)); }
  double h2(int k) const { return h2_.at(static_cast<std::size_t>(k)); }

 private:
  std::vector<double> h_, h2_;
};

/// Mean and variance of the score given the tie counts.
struct ConditionalMoments {
  double mu_prime = 0;
  double sigma2_prime = 0;
};

namespace detail {
inline void require_tie_counts(std::span<const int> w_tilde) {
  if (w_tilde.empty()) throw std::invalid_argument("tie count vector is empty");
  for (int w : w_tilde) {
    if (w < 1) throw std::invalid_argument("tie counts must be >= 1");
  }
}
}  // namespace detail

inline ConditionalMoments conditional_moments(std::span<const int> w_tilde, const HarmonicTable& table) {
  ConditionalMoments cm;
  for (int w : w_tilde) {
    if (w < 1) throw std::invalid_argument("tie counts must be >= 1");
    const double h = table.h(w);
    cm.mu_prime += h;
    cm.sigma2_prime += h - table.h2(w);
  }
  return cm;
}

inline ConditionalMoments conditional_moments(std::span<const int> w_tilde) {
  detail::require_tie_counts(w_tilde);
  ConditionalMoments cm;
  for (int w : w_tilde) {
    const double h = harmonic(w);
    cm.mu_prime += h;
    cm.sigma2_prime += h - harmonic2(w);
  }
  return cm;
}

/// Law of sum_j sum_{s <= W~_j} Bernoulli(1/s), by sequential convolution.
inline ScorePmf conditional_pmf(std::span<const int> w_tilde) {
  detail::require_tie_counts(w_tilde);
  Pmf law = Pmf::point_mass(0);
  std::vector<double> next;
  for (int w : w_tilde) {
    for (int s = 1; s <= w; ++s) {
      const double p = 1.0 / s;
      next.assign(law.p.size() + 1, 0.0);
      for (std::size_t k = 0; k < law.p.size(); ++k) {
        next[k] += law.p[k] * (1 - p);
        next[k + 1] += law.p[k] * p;
      }
      law.p.swap(next);
      law.trim();
    }
  }
  return law;
}

/// Mixture of conditional_pmf(W~) over all arrangements of the deck.
inline ScorePmf decomposition_pmf(const Deck& deck) {
  detail::require_small(deck, 12, "decomposition_pmf");
  std::map<std::vector<int>, long long> tally;
  long long count = 0;
  for_each_arrangement(deck, [&](const Arrangement& a) {
    ++tally[tie_counts(deck, a).w_tilde];
    ++count;
  });
  std::vector<double> acc(static_cast<std::size_t>(deck.total()) + 1, 0.0);
  for (const auto& [w_tilde, hits] : tally) {
    const auto law = conditional_pmf(w_tilde);
    const double weight = static_cast<double>(hits) / static_cast<double>(count);
    for (int k = law.lo; k <= law.hi(); ++k) acc[static_cast<std::size_t>(k)] += weight * law[k];
  }
  Pmf out{0, std::move(acc)};
  detail::drop_zero_tails(out);
  return out;
}

}  // namespace cardguess
