#pragma once

// Tie statistics of an arrangement, read from the bottom of the deck.
//
//   T_j       largest t such that no type occurs more than j times among the
//             bottom t cards (T_0 = 0, T_m = |m|).
//   W_{j,t}   number of (j+1)-element sets of bottom-t positions holding one
//             type, i.e. sum_i C(c_i(t), j+1) for suffix tallies c_i(t).
//   W~_j      W_{j-1, T_j}: types seen exactly j times in the bottom T_j.
//
// The forward game visits configuration (j, s) -- max multiplicity j with s
// tied types -- exactly for 1 <= s <= W~_j, and the score is a sum of
// independent Bernoulli(1/s) over those configurations given the W~.

#include <cstdint>
#include <set>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "cardguess/game.hpp"
#include "cardguess/stats_math.hpp"

namespace cardguess {

struct TieCounts {
  std::vector<int> thresholds;  // T_0 .. T_m
  std::vector<int> w_tilde;     // W~_1 .. W~_m, stored at [0, m)

  int max_mult() const noexcept { return static_cast<int>(w_tilde.size()); }
  friend bool operator==(const TieCounts&, const TieCounts&) = default;
};

/// Per-type counts among the bottom t cards.
inline std::vector<int> suffix_counts(const Deck& deck, const Arrangement& arrangement, int t) {
  if (t < 0 || static_cast<std::size_t>(t) > arrangement.size()) throw std::out_of_range("suffix length out of range");
  std::vector<int> counts(static_cast<std::size_t>(deck.num_types()), 0);
  for (int b = 1; b <= t; ++b) ++counts[arrangement.from_bottom(static_cast<std::size_t>(b))];
  return counts;
}

/// W_{j,t}.
inline std::uint64_t w_count(const Deck& deck, const Arrangement& arrangement, int j, int t) {
  if (j < 0 || j > deck.max_mult()) throw std::out_of_range("tie order j out of range");
  std::uint64_t w = 0;
  for (int c : suffix_counts(deck, arrangement, t)) w += static_cast<std::uint64_t>(binomial(c, j + 1) + 0.5);
  return w;
}

/// T_j.
inline int t_threshold(const Deck& deck, const Arrangement& arrangement, int j) {
  if (j < 0 || j > deck.max_mult()) throw std::out_of_range("tie order j out of range");
  if (j == 0) return 0;
  std::vector<int> counts(static_cast<std::size_t>(deck.num_types()), 0);
  const int n = static_cast<int>(arrangement.size());
  for (int b = 1; b <= n; ++b) {
    if (++counts[arrangement.from_bottom(static_cast<std::size_t>(b))] > j) return b - 1;
  }
  return n;
}

/// All T_j and W~_j in one bottom-up pass.
inline TieCounts tie_counts(const Deck& deck, const Arrangement& arrangement) {
  const int m = deck.max_mult();
  const int n = static_cast<int>(arrangement.size());
  TieCounts tc;
  tc.thresholds.assign(static_cast<std::size_t>(m) + 1, 0);
  tc.w_tilde.assign(static_cast<std::size_t>(m), 0);
  std::vector<int> counts(static_cast<std::size_t>(deck.num_types()), 0);
  std::vector<int> with_count(static_cast<std::size_t>(m) + 2, 0);  // types at each tally
  int top = 0;
  for (int b = 1; b <= n; ++b) {
    int& c = counts[arrangement.from_bottom(static_cast<std::size_t>(b))];
    if (c == top && top > 0) {
      tc.thresholds[static_cast<std::size_t>(top)] = b - 1;
      tc.w_tilde[static_cast<std::size_t>(top) - 1] = with_count[static_cast<std::size_t>(top)];
    }
    if (c > 0) --with_count[static_cast<std::size_t>(c)];
    ++c;
    ++with_count[static_cast<std::size_t>(c)];
    top = std::max(top, c);
  }
  tc.thresholds[static_cast<std::size_t>(m)] = n;
  tc.w_tilde[static_cast<std::size_t>(m) - 1] = with_count[static_cast<std::size_t>(m)];
  return tc;
}

using RunSet = std::set<std::pair<int, int>>;

/// Distinct (j, s) configurations visited by a game.
inline RunSet runs(const GameTrace& trace) {
  RunSet out;
  for (const auto& step : trace.steps) out.emplace(step.max_mult_before, step.num_tied_before);
  return out;
}

/// {(j, s) : 1 <= j <= m, 1 <= s <= W~_j}.
inline RunSet expected_runs(std::span<const int> w_tilde) {
  RunSet out;
  for (std::size_t j = 0; j < w_tilde.size(); ++j) {
    for (int s = 1; s <= w_tilde[j]; ++s) out.emplace(static_cast<int>(j) + 1, s);
  }
  return out;
}

/// Draws sum_j sum_{s <= W~_j} Bernoulli(1/s).
inline int sample_decomposed_score(std::span<const int> w_tilde, RngStream& rng) {
  int score = 0;
  for (int w : w_tilde) {
    if (w < 1) throw std::invalid_argument("tie counts must be >= 1");
    score += 1;
    for (int s = 2; s <= w; ++s) score += rng.bernoulli(1.0 / s) ? 1 : 0;
  }
  return score;
}

inline int sample_decomposed_score(const TieCounts& tc, RngStream& rng) {
  return sample_decomposed_score(std::span<const int>(tc.w_tilde), rng);
}

}  // namespace cardguess
