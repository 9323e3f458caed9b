#pragma once

// Uniform shuffles and the complete-feedback guessing game under the greedy
// strategy (always name a type with the most cards left).

#include <algorithm>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cardguess/deck.hpp"
#include "cardguess/rng.hpp"

namespace cardguess {

struct GameOver : std::logic_error {
  using std::logic_error::logic_error;
};

enum class TieRule { uniform, lowest_index };

/// One full ordering of a deck, stored top to bottom: cards[0] is revealed
/// first. Position b counted from the bottom (1-based) is cards[size - b].
struct Arrangement {
  std::vector<CardType> cards;

  std::size_t size() const noexcept { return cards.size(); }
  CardType from_top(std::size_t index) const { return cards[index]; }
  CardType from_bottom(std::size_t b) const { return cards[cards.size() - b]; }

  static Arrangement from_bottom_up(std::vector<CardType> bottom_up) {
    std::reverse(bottom_up.begin(), bottom_up.end());
    return Arrangement{std::move(bottom_up)};
  }

  friend bool operator==(const Arrangement&, const Arrangement&) = default;
};

/// Throws InvalidDeck unless `arrangement` holds exactly m_i cards of type i.
inline void validate(const Deck& deck, const Arrangement& arrangement) {
  std::vector<int> seen(static_cast<std::size_t>(deck.num_types()), 0);
  for (CardType c : arrangement.cards) {
    if (c >= seen.size()) throw InvalidDeck("arrangement references unknown type " + std::to_string(c + 1));
    ++seen[c];
  }
  if (seen != deck.multiplicities()) throw InvalidDeck("arrangement does not match deck multiplicities");
}

/// In-place Fisher-Yates shuffle.
template <typename T>
void shuffle(std::span<T> items, RngStream& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.uniform_below(i));
    std::swap(items[i - 1], items[j]);
  }
}

inline Arrangement uniform_arrangement(const Deck& deck, RngStream& rng) {
  Arrangement a{deck.expanded()};
  shuffle(std::span<CardType>(a.cards), rng);
  return a;
}

/// Greedy guess from per-type remaining counts.
inline CardType greedy_guess(std::span<const int> remaining, TieRule rule, RngStream& rng) {
  const auto top = std::max_element(remaining.begin(), remaining.end());
  if (top == remaining.end() || *top <= 0) throw GameOver("no cards remain");
  if (rule == TieRule::lowest_index) return static_cast<CardType>(top - remaining.begin());
  const auto tied = static_cast<std::uint64_t>(std::count(remaining.begin(), remaining.end(), *top));
  auto pick = rng.uniform_below(tied);
  for (std::size_t i = 0; i < remaining.size(); ++i) {
    if (remaining[i] == *top && pick-- == 0) return static_cast<CardType>(i);
  }
  throw std::logic_error("unreachable");
}

struct Step {
  CardType guessed;
  CardType revealed;
  bool correct;
  int max_mult_before;  // j
  int num_tied_before;  // s
};

struct GameTrace {
  std::vector<Step> steps;
  int score = 0;
};

/// Incremental game state. Types are kept in buckets by remaining count so
/// the maximal multiplicity, its tie count, and a uniform tied guess are O(1).
class GreedyGame {
 public:
  explicit GreedyGame(const Deck& deck)
      : deck_(deck),
        count_(static_cast<std::size_t>(deck.num_types())),
        slot_(static_cast<std::size_t>(deck.num_types())),
        bucket_(static_cast<std::size_t>(deck.max_mult()) + 1) {
    reset();
  }

  void reset() {
    for (auto& b : bucket_) b.clear();
    const auto& mult = deck_.multiplicities();
    for (std::size_t i = 0; i < mult.size(); ++i) {
      count_[i] = mult[i];
      auto& b = bucket_[static_cast<std::size_t>(mult[i])];
      slot_[i] = static_cast<CardType>(b.size());
      b.push_back(static_cast<CardType>(i));
    }
    jmax_ = deck_.max_mult();
    remaining_ = deck_.total();
  }

  int max_mult() const noexcept { return jmax_; }
  int num_tied() const noexcept { return jmax_ > 0 ? static_cast<int>(bucket_[static_cast<std::size_t>(jmax_)].size()) : 0; }
  int remaining() const noexcept { return remaining_; }
  int count(CardType type) const { return count_[type]; }

  CardType guess(TieRule rule, RngStream& rng) const {
    if (jmax_ == 0) throw GameOver("no cards remain");
    const auto& tied = bucket_[static_cast<std::size_t>(jmax_)];
    if (tied.size() == 1) return tied.front();
    if (rule == TieRule::lowest_index) return *std::min_element(tied.begin(), tied.end());
    return tied[static_cast<std::size_t>(rng.uniform_below(tied.size()))];
  }

  void reveal(CardType type) {
    int& c = count_[type];
    if (c <= 0) throw InvalidDeck("revealed type " + std::to_string(type + 1) + " has no cards left");
    auto& from = bucket_[static_cast<std::size_t>(c)];
    const CardType moved = from.back();
    from[slot_[type]] = moved;
    slot_[moved] = slot_[type];
    from.pop_back();
    --c;
    if (c > 0) {
      auto& to = bucket_[static_cast<std::size_t>(c)];
      slot_[type] = static_cast<CardType>(to.size());
      to.push_back(type);
    }
    --remaining_;
    while (jmax_ > 0 && bucket_[static_cast<std::size_t>(jmax_)].empty()) --jmax_;
  }

  Step step(CardType revealed, TieRule rule, RngStream& rng) {
    Step s{guess(rule, rng), revealed, false, jmax_, num_tied()};
    s.correct = s.guessed == revealed;
    reveal(revealed);
    return s;
  }

 private:
  Deck deck_;
  std::vector<int> count_;
  std::vector<CardType> slot_;
  std::vector<std::vector<CardType>> bucket_;
  int jmax_ = 0;
  int remaining_ = 0;
};

/// Plays the arrangement top to bottom with greedy guesses.
inline GameTrace play(const Deck& deck, const Arrangement& arrangement, TieRule rule, RngStream& rng) {
  validate(deck, arrangement);
  GreedyGame game(deck);
  GameTrace trace;
  trace.steps.reserve(arrangement.size());
  for (CardType card : arrangement.cards) {
    trace.steps.push_back(game.step(card, rule, rng));
    trace.score += trace.steps.back().correct ? 1 : 0;
  }
  return trace;
}

}  // namespace cardguess
