#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cardguess {

/// Card type index, 0-based internally. Text formats use 1-based labels.
using CardType = std::uint32_t;

struct InvalidDeck : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Multiset of card types: type i occurs multiplicities()[i] times.
class Deck {
 public:
  explicit Deck(std::vector<int> multiplicities) : mult_(std::move(multiplicities)) {
    if (mult_.empty()) throw InvalidDeck("deck must contain at least one card type");
    for (std::size_t i = 0; i < mult_.size(); ++i) {
      if (mult_[i] < 1) {
        throw InvalidDeck("invalid multiplicity " + std::to_string(mult_[i]) + " for type " +
                          std::to_string(i + 1) + " (must be >= 1)");
      }
    }
    total_ = std::accumulate(mult_.begin(), mult_.end(), 0);
    max_mult_ = *std::max_element(mult_.begin(), mult_.end());
    num_at_max_ = static_cast<int>(std::count(mult_.begin(), mult_.end(), max_mult_));
  }

  static Deck balanced(int num_types, int multiplicity) {
    if (num_types < 1) throw InvalidDeck("balanced deck needs n >= 1");
    return Deck(std::vector<int>(static_cast<std::size_t>(num_types), multiplicity));
  }

  const std::vector<int>& multiplicities() const noexcept { return mult_; }
  int multiplicity(CardType type) const { return mult_.at(type); }
  int num_types() const noexcept { return static_cast<int>(mult_.size()); }
  int total() const noexcept { return total_; }
  int max_mult() const noexcept { return max_mult_; }
  /// Number of types attaining max_mult (eps * n).
  int num_at_max() const noexcept { return num_at_max_; }
  double eps() const noexcept { return static_cast<double>(num_at_max_) / num_types(); }
  bool is_balanced() const noexcept { return num_at_max_ == num_types(); }

  /// Cards in type order: type 0 repeated m_0 times, then type 1, ...
  std::vector<CardType> expanded() const {
    std::vector<CardType> cards;
    cards.reserve(static_cast<std::size_t>(total_));
    for (std::size_t i = 0; i < mult_.size(); ++i) cards.insert(cards.end(), mult_[i], static_cast<CardType>(i));
    return cards;
  }

  friend bool operator==(const Deck& a, const Deck& b) { return a.mult_ == b.mult_; }

 private:
  std::vector<int> mult_;
  int total_ = 0;
  int max_mult_ = 0;
  int num_at_max_ = 0;
};

namespace detail {

inline std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

inline long long parse_integer(std::string_view token, std::string_view what) {
  token = trim(token);
  long long value = 0;
  const auto* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (token.empty() || ec != std::errc{} || ptr != end) {
    throw InvalidDeck("malformed " + std::string(what) + " '" + std::string(token) + "'");
  }
  return value;
}

}  // namespace detail

/// Parses "3,3,2" (explicit multiplicities) or "n=100,m=3" (balanced).
inline Deck parse_deck_spec(std::string_view spec) {
  spec = detail::trim(spec);
  if (spec.empty()) throw InvalidDeck("empty deck description");
  if (spec.find('=') != std::string_view::npos) {
    long long n = -1, m = -1;
    for (auto part : detail::split(spec, ',')) {
      part = detail::trim(part);
      const auto eq = part.find('=');
      if (eq == std::string_view::npos) throw InvalidDeck("malformed balanced deck spec '" + std::string(spec) + "'");
      const auto key = detail::trim(part.substr(0, eq));
      const auto value = detail::parse_integer(part.substr(eq + 1), "deck parameter");
      if (key == "n") {
        n = value;
      } else if (key == "m") {
        m = value;
      } else {
        throw InvalidDeck("unknown balanced deck key '" + std::string(key) + "'");
      }
    }
    if (n < 1) throw InvalidDeck("balanced deck needs n >= 1");
    if (m < 1) throw InvalidDeck("invalid multiplicity " + std::to_string(m) + " (must be >= 1)");
    if (n * m > 100'000'000) throw InvalidDeck("deck too large");
    return Deck::balanced(static_cast<int>(n), static_cast<int>(m));
  }
  std::vector<int> mult;
  for (auto part : detail::split(spec, ',')) {
    const auto value = detail::parse_integer(part, "multiplicity");
    if (value < 1 || value > 1'000'000) {
      throw InvalidDeck("invalid multiplicity " + std::to_string(value) + " for type " +
                        std::to_string(mult.size() + 1) + " (must be >= 1)");
    }
    mult.push_back(static_cast<int>(value));
  }
  return Deck(std::move(mult));
}

inline std::string to_spec(const Deck& deck) {
  if (deck.is_balanced() && deck.num_types() > 8) {
    return "n=" + std::to_string(deck.num_types()) + ",m=" + std::to_string(deck.max_mult());
  }
  std::string out;
  for (int m : deck.multiplicities()) {
    if (!out.empty()) out += ',';
    out += std::to_string(m);
  }
  return out;
}

}  // namespace cardguess
