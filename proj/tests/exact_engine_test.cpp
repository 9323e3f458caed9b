#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <vector>

#include "cardguess/exact_engine.hpp"

using namespace cardguess;

namespace {

constexpr double kTol = 1e-12;

const std::vector<Deck> kCatalog{Deck({1, 1}), Deck({2, 2}), Deck({2, 1}), Deck({1, 1, 1}),
                                 Deck({2, 2, 2}), Deck({3, 3, 2}), Deck({1, 1, 1, 1})};

// Exact rationals for the enumeration oracle below.
struct Fraction {
  long long num = 0, den = 1;
  Fraction(long long n = 0, long long d = 1) : num(n), den(d) { normalize(); }
  void normalize() {
    const long long g = std::gcd(num, den);
    if (g > 1) num /= g, den /= g;
  }
  Fraction operator+(const Fraction& o) const { return {num * o.den + o.num * den, den * o.den}; }
  Fraction operator*(const Fraction& o) const { return {num * o.num, den * o.den}; }
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

// Test-only oracle: for every distinct arrangement, play greedy with every
// tie-break choice weighted 1/s, using rationals and direct per-type counts.
std::map<int, Fraction> rational_greedy_law(const std::vector<int>& mult) {
  std::vector<int> cards;
  for (std::size_t i = 0; i < mult.size(); ++i) cards.insert(cards.end(), mult[i], static_cast<int>(i));
  std::map<int, Fraction> law;
  long long arrangements = 0;
  do {
    ++arrangements;
    std::map<int, Fraction> per{{0, Fraction(1)}};
    std::vector<int> left = mult;
    for (int card : cards) {
      const int top = *std::max_element(left.begin(), left.end());
      const long long tied = std::count(left.begin(), left.end(), top);
      std::map<int, Fraction> next;
      for (const auto& [k, p] : per) {
        if (left[static_cast<std::size_t>(card)] == top) {
          next[k + 1] = next[k + 1] + p * Fraction(1, tied);
          next[k] = next[k] + p * Fraction(tied - 1, tied);
        } else {
          next[k] = next[k] + p;
        }
      }
      per.swap(next);
      --left[static_cast<std::size_t>(card)];
    }
    for (const auto& [k, p] : per) law[k] = law[k] + p;
  } while (std::next_permutation(cards.begin(), cards.end()));
  for (auto& [k, p] : law) p = p * Fraction(1, arrangements);
  return law;
}

void expect_same_pmf(const Pmf& a, const Pmf& b, double tol, const std::string& label) {
  const int lo = std::min(a.lo, b.lo), hi = std::max(a.hi(), b.hi());
  for (int k = lo; k <= hi; ++k) EXPECT_NEAR(a[k], b[k], tol) << label << " score " << k;
}

}  // namespace

TEST(ExactPmf, AllDistinctPair) {
  const auto pmf = exact_pmf(Deck({1, 1}));
  EXPECT_NEAR(pmf[1], 0.5, kTol);
  EXPECT_NEAR(pmf[2], 0.5, kTol);
  EXPECT_NEAR(pmf.total(), 1.0, kTol);
}

TEST(ExactPmf, SingleTypeIsPointMass) {
  for (int m = 1; m <= 6; ++m) {
    const auto pmf = exact_pmf(Deck({m}));
    EXPECT_EQ(pmf.lo, m);
    EXPECT_EQ(pmf.hi(), m);
    EXPECT_NEAR(pmf[m], 1.0, kTol);
  }
}

TEST(ExactPmf, TwoTwoMean) { EXPECT_NEAR(exact_pmf(Deck({2, 2})).mean(), 17.0 / 6.0, kTol); }

TEST(ExactPmf, MatchesRationalOracleOnCatalog) {
  for (const Deck& deck : kCatalog) {
    Pmf oracle{0, std::vector<double>(static_cast<std::size_t>(deck.total()) + 1, 0.0)};
    for (const auto& [k, p] : rational_greedy_law(deck.multiplicities())) oracle.p[static_cast<std::size_t>(k)] = p.value();
    expect_same_pmf(exact_pmf(deck), oracle, kTol, to_spec(deck));
  }
}

TEST(ExactPmf, AllDistinctMeanIsHarmonic) {
  // one copy of each of 30 types: the score is sum_s Bernoulli(1/s)
  const auto pmf = exact_pmf(Deck(std::vector<int>(30, 1)));
  EXPECT_NEAR(pmf.mean(), harmonic(30), 1e-12);
  EXPECT_NEAR(pmf.variance(), harmonic(30) - harmonic2(30), 1e-12);
}

TEST(ExactPmf, BudgetGuard) {
  try {
    exact_pmf(Deck::balanced(40, 2));
    FAIL() << "expected ResourceError";
  } catch (const ResourceError& e) {
    EXPECT_NE(std::string(e.what()).find("profiles"), std::string::npos) << e.what();
  }
  EXPECT_NO_THROW(exact_pmf(Deck::balanced(40, 2), ExactOptions{100}));
}

TEST(BruteForce, AgreesWithProfileRecursion) {
  expect_same_pmf(brute_force_pmf(Deck({2, 2})), exact_pmf(Deck({2, 2})), kTol, "2,2");
}

TEST(BruteForce, AllDistinctTriple) {
  const auto pmf = brute_force_pmf(Deck({1, 1, 1}));
  EXPECT_NEAR(pmf[1], 1.0 / 3.0, kTol);
  EXPECT_NEAR(pmf[2], 1.0 / 2.0, kTol);
  EXPECT_NEAR(pmf[3], 1.0 / 6.0, kTol);
}

TEST(BruteForce, NormalizedWithinScoreBounds) {
  const auto pmf = brute_force_pmf(Deck({3, 3, 2}));
  EXPECT_NEAR(pmf.total(), 1.0, kTol);
  EXPECT_GE(pmf.lo, 3);
  EXPECT_LE(pmf.hi(), 8);
}

TEST(BruteForce, SizeGuard) {
  EXPECT_THROW(brute_force_pmf(Deck(std::vector<int>(13, 1))), ResourceError);
  EXPECT_THROW(optimal_value(Deck(std::vector<int>(13, 1))), ResourceError);
  EXPECT_THROW(decomposition_pmf(Deck(std::vector<int>(13, 1))), ResourceError);
}

TEST(BruteForce, TieRuleInvariance) {
  for (const Deck& deck : kCatalog) {
    expect_same_pmf(brute_force_pmf(deck, TieRule::uniform), brute_force_pmf(deck, TieRule::lowest_index), kTol,
                    to_spec(deck));
  }
}

TEST(OptimalValue, SmallDecks) {
  EXPECT_NEAR(optimal_value(Deck({2, 2})), 17.0 / 6.0, kTol);
  EXPECT_NEAR(optimal_value(Deck({1, 1})), 1.5, kTol);
  for (int m = 1; m <= 5; ++m) EXPECT_NEAR(optimal_value(Deck({m})), m, kTol);
}

TEST(OracleEquivalence, CatalogAgreesPointwise) {
  for (const Deck& deck : kCatalog) {
    const auto exact = exact_pmf(deck);
    expect_same_pmf(exact, brute_force_pmf(deck), kTol, to_spec(deck));
    expect_same_pmf(exact, decomposition_pmf(deck), kTol, to_spec(deck));
    EXPECT_NEAR(exact.mean(), optimal_value(deck), kTol) << to_spec(deck);
    EXPECT_NEAR(exact.total(), 1.0, kTol);
    EXPECT_GE(exact.lo, deck.max_mult());
  }
}

TEST(OracleEquivalence, LargerUnbalancedDecks) {
  for (const Deck& deck : {Deck({3, 1, 2, 1}), Deck({4, 2, 1}), Deck({2, 2, 1, 1, 1, 1})}) {
    const auto exact = exact_pmf(deck);
    expect_same_pmf(exact, brute_force_pmf(deck), kTol, to_spec(deck));
    expect_same_pmf(exact, decomposition_pmf(deck), kTol, to_spec(deck));
    EXPECT_NEAR(exact.mean(), optimal_value(deck), kTol);
  }
}

TEST(ConditionalPmf, Examples) {
  const auto a = conditional_pmf(std::vector<int>{1, 2});
  EXPECT_NEAR(a[2], 0.5, kTol);
  EXPECT_NEAR(a[3], 0.5, kTol);
  EXPECT_NEAR(a.total(), 1.0, kTol);

  const auto ones = conditional_pmf(std::vector<int>(5, 1));
  EXPECT_EQ(ones.lo, 5);
  EXPECT_EQ(ones.hi(), 5);

  const auto two = conditional_pmf(std::vector<int>{2});
  EXPECT_NEAR(two[1], 0.5, kTol);
  EXPECT_NEAR(two[2], 0.5, kTol);

  EXPECT_THROW(conditional_pmf(std::vector<int>{0}), std::invalid_argument);
}

TEST(ConditionalMoments, Examples) {
  const auto a = conditional_moments(std::vector<int>{1, 2});
  EXPECT_NEAR(a.mu_prime, 2.5, kTol);
  EXPECT_NEAR(a.sigma2_prime, 0.25, kTol);
  const auto one = conditional_moments(std::vector<int>{1});
  EXPECT_NEAR(one.mu_prime, 1.0, kTol);
  EXPECT_NEAR(one.sigma2_prime, 0.0, kTol);
  EXPECT_NEAR(conditional_moments(std::vector<int>{2, 2, 2}).mu_prime, 4.5, kTol);
}

TEST(ConditionalMoments, ConsistentWithPmfAndBounds) {
  const HarmonicTable table(500);
  RngStream rng(6);
  for (int trial = 0; trial < 60; ++trial) {
    std::vector<int> w;
    const int m = 1 + static_cast<int>(rng.uniform_below(4));
    for (int j = 0; j < m; ++j) w.push_back(1 + static_cast<int>(rng.uniform_below(trial < 30 ? 12 : 400)));
    const auto cm = conditional_moments(w);
    const auto law = conditional_pmf(w);
    EXPECT_NEAR(law.mean(), cm.mu_prime, 1e-9);
    EXPECT_NEAR(law.variance(), cm.sigma2_prime, 1e-9);
    const auto tab = conditional_moments(w, table);
    EXPECT_NEAR(tab.mu_prime, cm.mu_prime, 1e-12);
    EXPECT_NEAR(tab.sigma2_prime, cm.sigma2_prime, 1e-12);
    EXPECT_LT(cm.sigma2_prime, cm.mu_prime);
    EXPECT_LE(cm.mu_prime - cm.sigma2_prime, m * std::numbers::pi * std::numbers::pi / 6 + 1e-12);
  }
}

TEST(DecompositionPmf, Examples) {
  expect_same_pmf(decomposition_pmf(Deck({2, 2})), exact_pmf(Deck({2, 2})), kTol, "2,2");
  expect_same_pmf(decomposition_pmf(Deck({1, 1, 1})), brute_force_pmf(Deck({1, 1, 1})), kTol, "1,1,1");
  const auto single = decomposition_pmf(Deck({4}));
  EXPECT_EQ(single.lo, 4);
  EXPECT_NEAR(single[4], 1.0, kTol);
}

TEST(Profile, ReachableStatesAreConsistent) {
  const Profile p = Profile::of(Deck({3, 3, 2, 1}));
  EXPECT_EQ(p.a, (std::vector<int>{1, 1, 2}));
  EXPECT_EQ(p.remaining(), 9);
  EXPECT_EQ(p.top(), 3);
  const Profile q = p.after_reveal(3);
  EXPECT_EQ(q.a, (std::vector<int>{1, 2, 1}));
  EXPECT_EQ(q.remaining(), 8);
  EXPECT_EQ((Profile{std::vector<int>{0, 0}}.top()), 0);
}

TEST(ArrangementCount, Multinomial) {
  EXPECT_EQ(arrangement_count(Deck({2, 2})), 6);
  EXPECT_EQ(arrangement_count(Deck({3, 3, 2})), 560);
  long long seen = 0;
  for_each_arrangement(Deck({3, 3, 2}), [&](const Arrangement&) { ++seen; });
  EXPECT_EQ(seen, 560);
}
