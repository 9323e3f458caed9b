#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "cardguess/harness.hpp"
#include "cardguess/report_io.hpp"

using namespace cardguess;

TEST(RunMc, TwoTwoMeanWithinNoise) {
  const auto rep = run_mc(Deck({2, 2}), 200000, 11);
  EXPECT_NEAR(rep.mean, 17.0 / 6.0, 4 * rep.standard_error());
  EXPECT_EQ(rep.reps, 200000);
  EXPECT_EQ(rep.deck, "2,2");
}

TEST(RunMc, SingleCardDeck) {
  const auto rep = run_mc(Deck({1}), 1000, 3);
  EXPECT_EQ(rep.histogram.size(), 1u);
  EXPECT_EQ(rep.histogram.at(1), 1000);
  EXPECT_EQ(rep.var, 0.0);
  EXPECT_FALSE(rep.ks_gap.has_value());
}

TEST(RunMc, SingleTypeDeckScoresEveryCard) {
  const auto rep = run_mc(Deck({5}), 500, 3);
  EXPECT_EQ(rep.histogram.at(5), 500);
}

TEST(RunMc, HistogramConsistency) {
  const Deck deck({3, 3, 2, 1});
  const auto rep = run_mc(deck, 5000, 21);
  std::int64_t total = 0;
  double sum = 0;
  for (const auto& [k, c] : rep.histogram) {
    total += c;
    sum += static_cast<double>(k) * static_cast<double>(c);
    EXPECT_GE(k, deck.max_mult());
    EXPECT_LE(k, deck.total());
  }
  EXPECT_EQ(total, 5000);
  EXPECT_NEAR(sum / 5000, rep.mean, 1e-12);
  ASSERT_TRUE(rep.ks_gap.has_value());
  EXPECT_GT(*rep.ks_gap, 0.0);
  EXPECT_LT(*rep.ks_gap, 1.0);
}

TEST(RunMc, AgreesWithExactLawOnCatalog) {
  for (const Deck& deck : {Deck({2, 2, 2}), Deck({3, 3, 2}), Deck({4, 1, 1})}) {
    const auto rep = run_mc(deck, 100000, 5);
    const auto exact = exact_pmf(deck);
    EXPECT_NEAR(rep.mean, exact.mean(), 4 * std::sqrt(exact.variance() / 100000)) << to_spec(deck);
  }
}

TEST(RunMc, AllDistinctMeanIsHarmonic) {
  const int n = 50;
  const auto rep = run_mc(Deck::balanced(n, 1), 40000, 9);
  EXPECT_NEAR(rep.mean, harmonic(n), 4 * rep.standard_error());
}

TEST(Determinism, WorkersDoNotChangeReports) {
  const Deck deck = Deck::balanced(40, 3);
  const auto one = to_json(run_mc(deck, 3000, 99, 1)).dump();
  EXPECT_EQ(one, to_json(run_mc(deck, 3000, 99, 8)).dump());
  EXPECT_EQ(one, to_json(run_mc(deck, 3000, 99, 3)).dump());
  EXPECT_NE(one, to_json(run_mc(deck, 3000, 100, 1)).dump());

  EXPECT_EQ(to_json(poisson_experiment(deck, 1, 6, 2000, 4, 1)).dump(), to_json(poisson_experiment(deck, 1, 6, 2000, 4, 5)).dump());
  EXPECT_EQ(to_json(variance_decomposition(deck, 2000, 4, 1)).dump(), to_json(variance_decomposition(deck, 2000, 4, 6)).dump());
}

TEST(Piggyback, TieCountsMatchBottomUpDefinition) {
  const Deck deck({3, 3, 2, 2, 1, 3});
  const std::uint64_t seed = 1234;
  const auto data = run_replicates(deck, 300, seed, 2);
  for (std::size_t r = 0; r < 300; ++r) {
    RngStream rng = RngStream(seed).substream(r);
    auto cards = deck.expanded();
    shuffle(std::span<CardType>(cards), rng);
    const auto tc = tie_counts(deck, Arrangement{cards});
    const auto row = data.tie_row(r);
    ASSERT_EQ(std::vector<int>(row.begin(), row.end()), tc.w_tilde) << r;
    ASSERT_GE(data.scores[r], deck.max_mult());
  }
}

TEST(Clt, IncrementsAndSeeds) {
  const std::vector<int> ns{20, 40, 80};
  const auto res = clt_experiment(2, ns, 4000, 17);
  ASSERT_EQ(res.reports.size(), 3u);
  ASSERT_EQ(res.increments.size(), 2u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(res.reports[i].num_types, ns[i]);
    EXPECT_EQ(res.reports[i].seed, seed_for_size(17, ns[i]));
  }
  const auto& inc = res.increments[1];
  EXPECT_EQ(inc.n_from, 40);
  EXPECT_EQ(inc.n_to, 80);
  EXPECT_NEAR(inc.observed, res.reports[2].mean - res.reports[1].mean, 1e-12);
  EXPECT_NEAR(inc.predicted, 1.5 * std::log(2.0), 1e-12);
  EXPECT_NEAR(inc.pooled_se, std::hypot(res.reports[1].standard_error(), res.reports[2].standard_error()), 1e-12);
  // a clt run is the same as the individual simulations it is made of
  EXPECT_EQ(to_json(res.reports[0]).dump(), to_json(run_mc(Deck::balanced(20, 2), 4000, seed_for_size(17, 20))).dump());
}

TEST(Poisson, ShortSuffixHasNoTies) {
  const auto rep = poisson_experiment(Deck::balanced(30, 3), 1, 1, 500, 2);
  EXPECT_EQ(rep.histogram.size(), 1u);
  EXPECT_EQ(rep.histogram.at(0), 500);
  EXPECT_EQ(rep.lambda, 0.0);
  EXPECT_NEAR(rep.tv, 0.0, 1e-15);
}

TEST(Poisson, SamplerMatchesWCount) {
  // the partial shuffle must draw the same statistic as w_count on full arrangements
  const Deck deck({3, 3, 3, 2});
  const int j = 1, t = 5, reps = 60000;
  const auto rep = poisson_experiment(deck, j, t, reps, 8, 1, 0);
  double mean = 0;
  for (const auto& [k, c] : rep.histogram) mean += static_cast<double>(k) * static_cast<double>(c) / reps;

  double exact = 0, second = 0;
  for_each_arrangement(deck, [&](const Arrangement& a) {
    const double w = static_cast<double>(w_count(deck, a, j, t));
    exact += w;
    second += w * w;
  });
  const double count = static_cast<double>(arrangement_count(deck));
  exact /= count;
  second /= count;
  EXPECT_NEAR(exact, rep.lambda, 1e-12);
  EXPECT_NEAR(mean, exact, 4 * std::sqrt((second - exact * exact) / reps));
}

TEST(Poisson, RejectsBadArguments) {
  EXPECT_THROW(poisson_experiment(Deck({2, 2}), 2, 1, 10, 0), std::invalid_argument);
  EXPECT_THROW(poisson_experiment(Deck({2, 2}), 1, 5, 10, 0), std::invalid_argument);
}

TEST(VarianceDecomposition, ExactIdentityOnSmallDeck) {
  // Var(S) = Var(mu') + E[sigma'^2] computed by enumerating arrangements
  for (const Deck& deck : {Deck({2, 2}), Deck({3, 3, 2}), Deck({2, 2, 1, 1})}) {
    double m1 = 0, m2 = 0, s2 = 0;
    for_each_arrangement(deck, [&](const Arrangement& a) {
      const auto cm = conditional_moments(tie_counts(deck, a).w_tilde);
      m1 += cm.mu_prime;
      m2 += cm.mu_prime * cm.mu_prime;
      s2 += cm.sigma2_prime;
    });
    const double count = static_cast<double>(arrangement_count(deck));
    m1 /= count;
    const double total = (m2 / count - m1 * m1) + s2 / count;
    const auto exact = exact_pmf(deck);
    EXPECT_NEAR(m1, exact.mean(), 1e-12) << to_spec(deck);
    EXPECT_NEAR(total, exact.variance(), 1e-12) << to_spec(deck);
  }
}

TEST(VarianceDecomposition, TwoTwoResidualCoversZero) {
  const auto vd = variance_decomposition(Deck({2, 2}), 50000, 13);
  EXPECT_TRUE(vd.residual_ci.contains(0.0)) << vd.residual_ci.lo << " " << vd.residual_ci.hi;
  EXPECT_NEAR(vd.var_score, exact_pmf(Deck({2, 2})).variance(), 0.02);
  EXPECT_LE(vd.residual_ci.lo, vd.residual);
  EXPECT_GE(vd.residual_ci.hi, vd.residual);
}

TEST(VarianceDecomposition, SingleTypeIsDegenerate) {
  const auto vd = variance_decomposition(Deck({4}), 200, 1);
  EXPECT_EQ(vd.var_score, 0.0);
  EXPECT_EQ(vd.var_mu_prime, 0.0);
  EXPECT_EQ(vd.mean_sigma2_prime, 0.0);
  EXPECT_EQ(vd.residual, 0.0);
}

TEST(ConditionalClt, DegenerateAndRegularEntries) {
  const std::vector<std::vector<int>> list{{1}, {1, 1, 1}, {4}, {16, 16}};
  const auto gaps = conditional_clt_check(list);
  ASSERT_EQ(gaps.size(), 4u);
  EXPECT_TRUE(gaps[0].degenerate());
  EXPECT_TRUE(gaps[1].degenerate());
  EXPECT_NEAR(gaps[1].mu_prime, 3.0, 1e-15);
  ASSERT_FALSE(gaps[2].degenerate());
  EXPECT_GT(*gaps[2].gap, *gaps[3].gap);
  EXPECT_NEAR(gaps[3].mu_prime, 2 * harmonic(16), 1e-12);
}

TEST(Bootstrap, PercentileInterval) {
  std::vector<double> v(101);
  std::iota(v.begin(), v.end(), 0.0);
  const auto ci = detail::percentile_interval(v, 0.98);
  EXPECT_NEAR(ci.lo, 1.0, 1e-12);
  EXPECT_NEAR(ci.hi, 99.0, 1e-12);
}
