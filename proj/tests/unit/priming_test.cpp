// Copyright 2026 The SOUP Authors
// SPDX-License-Identifier: Apache-2.0

#include "soup/priming.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "fixtures.hpp"
#include "soup/error.hpp"
#include "soup/mock.hpp"

namespace soup {
namespace {

Example ex(std::string id, std::string text) { return Example{std::move(id), std::move(text), std::nullopt, std::nullopt}; }

std::string words(std::size_t n) {
  std::string s;
  for (std::size_t i = 0; i < n; ++i) s += (i ? " w" : "w") + std::to_string(i);
  return s;
}

TEST(Weight, Examples) {
  const Neighbor n{ex("a", "a"), 0.83, 0};
  EXPECT_EQ(weight(WeightingKind::kUniform, n), 1.0);
  EXPECT_EQ(weight(WeightingKind::kSimilarity, n), 0.83);
  EXPECT_EQ(weight(WeightingKind::kSimilarity, Neighbor{ex("b", "b"), -0.2, 0}), 0.0);
}

TEST(ParseEnums, RoundTrip) {
  EXPECT_EQ(parse_strategy("boc"), Strategy::kBoc);
  EXPECT_EQ(parse_strategy(to_string(Strategy::kConcat)), Strategy::kConcat);
  EXPECT_EQ(parse_weighting("similarity"), WeightingKind::kSimilarity);
  EXPECT_THROW(parse_weighting("softmax"), ConfigError);
  EXPECT_THROW(parse_strategy("knn"), ConfigError);
}

TEST(BocContext, WalkthroughString) {
  const auto task = *find_builtin_task("imdb");
  const Neighbor n{ex("n1", "Not worth the time!"), 0.96, 0};
  const auto request = build_boc_context(task, n, ex("x", "Not worth watching."), 120);
  ASSERT_EQ(request.parts.size(), 2u);
  EXPECT_EQ(mock::join_context(request),
            "Not worth the time! The movie is bad. Not worth watching. The movie is [MASK].");
  EXPECT_EQ(request.parts[0].truncate_to, 120u);
  EXPECT_EQ(request.candidates, (std::vector<std::string>{"bad", "good"}));
}

TEST(BocContext, YelpCandidates) {
  const auto task = *find_builtin_task("yelp");
  const auto request = build_boc_context(task, Neighbor{ex("n", "Nice."), 1.0, 3}, ex("x", "Ok."), std::nullopt);
  EXPECT_EQ(request.candidates, (std::vector<std::string>{"terrible", "bad", "okay", "good", "great"}));
  EXPECT_FALSE(request.parts[0].truncate_to.has_value());
  EXPECT_EQ(request.parts[0].text, "Nice. In summary, the restaurant is good.");
}

TEST(BocContext, LongExamplesAreTruncatedByTheScorer) {
  const auto task = *find_builtin_task("imdb");
  const auto request =
      build_boc_context(task, Neighbor{ex("n", words(200)), 1.0, 0}, ex("x", words(200)), 120);
  const std::string joined = mock::join_context(request);
  EXPECT_EQ(std::count(joined.begin(), joined.end(), ' ') + 1, 240);
  EXPECT_TRUE(joined.ends_with("The movie is [MASK]."));
  EXPECT_TRUE(joined.starts_with("w0 w1 "));
}

TEST(ConcatContext, OrderAndMaskPlacement) {
  const auto task = *find_builtin_task("imdb");
  std::vector<Neighbor> ns{{ex("b", "Second."), 0.5, 1}, {ex("a", "First."), 0.9, 0}, {ex("c", "Third."), 0.5, 0}};
  const auto request = build_concat_context(task, ns, ex("x", "Query."), 120);
  ASSERT_EQ(request.parts.size(), 4u);
  EXPECT_EQ(request.parts[0].text, "First. The movie is bad.");
  EXPECT_EQ(request.parts[1].text, "Second. The movie is good.");
  EXPECT_EQ(request.parts[2].text, "Third. The movie is bad.");
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(count_masks(request.parts[i].text), 0u);
  EXPECT_EQ(count_masks(request.parts[3].text), 1u);
  EXPECT_THROW(build_concat_context(task, {}, ex("x", "q"), 120), DomainError);
}

TEST(ConcatContext, SingleNeighborEqualsBoc) {
  const auto task = *find_builtin_task("imdb");
  const Neighbor n{ex("n1", "Not worth the time!"), 0.96, 0};
  const auto x = ex("x", "Not worth watching.");
  const std::vector<Neighbor> one{n};
  const auto concat = build_concat_context(task, one, x, 120);
  const auto boc = build_boc_context(task, n, x, 120);
  EXPECT_EQ(mock::join_context(concat), mock::join_context(boc));
}

TEST(WeightedAverage, WalkthroughAggregation) {
  const std::vector<LabelDistribution> d{LabelDistribution({0.9, 0.1}), LabelDistribution({0.7, 0.3})};
  const std::vector<double> w{1, 1};
  const auto q = weighted_average(d, w);
  EXPECT_NEAR(q[0], 0.8, 1e-12);
  EXPECT_NEAR(q[1], 0.2, 1e-12);
}

TEST(WeightedAverage, SingleContextIsIdentity) {
  const std::vector<LabelDistribution> d{LabelDistribution({0.25, 0.5, 0.25})};
  EXPECT_EQ(weighted_average(d, std::vector<double>{0.4}), d[0]);
}

TEST(WeightedAverage, ZeroWeightIgnoresContext) {
  const std::vector<LabelDistribution> d{LabelDistribution({0.9, 0.1}), LabelDistribution({0.2, 0.8})};
  EXPECT_EQ(weighted_average(d, std::vector<double>{1, 0}), d[0]);
  // All-zero weights fall back to uniform.
  const auto q = weighted_average(d, std::vector<double>{0, 0});
  EXPECT_NEAR(q[0], 0.55, 1e-12);
}

TEST(WeightedAverage, RejectsBadInput) {
  const std::vector<LabelDistribution> d{LabelDistribution({0.5, 0.5})};
  EXPECT_THROW(weighted_average({}, {}), DomainError);
  EXPECT_THROW(weighted_average(d, std::vector<double>{1, 1}), DomainError);
  EXPECT_THROW(weighted_average(d, std::vector<double>{-1}), DomainError);
}

std::vector<double> random_simplex(std::mt19937_64& rng, std::size_t n) {
  std::gamma_distribution<double> g(1.0, 1.0);
  std::vector<double> p(n);
  for (double& x : p) x = g(rng) + 1e-9;
  const double s = std::accumulate(p.begin(), p.end(), 0.0);
  for (double& x : p) x /= s;
  return p;
}

TEST(WeightedAverageProperties, OracleBoundsPermutationScale) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> wdist(0.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + rng() % 9;
    const std::size_t k = 1 + rng() % 50;
    std::vector<LabelDistribution> d;
    std::vector<double> w;
    for (std::size_t i = 0; i < k; ++i) {
      d.emplace_back(random_simplex(rng, n));
      w.push_back(wdist(rng));
    }
    const auto q = weighted_average(d, w);

    // Independent reference in long double.
    long double z = 0;
    for (double x : w) z += x;
    for (std::size_t y = 0; y < n; ++y) {
      long double acc = 0;
      double lo = 1, hi = 0;
      for (std::size_t i = 0; i < k; ++i) {
        acc += static_cast<long double>(w[i]) * d[i][y];
        lo = std::min(lo, d[i][y]);
        hi = std::max(hi, d[i][y]);
      }
      EXPECT_NEAR(q[y], static_cast<double>(acc / z), 1e-12);
      EXPECT_GE(q[y], lo - 1e-12);
      EXPECT_LE(q[y], hi + 1e-12);
    }

    std::vector<std::size_t> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<LabelDistribution> d2;
    std::vector<double> w2;
    for (std::size_t i : perm) {
      d2.push_back(d[i]);
      w2.push_back(w[i] * 3.5);
    }
    const auto q2 = weighted_average(d2, w2);
    for (std::size_t y = 0; y < n; ++y) EXPECT_NEAR(q2[y], q[y], 1e-12);
  }
}

TEST(ClassifyBoc, Walkthrough) {
  const auto s = testing::movie_walkthrough();
  const auto calib = calibrate(*s.backend.scorer, s.task);
  const std::vector<Neighbor> ns{{s.pool.examples[0], 0.96, 0}, {s.pool.examples[1], 0.8, 0}};
  const auto p = classify_boc(*s.backend.scorer, s.task, ns, s.test.examples[0], WeightingKind::kUniform, calib);
  EXPECT_NEAR(p.distribution[0], 0.8, 1e-12);
  EXPECT_NEAR(p.distribution[1], 0.2, 1e-12);
  EXPECT_EQ(p.label, 0u);

  const auto sim = classify_boc(*s.backend.scorer, s.task, ns, s.test.examples[0], WeightingKind::kSimilarity, calib);
  EXPECT_NEAR(sim.distribution[0], (0.96 * 0.9 + 0.8 * 0.7) / 1.76, 1e-12);
}

TEST(ClassifyBoc, ConcurrencyDoesNotChangeResults) {
  const auto s = testing::synthetic_gain(4, 40);
  const auto calib = calibrate(*s.backend.scorer, s.task);
  std::vector<Neighbor> ns;
  for (std::size_t i = 0; i < 20; ++i) ns.push_back({s.pool.examples[i], 1.0 - 0.01 * i, i % 2});
  const auto serial = classify_boc(*s.backend.scorer, s.task, ns, s.test.examples[0], WeightingKind::kSimilarity,
                                   calib, {120, 1});
  const auto parallel = classify_boc(*s.backend.scorer, s.task, ns, s.test.examples[0], WeightingKind::kSimilarity,
                                     calib, {120, 8});
  EXPECT_EQ(serial.distribution, parallel.distribution);
}

TEST(ClassifyConcat, OneCallPerExample) {
  const auto s = testing::movie_walkthrough();
  const auto calib = calibrate(*s.backend.scorer, s.task);
  const std::vector<Neighbor> ns{{s.pool.examples[0], 0.96, 0}, {s.pool.examples[1], 0.8, 0}};
  const std::size_t before = s.backend.scorer->request_count();
  classify_concat(*s.backend.scorer, s.task, ns, s.test.examples[0], calib);
  EXPECT_EQ(s.backend.scorer->request_count(), before + 1);

  const std::vector<Neighbor> one{ns[0]};
  const auto c = classify_concat(*s.backend.scorer, s.task, one, s.test.examples[0], calib);
  const auto b = classify_boc(*s.backend.scorer, s.task, one, s.test.examples[0], WeightingKind::kUniform, calib);
  EXPECT_EQ(c.distribution, b.distribution);
}

}  // namespace
}  // namespace soup
