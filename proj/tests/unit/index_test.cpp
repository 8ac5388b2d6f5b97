// Copyright 2026 The SOUP Authors
// SPDX-License-Identifier: Apache-2.0

#include "soup/index.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "soup/error.hpp"

namespace soup {
namespace {

std::vector<double> stored(const EmbeddingIndex& index, std::size_t row) {
  const auto v = index.vector(row);
  return {v.begin(), v.end()};
}

// Brute-force reference: cosine against every stored vector, full sort.
std::vector<NeighborHit> oracle(const EmbeddingIndex& index, const std::vector<double>& q, std::size_t k,
                                const std::set<std::string, std::less<>>& exclude = {}) {
  std::vector<NeighborHit> all;
  for (std::size_t r = 0; r < index.size(); ++r) {
    if (exclude.contains(index.id(r))) continue;
    all.push_back({index.id(r), cosine(stored(index, r), q)});
  }
  std::sort(all.begin(), all.end(), [](const NeighborHit& a, const NeighborHit& b) {
    return a.similarity != b.similarity ? a.similarity > b.similarity : a.id < b.id;
  });
  all.resize(std::min(k, all.size()));
  return all;
}

std::vector<EmbeddingRecord> random_records(std::mt19937_64& rng, std::size_t n, std::size_t d) {
  std::normal_distribution<double> g;
  std::vector<EmbeddingRecord> out;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> v(d);
    for (double& x : v) x = g(rng);
    // Every fifth record repeats an earlier vector to force similarity ties.
    if (i % 5 == 4) v = out[i / 2].vector;
    out.push_back({"r" + std::to_string(rng() % 100000) + "-" + std::to_string(i), std::move(v)});
  }
  return out;
}

TEST(Cosine, Examples) {
  EXPECT_DOUBLE_EQ(cosine(std::vector<double>{1, 2, 2}, std::vector<double>{2, 1, 2}), 8.0 / 9.0);
  EXPECT_DOUBLE_EQ(cosine(std::vector<double>{1, 0}, std::vector<double>{0, 1}), 0.0);
  EXPECT_DOUBLE_EQ(cosine(std::vector<double>{1, 0}, std::vector<double>{-3, 0}), -1.0);
  EXPECT_THROW(cosine(std::vector<double>{0, 0}, std::vector<double>{1, 0}), DomainError);
  EXPECT_THROW(cosine(std::vector<double>{1}, std::vector<double>{1, 0}), DomainError);
}

TEST(EmbeddingIndex, SearchExample) {
  const std::vector<EmbeddingRecord> records{{"a", {1, 0}}, {"b", {0, 1}}, {"c", {0.6, 0.8}}};
  const auto index = EmbeddingIndex::build(records);
  const auto hits = index.search(std::vector<double>{0, 1}, 2);
  ASSERT_EQ(hits.size(), 2u);
  EXPECT_EQ(hits[0].id, "b");
  EXPECT_NEAR(hits[0].similarity, 1.0, 1e-7);
  EXPECT_EQ(hits[1].id, "c");
  EXPECT_NEAR(hits[1].similarity, 0.8, 1e-7);
}

TEST(EmbeddingIndex, SelfIsNearest) {
  std::mt19937_64 rng(3);
  const auto records = random_records(rng, 50, 8);
  const auto index = EmbeddingIndex::build(records);
  for (std::size_t r = 0; r < index.size(); ++r) {
    const auto hits = index.search(stored(index, r), 1);
    ASSERT_EQ(hits.size(), 1u);
    EXPECT_NEAR(hits[0].similarity, 1.0, 1e-12);
  }
}

TEST(EmbeddingIndex, ExclusionAndShortIndex) {
  const std::vector<EmbeddingRecord> records{{"a", {1, 0}}, {"b", {0, 1}}, {"c", {0.6, 0.8}}};
  const auto index = EmbeddingIndex::build(records);
  const auto hits = index.search(std::vector<double>{0, 1}, 10, {"b"});
  ASSERT_EQ(hits.size(), 2u);
  EXPECT_EQ(hits[0].id, "c");
  EXPECT_EQ(hits[1].id, "a");
  EXPECT_TRUE(index.search(std::vector<double>{0, 1}, 3, {"a", "b", "c"}).empty());
}

TEST(EmbeddingIndex, TiesBreakByAscendingId) {
  const std::vector<EmbeddingRecord> records{{"z", {1, 1}}, {"m", {2, 2}}, {"a", {3, 3}}, {"q", {1, 0}}};
  const auto index = EmbeddingIndex::build(records);
  const auto hits = index.search(std::vector<double>{1, 1}, 3);
  ASSERT_EQ(hits.size(), 3u);
  EXPECT_EQ(hits[0].id, "a");
  EXPECT_EQ(hits[1].id, "m");
  EXPECT_EQ(hits[2].id, "z");
}

TEST(EmbeddingIndex, DegenerateInputs) {
  const std::vector<EmbeddingRecord> records{{"a", {1, 0}}};
  const auto index = EmbeddingIndex::build(records);
  EXPECT_THROW(index.search(std::vector<double>{1, 0}, 0), DomainError);
  EXPECT_THROW(index.search(std::vector<double>{1, 0, 0}, 1), DomainError);
  EXPECT_TRUE(EmbeddingIndex().search(std::vector<double>{1, 0}, 3).empty());

  EXPECT_THROW(EmbeddingIndex::build(std::vector<EmbeddingRecord>{{"a", {1, 0}}, {"a", {0, 1}}}), DomainError);
  EXPECT_THROW(EmbeddingIndex::build(std::vector<EmbeddingRecord>{{"a", {1, 0}}, {"b", {0, 1, 0}}}), DomainError);
  EXPECT_THROW(EmbeddingIndex::build(std::vector<EmbeddingRecord>{{"a", {0, 0}}}), DomainError);
}

TEST(EmbeddingIndex, StoresUnitVectors) {
  const auto index = EmbeddingIndex::build(std::vector<EmbeddingRecord>{{"a", {3, 4}}});
  EXPECT_FLOAT_EQ(index.vector(0)[0], 0.6f);
  EXPECT_FLOAT_EQ(index.vector(0)[1], 0.8f);
  EXPECT_EQ(index.find("a"), 0u);
  EXPECT_FALSE(index.contains("b"));
}

TEST(EmbeddingIndex, MatchesBruteForceOracle) {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 1 + rng() % 300;
    const std::size_t d = 1 + rng() % 32;
    const auto index = EmbeddingIndex::build(random_records(rng, n, d));
    for (int q = 0; q < 5; ++q) {
      std::vector<double> query(d);
      for (double& x : query) x = g(rng);
      if (q == 0) query = stored(index, rng() % n);
      const std::size_t k = 1 + rng() % 20;
      std::set<std::string, std::less<>> exclude{index.id(rng() % n)};
      EXPECT_EQ(index.search(query, k, exclude), oracle(index, query, k, exclude));
    }
  }
}

TEST(EmbeddingIndex, RebuildIsIdempotent) {
  std::mt19937_64 rng(5);
  const auto index = EmbeddingIndex::build(random_records(rng, 40, 6));
  std::vector<EmbeddingRecord> again;
  for (std::size_t r = 0; r < index.size(); ++r) again.push_back({index.id(r), stored(index, r)});
  EXPECT_EQ(EmbeddingIndex::build(again), index);
}

TEST(EmbeddingIndex, SaveLoadRoundTrip) {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> g;
  const auto index = EmbeddingIndex::build(random_records(rng, 200, 12));
  testing::TempDir dir;
  index.save(dir / "cache.bin");
  const auto loaded = EmbeddingIndex::load(dir / "cache.bin");
  EXPECT_EQ(loaded, index);
  EXPECT_EQ(std::filesystem::file_size(dir / "cache.bin"),
            8u + 4u + 8u + [&] {
              std::size_t bytes = 0;
              for (std::size_t r = 0; r < index.size(); ++r) bytes += 4 + index.id(r).size() + 12 * 4;
              return bytes;
            }());
  for (int q = 0; q < 100; ++q) {
    std::vector<double> query(12);
    for (double& x : query) x = g(rng);
    EXPECT_EQ(loaded.search(query, 7), index.search(query, 7));
  }
}

TEST(EmbeddingIndex, EmptyRoundTrip) {
  std::stringstream buf;
  EmbeddingIndex().write(buf);
  EXPECT_EQ(EmbeddingIndex::read(buf), EmbeddingIndex());
}

TEST(EmbeddingIndex, CorruptCachesAreFormatErrors) {
  const auto index = EmbeddingIndex::build(std::vector<EmbeddingRecord>{{"a", {1, 0}}, {"b", {0, 1}}});
  std::stringstream buf;
  index.write(buf);
  const std::string bytes = buf.str();

  std::string bad_magic = bytes;
  bad_magic[0] = 'X';
  std::istringstream in1(bad_magic);
  EXPECT_THROW(EmbeddingIndex::read(in1), FormatError);

  std::istringstream in2(bytes.substr(0, bytes.size() - 3));
  EXPECT_THROW(EmbeddingIndex::read(in2), FormatError);

  std::istringstream in3(bytes + "x");
  EXPECT_THROW(EmbeddingIndex::read(in3), FormatError);

  EXPECT_THROW(EmbeddingIndex::load("/nonexistent/dir/cache.bin"), IoError);
}

}  // namespace
}  // namespace soup
