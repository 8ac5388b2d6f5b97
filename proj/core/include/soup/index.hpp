// Copyright 2026 The SOUP Authors
// SPDX-License-Identifier: Apache-2.0
//
// Exact cosine k-nearest-neighbor search over a fixed set of embeddings.

#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace soup {

struct EmbeddingRecord {
  std::string id;
  std::vector<double> vector;
};

struct NeighborHit {
  std::string id;
  double similarity = 0.0;

  friend bool operator==(const NeighborHit&, const NeighborHit&) = default;
};

/// dot(u,v) / (|u| |v|). Throws DomainError on a zero vector or a
/// dimension mismatch.
double cosine(std::span<const double> u, std::span<const double> v);

/// Immutable embedding index. Vectors are stored L2-normalized as float32
/// and queried by an exact linear scan; reported similarities are the cosine
/// between the stored float vector and the query.
class EmbeddingIndex {
 public:
  /// Magic bytes of the on-disk cache.
  static constexpr std::string_view kMagic = "SOUPEMB1";

  EmbeddingIndex() = default;

  /// Throws DomainError on duplicate ids, mixed dimensions or zero vectors.
  static EmbeddingIndex build(std::span<const EmbeddingRecord> records);

  std::size_t size() const noexcept { return ids_.size(); }
  bool empty() const noexcept { return ids_.empty(); }
  /// 0 for an empty index.
  std::size_t dim() const noexcept { return dim_; }

  const std::string& id(std::size_t row) const { return ids_.at(row); }
  std::span<const float> vector(std::size_t row) const;
  std::optional<std::size_t> find(std::string_view id) const;
  bool contains(std::string_view id) const { return find(id).has_value(); }

  /// The min(k, available) stored vectors most similar to `query`, by
  /// descending cosine with ties broken by ascending id. Ids in `exclude` are
  /// never returned. Throws DomainError if k == 0 or on a dimension mismatch.
  std::vector<NeighborHit> search(std::span<const double> query, std::size_t k,
                                  const std::set<std::string, std::less<>>& exclude = {}) const;

  /// Writes the SOUPEMB1 cache: magic, u32 dim, u64 count, then per record
  /// u32 id length, id bytes and dim float32 values, all little-endian.
  void save(const std::filesystem::path& path) const;
  void write(std::ostream& out) const;
  /// Throws FormatError on bad magic, truncation or inconsistent content.
  static EmbeddingIndex load(const std::filesystem::path& path);
  static EmbeddingIndex read(std::istream& in);

  friend bool operator==(const EmbeddingIndex& a, const EmbeddingIndex& b) {
    return a.dim_ == b.dim_ && a.ids_ == b.ids_ && a.data_ == b.data_;
  }

 private:
  void add_normalized(std::string id, std::vector<float> unit);

  std::size_t dim_ = 0;
  std::vector<std::string> ids_;
  std::vector<float> data_;     // row-major, size() * dim_
  std::vector<double> norms_;  // norm of each stored float row
  std::unordered_map<std::string, std::size_t> rows_;
};

}  // namespace soup
