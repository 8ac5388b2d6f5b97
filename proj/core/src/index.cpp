// Copyright 2026 The SOUP Authors
// SPDX-License-Identifier: Apache-2.0

#include "soup/index.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>

#include "soup/error.hpp"

namespace soup {

namespace {

// Inputs this close to unit norm are stored without rescaling, which keeps
// a rebuild from stored vectors bit-identical.
constexpr double kUnitNormTolerance = 1e-6;

constexpr std::uint32_t kMaxIdBytes = 1u << 20;

double norm_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

template <typename T>
void put_le(std::ostream& out, T value) {
  static_assert(std::is_unsigned_v<T>);
  std::array<char, sizeof(T)> bytes;
  for (std::size_t i = 0; i < sizeof(T); ++i) bytes[i] = static_cast<char>((value >> (8 * i)) & 0xFF);
  out.write(bytes.data(), bytes.size());
}

template <typename T>
T get_le(std::istream& in, std::string_view what) {
  static_assert(std::is_unsigned_v<T>);
  std::array<unsigned char, sizeof(T)> bytes;
  if (!in.read(reinterpret_cast<char*>(bytes.data()), bytes.size())) {
    throw FormatError("embedding cache truncated while reading " + std::string(what));
  }
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) value |= static_cast<T>(bytes[i]) << (8 * i);
  return value;
}

}  // namespace

double cosine(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) {
    throw DomainError("cosine of vectors with dimensions " + std::to_string(u.size()) + " and " +
                      std::to_string(v.size()));
  }
  const double nu = norm_of(u);
  const double nv = norm_of(v);
  if (nu == 0.0 || nv == 0.0) throw DomainError("cosine of a zero vector");
  double dot = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) dot += u[i] * v[i];
  return dot / (nu * nv);
}

EmbeddingIndex EmbeddingIndex::build(std::span<const EmbeddingRecord> records) {
  EmbeddingIndex index;
  if (records.empty()) return index;
  index.dim_ = records.front().vector.size();
  if (index.dim_ == 0) throw DomainError("embedding records have dimension 0");
  index.ids_.reserve(records.size());
  index.data_.reserve(records.size() * index.dim_);
  for (const auto& record : records) {
    if (record.vector.size() != index.dim_) {
      throw DomainError("record '" + record.id + "' has dimension " + std::to_string(record.vector.size()) +
                        ", expected " + std::to_string(index.dim_));
    }
    const double norm = norm_of(record.vector);
    if (norm == 0.0 || !std::isfinite(norm)) throw DomainError("record '" + record.id + "' has a zero vector");
    const double scale = std::abs(norm - 1.0) <= kUnitNormTolerance ? 1.0 : norm;
    std::vector<float> unit(index.dim_);
    for (std::size_t i = 0; i < index.dim_; ++i) unit[i] = static_cast<float>(record.vector[i] / scale);
    index.add_normalized(record.id, std::move(unit));
  }
  return index;
}

void EmbeddingIndex::add_normalized(std::string id, std::vector<float> unit) {
  if (rows_.contains(id)) throw DomainError("duplicate embedding id '" + id + "'");
  double s = 0.0;
  for (float x : unit) s += static_cast<double>(x) * static_cast<double>(x);
  if (s == 0.0 || !std::isfinite(s)) throw DomainError("record '" + id + "' has a zero vector");
  norms_.push_back(std::sqrt(s));
  rows_.emplace(id, ids_.size());
  ids_.push_back(std::move(id));
  data_.insert(data_.end(), unit.begin(), unit.end());
}

std::span<const float> EmbeddingIndex::vector(std::size_t row) const {
  if (row >= size()) throw DomainError("index row out of range");
  return std::span<const float>(data_).subspan(row * dim_, dim_);
}

std::optional<std::size_t> EmbeddingIndex::find(std::string_view id) const {
  auto it = rows_.find(std::string(id));
  if (it == rows_.end()) return std::nullopt;
  return it->second;
}

std::vector<NeighborHit> EmbeddingIndex::search(std::span<const double> query, std::size_t k,
                                                const std::set<std::string, std::less<>>& exclude) const {
  if (k == 0) throw DomainError("k must be at least 1");
  if (empty()) return {};
  if (query.size() != dim_) {
    throw DomainError("query has dimension " + std::to_string(query.size()) + ", index has " +
                      std::to_string(dim_));
  }
  const double qnorm = norm_of(query);
  if (qnorm == 0.0) throw DomainError("query is a zero vector");

  struct Candidate {
    double similarity;
    std::size_t row;
  };
  std::vector<Candidate> candidates;
  candidates.reserve(size());
  for (std::size_t row = 0; row < size(); ++row) {
    if (exclude.contains(ids_[row])) continue;
    const float* v = data_.data() + row * dim_;
    double dot = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) dot += static_cast<double>(v[i]) * query[i];
    candidates.push_back({dot / (norms_[row] * qnorm), row});
  }

  const std::size_t take = std::min(k, candidates.size());
  auto better = [this](const Candidate& a, const Candidate& b) {
    if (a.similarity != b.similarity) return a.similarity > b.similarity;
    return ids_[a.row] < ids_[b.row];
  };
  std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(take), candidates.end(),
                    better);

  std::vector<NeighborHit> hits;
  hits.reserve(take);
  for (std::size_t i = 0; i < take; ++i) hits.push_back({ids_[candidates[i].row], candidates[i].similarity});
  return hits;
}

void EmbeddingIndex::write(std::ostream& out) const {
  out.write(kMagic.data(), static_cast<std::streamsize>(kMagic.size()));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(dim_));
  put_le<std::uint64_t>(out, static_cast<std::uint64_t>(size()));
  for (std::size_t row = 0; row < size(); ++row) {
    const auto& id = ids_[row];
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(id.size()));
    out.write(id.data(), static_cast<std::streamsize>(id.size()));
    for (float x : vector(row)) put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(x));
  }
}

void EmbeddingIndex::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write embedding cache " + path.string());
  write(out);
  if (!out.flush()) throw IoError("failed writing embedding cache " + path.string());
}

EmbeddingIndex EmbeddingIndex::read(std::istream& in) {
  std::array<char, kMagic.size()> magic{};
  if (!in.read(magic.data(), magic.size()) || std::string_view(magic.data(), magic.size()) != kMagic) {
    throw FormatError("not a SOUPEMB1 embedding cache (bad magic)");
  }
  EmbeddingIndex index;
  index.dim_ = get_le<std::uint32_t>(in, "dimension");
  const auto count = get_le<std::uint64_t>(in, "record count");
  if (count > 0 && index.dim_ == 0) throw FormatError("embedding cache has records of dimension 0");

  for (std::uint64_t n = 0; n < count; ++n) {
    const auto len = get_le<std::uint32_t>(in, "id length");
    if (len > kMaxIdBytes) throw FormatError("embedding cache id length " + std::to_string(len) + " is implausible");
    std::string id(len, '\0');
    if (!in.read(id.data(), len)) throw FormatError("embedding cache truncated while reading an id");
    std::vector<float> unit(index.dim_);
    for (float& x : unit) x = std::bit_cast<float>(get_le<std::uint32_t>(in, "vector"));
    try {
      index.add_normalized(std::move(id), std::move(unit));
    } catch (const DomainError& e) {
      throw FormatError(std::string("embedding cache: ") + e.what());
    }
  }
  if (in.peek() != std::char_traits<char>::eof()) throw FormatError("embedding cache has trailing bytes");
  return index;
}

EmbeddingIndex EmbeddingIndex::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read embedding cache " + path.string());
  return read(in);
}

}  // namespace soup
