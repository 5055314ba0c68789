#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "docmine/embedding.hpp"

namespace docmine {

struct Neighbor {
  std::size_t row = 0;  // position in the indexed matrix
  double score = 0.0;   // inner product == cosine for unit rows

  bool operator==(const Neighbor&) const = default;
};

struct NeighborList {
  std::size_t query_row = 0;
  std::vector<Neighbor> neighbors;  // score descending, ties by ascending row

  bool operator==(const NeighborList&) const = default;
};

struct SearchOptions {
  std::size_t workers = 1;
  std::size_t query_block = 1024;
  std::size_t row_tile = 256;
};

/// Exact inner-product index over unit-norm rows.
class FlatIndex {
 public:
  /// Throws Error(empty_input) for zero rows and Error(not_normalized) when
  /// any row norm is off by more than 1e-3.
  explicit FlatIndex(EmbeddingMatrix matrix);

  std::size_t size() const noexcept { return matrix_->rows(); }
  std::size_t dim() const noexcept { return matrix_->dim(); }
  const EmbeddingMatrix& matrix() const noexcept { return *matrix_; }
  const std::string& id(std::size_t row) const { return matrix_->id(row); }

  /// Top-min(k, size()) rows per query. Results do not depend on worker
  /// count or block sizes. k must be >= 1.
  std::vector<NeighborList> search(const EmbeddingMatrix& queries, std::size_t k,
                                   const SearchOptions& options = {}) const;

 private:
  std::shared_ptr<const EmbeddingMatrix> matrix_;
};

inline constexpr double kIndexNormTolerance = 1e-3;

}  // namespace docmine
