#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "docmine/corpus.hpp"
#include "docmine/embedding.hpp"

namespace docmine {

enum class PoolingMethod { mp, lp, idf, lidf };

std::string_view to_string(PoolingMethod method) noexcept;
PoolingMethod parse_pooling_method(std::string_view name);  // case-insensitive

constexpr bool needs_idf(PoolingMethod m) noexcept {
  return m == PoolingMethod::idf || m == PoolingMethod::lidf;
}

/// Unicode NFC form of a UTF-8 string.
std::string nfc(std::string_view utf8);

/// Smoothed inverse document frequencies over one corpus side:
/// idf(t) = ln((1 + N) / (1 + df(t))) + 1. Tokens are whitespace-delimited,
/// NFC-normalized and case-sensitive. Unseen tokens use df = 0.
class IdfTable {
 public:
  IdfTable() = default;

  std::size_t doc_count() const noexcept { return doc_count_; }
  std::size_t vocabulary_size() const noexcept { return df_.size(); }
  std::size_t df(std::string_view token) const;
  double idf(std::string_view token) const;

  /// Mean idf over the tokens of `text` (with multiplicity); 0 when the
  /// text has no tokens.
  double mean_idf(std::string_view text) const;

  friend IdfTable build_idf(const std::vector<Document>& documents);

 private:
  double idf_for_df(std::size_t df) const;

  std::size_t doc_count_ = 0;
  std::unordered_map<std::string, std::size_t> df_;
};

/// Throws Error(empty_input) for an empty document list.
IdfTable build_idf(const std::vector<Document>& documents);

/// Per-unit weight: 1 (MP), token_count (LP), mean idf (IDF),
/// token_count * mean idf (LIDF).
double unit_weight(const ChunkUnit& unit, PoolingMethod method, const IdfTable* idf);

/// Normalized weighted mean of `rows` (one row per unit, same order).
/// `idf` must be non-null exactly when the method needs it.
std::vector<float> pool_document(std::span<const ChunkUnit> units, const EmbeddingMatrix& rows,
                                 PoolingMethod method, const IdfTable* idf);

/// Pools every document from its sentence-level (G = 1) unit embeddings.
/// Result rows are keyed by doc_id, in document order.
EmbeddingMatrix pool_corpus(const std::vector<Document>& documents,
                            const EmbeddingMatrix& sentence_embeddings, PoolingMethod method,
                            const IdfTable* idf, std::size_t workers = 1);

}  // namespace docmine
