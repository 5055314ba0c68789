#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "docmine/embedding.hpp"

namespace docmine {

struct MarginParams {
  std::size_t k = 16;
  std::size_t workers = 1;
  std::size_t query_block = 1024;
};

/// A candidate (x, y) from the union of forward and backward k-NN lists.
struct MarginCandidate {
  std::string src_id;
  std::string tgt_id;
  double cosine = 0.0;
  double margin = 0.0;
};

struct AlignedUnitPair {
  std::string src_id;
  std::string tgt_id;
  double cosine = 0.0;
  double margin = 0.0;

  bool operator==(const AlignedUnitPair&) const = default;
};

/// Mean cosine of every row to its k nearest rows on the other side
/// (k clamped to the other side's size). Used as A_x / A_y.
struct NeighborhoodMeans {
  std::vector<double> src;
  std::vector<double> tgt;
};

/// Ratio margin cos(x, y) / (0.5 * (A_x + A_y)) for every pair in
/// NN_k(x) u NN_k(y), each pair once, ordered by (src row, tgt row).
/// Pairs whose margin is not strictly positive (non-positive cosine or
/// neighborhood mean) carry no alignment evidence and are dropped.
///
/// Both matrices must be unit-norm, non-empty and share a dimension.
std::vector<MarginCandidate> margin_scores(const EmbeddingMatrix& src,
                                           const EmbeddingMatrix& tgt,
                                           const MarginParams& params,
                                           NeighborhoodMeans* means = nullptr);

/// Greedy one-to-one selection in descending margin order (ties: higher
/// cosine, then lexicographic (src_id, tgt_id)). Returned in acceptance
/// order.
std::vector<AlignedUnitPair> greedy_accept(std::span<const MarginCandidate> candidates);

/// greedy_accept, re-sorted by (src_id, tgt_id).
std::vector<AlignedUnitPair> greedy_match(std::span<const MarginCandidate> candidates);

std::vector<AlignedUnitPair> mine(const EmbeddingMatrix& src, const EmbeddingMatrix& tgt,
                                  const MarginParams& params);

/// TSV rows: src_id, tgt_id, cosine, margin (six decimals, no header).
std::string format_pairs_tsv(std::span<const AlignedUnitPair> pairs);
void write_pairs_tsv(std::span<const AlignedUnitPair> pairs, const std::filesystem::path& path);

}  // namespace docmine
