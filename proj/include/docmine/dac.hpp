#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "docmine/corpus.hpp"
#include "docmine/embedding.hpp"
#include "docmine/miner.hpp"

namespace docmine {

/// Evidence for one (source doc, target doc) pair gathered from mined chunk
/// pairs. dac = 2 * n_aligned / (n_src + n_tgt).
struct DocPairScore {
  std::string src_doc;
  std::string tgt_doc;
  std::size_t n_src = 0;
  std::size_t n_tgt = 0;
  std::size_t n_aligned = 0;
  double dac = 0.0;
  double margin_sum = 0.0;

  bool operator==(const DocPairScore&) const = default;
};

/// Document Alignment Coefficient from chunk counts. Requires
/// n_src + n_tgt > 0.
double alignment_coefficient(std::size_t n_aligned, std::size_t n_src, std::size_t n_tgt);

struct DacConfig {
  double threshold = 0.1;
  Granularity granularity{1};
  MarginParams margin;
  /// Drop mined chunk pairs below this margin before aggregation.
  std::optional<double> margin_floor;
  /// When false, every pair at or above threshold is kept (no document-level
  /// one-to-one matching).
  bool one_to_one = true;
};

using ChunkCounts = std::map<std::string, std::size_t, std::less<>>;

struct UnitRef {
  std::string_view doc_id;
  std::size_t chunk_index;
};

/// Splits "<doc_id>#<index>" at the last '#'. Throws
/// Error(malformed_unit_id).
UnitRef parse_unit_id(std::string_view unit_id);

ChunkCounts chunk_counts(std::span<const ChunkUnit> units);

/// One DocPairScore per document pair with at least one mined chunk pair,
/// sorted by (src_doc, tgt_doc).
std::vector<DocPairScore> aggregate(std::span<const AlignedUnitPair> chunk_pairs,
                                    const ChunkCounts& src_counts,
                                    const ChunkCounts& tgt_counts);

/// Threshold, then greedy one-to-one by dac descending (ties: margin_sum
/// descending, then (src_doc, tgt_doc)). Sorted by (src_doc, tgt_doc).
std::vector<DocPairScore> select_pairs(std::span<const DocPairScore> scores,
                                       const DacConfig& config);

/// Everything computed on the way to the final pairs, for reports and sweeps.
struct DacRun {
  std::vector<AlignedUnitPair> chunk_pairs;
  std::vector<DocPairScore> scores;    // all aggregated pairs
  std::vector<DocPairScore> selected;  // after threshold + matching
};

/// Segments both sides at config.granularity, mines all source chunks
/// against all target chunks, aggregates and selects. `src_units` /
/// `tgt_units` must hold an embedding for every chunk id.
DacRun align_documents_dac(const std::vector<Document>& src_docs,
                           const std::vector<Document>& tgt_docs,
                           const EmbeddingMatrix& src_units,
                           const EmbeddingMatrix& tgt_units, const DacConfig& config);

/// TSV rows: src_doc, tgt_doc, n_src, n_tgt, n_aligned, dac.
std::string format_doc_pairs_tsv(std::span<const DocPairScore> pairs);
void write_doc_pairs_tsv(std::span<const DocPairScore> pairs, const std::filesystem::path& path);

}  // namespace docmine
