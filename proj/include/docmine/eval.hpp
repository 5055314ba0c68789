#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "docmine/corpus.hpp"
#include "docmine/dac.hpp"

namespace docmine {

/// SplitMix64 (Steele, Lea & Flood 2014): 64-bit state, fixed output
/// function, identical sequences on every platform. split() derives an
/// independent stream, used to give each corpus side its own generator.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next() noexcept {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Unbiased integer in [0, bound) (Lemire's multiply-and-reject).
  std::uint64_t below(std::uint64_t bound) noexcept;

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  SplitMix64 split() noexcept { return SplitMix64(next()); }

 private:
  std::uint64_t state_;
};

struct NoiseConfig {
  double ratio = 0.5;
  std::uint64_t seed = 0;
};

/// floor(ratio * alignable).
std::size_t noise_count(std::size_t alignable, double ratio);

/// Appends noise_count(|alignable|, ratio) documents drawn without
/// replacement from `noise_pool`. Sampled documents keep their pool order.
std::vector<Document> inject_noise(const std::vector<Document>& alignable,
                                   const std::vector<Document>& noise_pool,
                                   const NoiseConfig& config);

using DocPair = std::pair<std::string, std::string>;

/// One-to-one gold alignment.
class GoldSet {
 public:
  GoldSet() = default;
  /// Throws Error(duplicate_id) if any doc occurs in two pairs.
  explicit GoldSet(std::vector<DocPair> pairs);

  std::size_t size() const noexcept { return pairs_.size(); }
  bool contains(const DocPair& pair) const { return pairs_.contains(pair); }
  const std::set<DocPair>& pairs() const noexcept { return pairs_; }

 private:
  std::set<DocPair> pairs_;
};

/// Reads src_doc<TAB>tgt_doc lines (extra columns ignored, '#' comments and
/// blank lines skipped). Works for gold files and for pairs TSV output.
std::vector<DocPair> read_doc_pairs(const std::filesystem::path& path);
GoldSet load_gold(const std::filesystem::path& path);

struct EvalReport {
  std::size_t true_positives = 0;
  std::size_t predicted_count = 0;
  std::size_t gold_count = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::optional<double> threshold;

  bool operator==(const EvalReport&) const = default;
};

/// Exact-match precision/recall/F1. Throws Error(duplicate_pair) when a
/// predicted pair repeats.
EvalReport score(std::span<const DocPair> predicted, const GoldSet& gold);

std::vector<DocPair> doc_pairs(std::span<const DocPairScore> scores);
std::vector<DocPair> doc_pairs(std::span<const AlignedUnitPair> pairs);

/// Re-runs select_pairs on the same scores for each threshold (ascending,
/// each in [0, 1]) and scores the result. Other selection settings come
/// from `base`.
std::vector<EvalReport> sweep_thresholds(std::span<const DocPairScore> scores,
                                         const GoldSet& gold,
                                         std::span<const double> thresholds,
                                         const DacConfig& base = {}, std::size_t workers = 1);

enum class ReportFormat { tsv, json };

ReportFormat parse_report_format(std::string_view name);
std::string format_reports(std::span<const EvalReport> reports, ReportFormat format);

}  // namespace docmine
