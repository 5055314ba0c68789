#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "docmine/corpus.hpp"
#include "docmine/embedding.hpp"
#include "docmine/eval.hpp"
#include "docmine/pooling.hpp"

namespace docmine {

enum class AlignMode { dac, pooled };

AlignMode parse_align_mode(std::string_view name);
std::string_view to_string(AlignMode mode) noexcept;

/// Everything one align or sweep run needs. Defaults: k = 16,
/// threshold = 0.1, noise ratio = 0.5.
struct RunConfig {
  std::filesystem::path src_manifest;
  std::filesystem::path tgt_manifest;
  std::optional<std::filesystem::path> src_embeddings;
  std::optional<std::filesystem::path> tgt_embeddings;
  std::optional<std::filesystem::path> src_noise_manifest;
  std::optional<std::filesystem::path> tgt_noise_manifest;
  std::optional<std::filesystem::path> gold;
  std::filesystem::path out_dir;

  AlignMode mode = AlignMode::dac;
  Granularity granularity{1};
  PoolingMethod method = PoolingMethod::mp;
  std::size_t k = 16;
  double threshold = 0.1;
  std::optional<double> margin_floor;
  bool keep_all = false;
  double noise_ratio = 0.5;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  std::optional<std::string> endpoint;
  std::size_t batch_size = 32;
  ReportFormat report_format = ReportFormat::tsv;
  std::vector<double> thresholds;  // sweep only
};

/// Checks paths and value ranges without touching any data. Throws
/// Error(kind = validation) on the first problem.
void validate(const RunConfig& config, bool sweep = false);

std::string config_json(const RunConfig& config);

struct AlignOutcome {
  std::vector<DocPair> predicted;
  std::optional<EvalReport> report;
};

/// Writes pairs.tsv, config.json and (with gold) report.tsv|json into
/// out_dir.
AlignOutcome run_align(const RunConfig& config);

/// DAC-mode sweep; writes sweep.tsv|json and config.json into out_dir.
std::vector<EvalReport> run_sweep(const RunConfig& config);

/// unit_id<TAB>text for every chunk of every document.
std::string format_units_tsv(const std::vector<ChunkUnit>& units);
void run_segment(const std::filesystem::path& manifest, const Granularity& g,
                 const std::filesystem::path& out);

struct UnitText {
  std::string unit_id;
  std::string text;
};
std::vector<UnitText> read_units_tsv(const std::filesystem::path& path);

/// Text vectors: "id<TAB>v1 v2 ..." (components separated by spaces or
/// tabs). When `units` is given, rows are reordered to the units file and
/// every unit must be present.
EmbeddingMatrix import_text_vectors(const std::filesystem::path& vectors,
                                    const std::optional<std::filesystem::path>& units);

void run_pool(const std::filesystem::path& manifest, const std::filesystem::path& embeddings,
              PoolingMethod method, const std::filesystem::path& out, std::size_t workers);

EvalReport run_evaluate(const std::filesystem::path& pairs, const std::filesystem::path& gold);

}  // namespace docmine
