#pragma once

// Synthetic corpora with a known alignment, for tests and the acceptance
// suite. The construction is the oracle: true pairs share chunk directions,
// noise documents live on axes orthogonal to everything else.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "docmine/corpus.hpp"
#include "docmine/embedding.hpp"
#include "docmine/eval.hpp"

namespace docmine::testing {

struct PlantedSpec {
  std::size_t true_pairs = 100;
  std::size_t chunks_per_doc = 5;
  std::size_t noise_pool_per_side = 50;  // candidate noise documents per side
  std::size_t signal_dim = 256;
  double perturb_norm = 0.05;       // max norm of the per-side perturbation
  double replace_fraction = 0.0;    // true chunk pairs whose one side is random
  std::uint64_t seed = 1;
};

struct PlantedCorpus {
  std::vector<Document> src_docs;    // alignable documents only
  std::vector<Document> tgt_docs;
  std::vector<Document> src_noise;   // noise pool
  std::vector<Document> tgt_noise;
  EmbeddingMatrix src_units;         // sentence (G = 1) embeddings, all docs
  EmbeddingMatrix tgt_units;
  GoldSet gold;
  std::size_t dim = 0;
};

PlantedCorpus make_planted(const PlantedSpec& spec);

/// Gaussian via Box-Muller on SplitMix64 so fixtures are portable.
double gaussian(SplitMix64& rng);
std::vector<float> random_unit(SplitMix64& rng, std::size_t dim);
EmbeddingMatrix random_unit_matrix(SplitMix64& rng, std::size_t rows, std::size_t dim,
                                   const std::string& id_prefix);

/// Writes manifests (src.jsonl, tgt.jsonl, src_noise.jsonl,
/// tgt_noise.jsonl), sentence files, src.demb / tgt.demb and gold.tsv.
void write_fixture(const PlantedCorpus& corpus, const std::filesystem::path& dir);

std::vector<Document> concat(std::vector<Document> a, const std::vector<Document>& b);

}  // namespace docmine::testing
