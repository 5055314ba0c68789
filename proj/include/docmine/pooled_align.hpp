#pragma once

#include <optional>
#include <vector>

#include "docmine/corpus.hpp"
#include "docmine/embedding.hpp"
#include "docmine/miner.hpp"
#include "docmine/pooling.hpp"

namespace docmine {

struct PooledConfig {
  PoolingMethod method = PoolingMethod::mp;
  MarginParams margin;
  std::optional<double> margin_floor;
};

struct PooledRun {
  EmbeddingMatrix src_pooled;
  EmbeddingMatrix tgt_pooled;
  std::vector<AlignedUnitPair> pairs;  // ids are doc_ids
};

/// Baseline path: pool each document from its sentence embeddings, then mine
/// the two pooled matrices directly. For IDF/LIDF each side needs its own
/// IdfTable; passing null for those methods throws Error(missing_idf).
PooledRun align_documents_pooled(const std::vector<Document>& src_docs,
                                 const std::vector<Document>& tgt_docs,
                                 const EmbeddingMatrix& src_sentences,
                                 const EmbeddingMatrix& tgt_sentences,
                                 const PooledConfig& config, const IdfTable* src_idf = nullptr,
                                 const IdfTable* tgt_idf = nullptr);

}  // namespace docmine
