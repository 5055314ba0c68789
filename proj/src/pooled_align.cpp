#include "docmine/pooled_align.hpp"

namespace docmine {

PooledRun align_documents_pooled(const std::vector<Document>& src_docs,
                                 const std::vector<Document>& tgt_docs,
                                 const EmbeddingMatrix& src_sentences,
                                 const EmbeddingMatrix& tgt_sentences,
                                 const PooledConfig& config, const IdfTable* src_idf,
                                 const IdfTable* tgt_idf) {
  const bool idf = needs_idf(config.method);
  PooledRun run;
  run.src_pooled = pool_corpus(src_docs, src_sentences, config.method, idf ? src_idf : nullptr,
                               config.margin.workers);
  run.tgt_pooled = pool_corpus(tgt_docs, tgt_sentences, config.method, idf ? tgt_idf : nullptr,
                               config.margin.workers);
  run.pairs = mine(run.src_pooled, run.tgt_pooled, config.margin);
  if (config.margin_floor) {
    std::erase_if(run.pairs,
                  [&](const AlignedUnitPair& p) { return p.margin < *config.margin_floor; });
  }
  return run;
}

}  // namespace docmine
