#include "docmine/dac.hpp"

#include <algorithm>
#include <charconv>
#include <tuple>
#include <unordered_set>

#include "docmine/error.hpp"
#include "docmine/text_io.hpp"

namespace docmine {
namespace {

constexpr const char* kModule = "dac";

std::size_t lookup(const ChunkCounts& counts, std::string_view doc, const char* side) {
  auto it = counts.find(doc);
  if (it == counts.end()) {
    throw Error(Errc::unknown_id, kModule,
                std::string("unknown ") + side + " doc_id '" + std::string(doc) + "'");
  }
  return it->second;
}

EmbeddingMatrix unit_rows(const EmbeddingMatrix& all, std::span<const ChunkUnit> units) {
  std::vector<std::string> ids;
  ids.reserve(units.size());
  for (const auto& u : units) ids.push_back(u.unit_id);
  return all.select(ids);
}

}  // namespace

double alignment_coefficient(std::size_t n_aligned, std::size_t n_src, std::size_t n_tgt) {
  return 2.0 * static_cast<double>(n_aligned) / static_cast<double>(n_src + n_tgt);
}

UnitRef parse_unit_id(std::string_view unit_id) {
  const auto hash = unit_id.rfind('#');
  if (hash == std::string_view::npos || hash == 0 || hash + 1 == unit_id.size()) {
    throw Error(Errc::malformed_unit_id, kModule,
                "unit id '" + std::string(unit_id) + "' is not <doc_id>#<index>");
  }
  const auto digits = unit_id.substr(hash + 1);
  std::size_t index = 0;
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), index);
  if (ec != std::errc{} || ptr != digits.data() + digits.size()) {
    throw Error(Errc::malformed_unit_id, kModule,
                "unit id '" + std::string(unit_id) + "' has a non-numeric chunk index");
  }
  return {unit_id.substr(0, hash), index};
}

ChunkCounts chunk_counts(std::span<const ChunkUnit> units) {
  ChunkCounts counts;
  for (const auto& u : units) ++counts[u.doc_id];
  return counts;
}

std::vector<DocPairScore> aggregate(std::span<const AlignedUnitPair> chunk_pairs,
                                    const ChunkCounts& src_counts,
                                    const ChunkCounts& tgt_counts) {
  std::map<std::pair<std::string_view, std::string_view>, DocPairScore> by_pair;
  for (const auto& p : chunk_pairs) {
    const auto src = parse_unit_id(p.src_id);
    const auto tgt = parse_unit_id(p.tgt_id);
    const auto n_src = lookup(src_counts, src.doc_id, "source");
    const auto n_tgt = lookup(tgt_counts, tgt.doc_id, "target");
    auto [it, fresh] = by_pair.try_emplace({src.doc_id, tgt.doc_id});
    auto& score = it->second;
    if (fresh) {
      score.src_doc = std::string(src.doc_id);
      score.tgt_doc = std::string(tgt.doc_id);
      score.n_src = n_src;
      score.n_tgt = n_tgt;
    }
    ++score.n_aligned;
    score.margin_sum += p.margin;
  }

  std::vector<DocPairScore> out;
  out.reserve(by_pair.size());
  for (auto& [key, score] : by_pair) {
    score.dac = alignment_coefficient(score.n_aligned, score.n_src, score.n_tgt);
    out.push_back(std::move(score));
  }
  return out;
}

std::vector<DocPairScore> select_pairs(std::span<const DocPairScore> scores,
                                       const DacConfig& config) {
  if (!(config.threshold >= 0.0 && config.threshold <= 1.0)) {
    throw Error(Errc::invalid_argument, kModule, "threshold must lie in [0, 1]",
                ErrorKind::validation);
  }
  std::vector<const DocPairScore*> order;
  for (const auto& s : scores) {
    if (s.dac >= config.threshold) order.push_back(&s);
  }
  std::sort(order.begin(), order.end(), [](const DocPairScore* a, const DocPairScore* b) {
    if (a->dac != b->dac) return a->dac > b->dac;
    if (a->margin_sum != b->margin_sum) return a->margin_sum > b->margin_sum;
    return std::tie(a->src_doc, a->tgt_doc) < std::tie(b->src_doc, b->tgt_doc);
  });

  std::unordered_set<std::string_view> used_src;
  std::unordered_set<std::string_view> used_tgt;
  std::vector<DocPairScore> selected;
  for (const DocPairScore* s : order) {
    if (config.one_to_one) {
      if (used_src.contains(s->src_doc) || used_tgt.contains(s->tgt_doc)) continue;
      used_src.insert(s->src_doc);
      used_tgt.insert(s->tgt_doc);
    }
    selected.push_back(*s);
  }
  std::sort(selected.begin(), selected.end(), [](const DocPairScore& a, const DocPairScore& b) {
    return std::tie(a.src_doc, a.tgt_doc) < std::tie(b.src_doc, b.tgt_doc);
  });
  return selected;
}

DacRun align_documents_dac(const std::vector<Document>& src_docs,
                           const std::vector<Document>& tgt_docs,
                           const EmbeddingMatrix& src_units,
                           const EmbeddingMatrix& tgt_units, const DacConfig& config) {
  const auto src_chunks = segment_corpus(src_docs, config.granularity);
  const auto tgt_chunks = segment_corpus(tgt_docs, config.granularity);

  DacRun run;
  run.chunk_pairs = mine(unit_rows(src_units, src_chunks), unit_rows(tgt_units, tgt_chunks),
                         config.margin);
  if (config.margin_floor) {
    std::erase_if(run.chunk_pairs,
                  [&](const AlignedUnitPair& p) { return p.margin < *config.margin_floor; });
  }
  run.scores = aggregate(run.chunk_pairs, chunk_counts(src_chunks), chunk_counts(tgt_chunks));
  run.selected = select_pairs(run.scores, config);
  return run;
}

std::string format_doc_pairs_tsv(std::span<const DocPairScore> pairs) {
  std::string out;
  for (const auto& p : pairs) {
    out += escape_tsv(p.src_doc);
    out += '\t';
    out += escape_tsv(p.tgt_doc);
    out += '\t';
    out += std::to_string(p.n_src);
    out += '\t';
    out += std::to_string(p.n_tgt);
    out += '\t';
    out += std::to_string(p.n_aligned);
    out += '\t';
    out += fixed6(p.dac);
    out += '\n';
  }
  return out;
}

void write_doc_pairs_tsv(std::span<const DocPairScore> pairs, const std::filesystem::path& path) {
  write_text_file(path, format_doc_pairs_tsv(pairs));
}

}  // namespace docmine
