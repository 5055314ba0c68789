#include "docmine/miner.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>
#include <unordered_set>

#include "docmine/error.hpp"
#include "docmine/knn_index.hpp"
#include "docmine/text_io.hpp"

namespace docmine {
namespace {

constexpr const char* kModule = "miner";

struct RawCandidate {
  std::size_t src_row;
  std::size_t tgt_row;
  double cosine;
};

std::vector<double> neighborhood_mean(const std::vector<NeighborList>& lists) {
  std::vector<double> means(lists.size());
  for (std::size_t i = 0; i < lists.size(); ++i) {
    double sum = 0.0;
    for (const auto& n : lists[i].neighbors) sum += n.score;
    means[i] = sum / static_cast<double>(lists[i].neighbors.size());
  }
  return means;
}

bool ranks_before(const MarginCandidate& a, const MarginCandidate& b) {
  if (a.margin != b.margin) return a.margin > b.margin;
  if (a.cosine != b.cosine) return a.cosine > b.cosine;
  return std::tie(a.src_id, a.tgt_id) < std::tie(b.src_id, b.tgt_id);
}

}  // namespace

std::vector<MarginCandidate> margin_scores(const EmbeddingMatrix& src,
                                           const EmbeddingMatrix& tgt,
                                           const MarginParams& params,
                                           NeighborhoodMeans* means) {
  if (params.k == 0) throw Error(Errc::invalid_argument, kModule, "k must be >= 1");
  if (src.empty() || tgt.empty()) {
    throw Error(Errc::empty_input, kModule,
                std::string(src.empty() ? "source" : "target") + " side has no embeddings");
  }
  if (src.dim() != tgt.dim()) {
    throw Error(Errc::dimension_mismatch, kModule,
                "source dim " + std::to_string(src.dim()) + " != target dim " +
                    std::to_string(tgt.dim()));
  }

  const FlatIndex src_index(src);
  const FlatIndex tgt_index(tgt);
  const SearchOptions opts{params.workers, params.query_block};
  const auto forward = tgt_index.search(src, params.k, opts);   // NN_k(x) in Y
  const auto backward = src_index.search(tgt, params.k, opts);  // NN_k(y) in X

  const auto src_mean = neighborhood_mean(forward);
  const auto tgt_mean = neighborhood_mean(backward);

  std::vector<RawCandidate> raw;
  raw.reserve((forward.size() + backward.size()) * std::min(params.k, std::max(src.rows(), tgt.rows())));
  for (const auto& list : forward) {
    for (const auto& n : list.neighbors) raw.push_back({list.query_row, n.row, n.score});
  }
  for (const auto& list : backward) {
    for (const auto& n : list.neighbors) raw.push_back({n.row, list.query_row, n.score});
  }
  // Stable sort keeps the forward occurrence first; both directions compute
  // the same inner product, so either copy is equivalent.
  std::stable_sort(raw.begin(), raw.end(), [](const RawCandidate& a, const RawCandidate& b) {
    return std::tie(a.src_row, a.tgt_row) < std::tie(b.src_row, b.tgt_row);
  });
  raw.erase(std::unique(raw.begin(), raw.end(),
                        [](const RawCandidate& a, const RawCandidate& b) {
                          return a.src_row == b.src_row && a.tgt_row == b.tgt_row;
                        }),
            raw.end());

  std::vector<MarginCandidate> out;
  out.reserve(raw.size());
  for (const auto& c : raw) {
    const double denom = 0.5 * (src_mean[c.src_row] + tgt_mean[c.tgt_row]);
    const double margin = c.cosine / denom;
    if (!(denom > 0.0) || !(margin > 0.0) || !std::isfinite(margin)) continue;
    out.push_back({src.id(c.src_row), tgt.id(c.tgt_row), c.cosine, margin});
  }
  if (means) *means = NeighborhoodMeans{src_mean, tgt_mean};
  return out;
}

std::vector<AlignedUnitPair> greedy_accept(std::span<const MarginCandidate> candidates) {
  std::vector<const MarginCandidate*> order;
  order.reserve(candidates.size());
  for (const auto& c : candidates) order.push_back(&c);
  std::sort(order.begin(), order.end(),
            [](const MarginCandidate* a, const MarginCandidate* b) { return ranks_before(*a, *b); });

  std::unordered_set<std::string_view> used_src;
  std::unordered_set<std::string_view> used_tgt;
  std::vector<AlignedUnitPair> accepted;
  for (const MarginCandidate* c : order) {
    if (used_src.contains(c->src_id) || used_tgt.contains(c->tgt_id)) continue;
    used_src.insert(c->src_id);
    used_tgt.insert(c->tgt_id);
    accepted.push_back({c->src_id, c->tgt_id, c->cosine, c->margin});
  }
  return accepted;
}

std::vector<AlignedUnitPair> greedy_match(std::span<const MarginCandidate> candidates) {
  auto pairs = greedy_accept(candidates);
  std::sort(pairs.begin(), pairs.end(), [](const AlignedUnitPair& a, const AlignedUnitPair& b) {
    return std::tie(a.src_id, a.tgt_id) < std::tie(b.src_id, b.tgt_id);
  });
  return pairs;
}

std::vector<AlignedUnitPair> mine(const EmbeddingMatrix& src, const EmbeddingMatrix& tgt,
                                  const MarginParams& params) {
  const auto candidates = margin_scores(src, tgt, params);
  return greedy_match(candidates);
}

std::string format_pairs_tsv(std::span<const AlignedUnitPair> pairs) {
  std::string out;
  for (const auto& p : pairs) {
    out += escape_tsv(p.src_id);
    out += '\t';
    out += escape_tsv(p.tgt_id);
    out += '\t';
    out += fixed6(p.cosine);
    out += '\t';
    out += fixed6(p.margin);
    out += '\n';
  }
  return out;
}

void write_pairs_tsv(std::span<const AlignedUnitPair> pairs, const std::filesystem::path& path) {
  write_text_file(path, format_pairs_tsv(pairs));
}

}  // namespace docmine
