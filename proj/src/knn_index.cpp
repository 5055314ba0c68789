#include "docmine/knn_index.hpp"

#include <algorithm>

#include "docmine/error.hpp"
#include "docmine/kernels.hpp"
#include "docmine/parallel.hpp"

namespace docmine {
namespace {

constexpr const char* kModule = "knn_index";

// Strict "better than" used for ranking: higher score, then lower row.
inline bool better(const Neighbor& a, const Neighbor& b) {
  return a.score > b.score || (a.score == b.score && a.row < b.row);
}

// Bounded selection of the k best neighbors. The heap front is the worst
// kept candidate.
class TopK {
 public:
  explicit TopK(std::size_t k) : k_(k) { heap_.reserve(k); }

  void offer(std::size_t row, double score) {
    const Neighbor cand{row, score};
    if (heap_.size() < k_) {
      heap_.push_back(cand);
      std::push_heap(heap_.begin(), heap_.end(), better);
    } else if (better(cand, heap_.front())) {
      std::pop_heap(heap_.begin(), heap_.end(), better);
      heap_.back() = cand;
      std::push_heap(heap_.begin(), heap_.end(), better);
    }
  }

  std::vector<Neighbor> take_sorted() {
    std::sort(heap_.begin(), heap_.end(), better);
    return std::move(heap_);
  }

 private:
  std::size_t k_;
  std::vector<Neighbor> heap_;
};

}  // namespace

FlatIndex::FlatIndex(EmbeddingMatrix matrix) {
  if (matrix.empty()) throw Error(Errc::empty_input, kModule, "cannot index an empty matrix");
  if (!is_normalized(matrix, kIndexNormTolerance)) {
    throw Error(Errc::not_normalized, kModule,
                "index rows must be unit-norm (normalize embeddings first)");
  }
  matrix_ = std::make_shared<const EmbeddingMatrix>(std::move(matrix));
}

std::vector<NeighborList> FlatIndex::search(const EmbeddingMatrix& queries, std::size_t k,
                                            const SearchOptions& options) const {
  if (k == 0) throw Error(Errc::invalid_argument, kModule, "k must be >= 1");
  if (queries.empty()) return {};
  if (queries.dim() != dim()) {
    throw Error(Errc::dimension_mismatch, kModule,
                "query dim " + std::to_string(queries.dim()) + " != index dim " +
                    std::to_string(dim()));
  }
  const std::size_t kk = std::min(k, size());
  const std::size_t block = std::max<std::size_t>(options.query_block, 1);
  const std::size_t tile = std::max<std::size_t>(options.row_tile, 1);
  const std::size_t n_blocks = (queries.rows() + block - 1) / block;
  const auto& kern = kernels();
  const float* base = matrix_->data().data();
  const std::size_t d = dim();

  std::vector<NeighborList> results(queries.rows());
  parallel_for(n_blocks, options.workers, [&](std::size_t b) {
    const std::size_t q0 = b * block;
    const std::size_t nq = std::min(block, queries.rows() - q0);
    std::vector<TopK> tops(nq, TopK(kk));
    std::vector<double> scores(nq * tile);
    const float* qdata = queries.data().data() + q0 * d;

    for (std::size_t r0 = 0; r0 < size(); r0 += tile) {
      const std::size_t nr = std::min(tile, size() - r0);
      kern.dot_tile(qdata, nq, base + r0 * d, nr, d, scores.data());
      for (std::size_t q = 0; q < nq; ++q) {
        const double* s = scores.data() + q * nr;
        for (std::size_t r = 0; r < nr; ++r) tops[q].offer(r0 + r, s[r]);
      }
    }
    for (std::size_t q = 0; q < nq; ++q) {
      results[q0 + q] = NeighborList{q0 + q, tops[q].take_sorted()};
    }
  });
  return results;
}

}  // namespace docmine
