#include "docmine/pooling.hpp"

#include <unicode/normalizer2.h>
#include <unicode/unistr.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <unordered_set>

#include "docmine/error.hpp"
#include "docmine/kernels.hpp"
#include "docmine/parallel.hpp"

namespace docmine {
namespace {

constexpr const char* kModule = "pooling";

bool is_ascii(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](char c) { return static_cast<unsigned char>(c) < 0x80; });
}

}  // namespace

std::string_view to_string(PoolingMethod method) noexcept {
  switch (method) {
    case PoolingMethod::mp: return "MP";
    case PoolingMethod::lp: return "LP";
    case PoolingMethod::idf: return "IDF";
    case PoolingMethod::lidf: return "LIDF";
  }
  return "MP";
}

PoolingMethod parse_pooling_method(std::string_view name) {
  std::string upper(name);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  if (upper == "MP") return PoolingMethod::mp;
  if (upper == "LP") return PoolingMethod::lp;
  if (upper == "IDF") return PoolingMethod::idf;
  if (upper == "LIDF") return PoolingMethod::lidf;
  throw Error(Errc::invalid_argument, kModule, "unknown pooling method '" + std::string(name) + "'",
              ErrorKind::validation);
}

std::string nfc(std::string_view utf8) {
  if (is_ascii(utf8)) return std::string(utf8);
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* normalizer = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) {
    throw Error(Errc::invalid_argument, kModule, "ICU NFC normalizer unavailable");
  }
  const auto source = icu::UnicodeString::fromUTF8(
      icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
  const auto normalized = normalizer->normalize(source, status);
  if (U_FAILURE(status)) {
    throw Error(Errc::invalid_argument, kModule, "NFC normalization failed");
  }
  std::string out;
  normalized.toUTF8String(out);
  return out;
}

std::size_t IdfTable::df(std::string_view token) const {
  auto it = df_.find(nfc(token));
  return it == df_.end() ? 0 : it->second;
}

double IdfTable::idf_for_df(std::size_t df) const {
  return std::log((1.0 + static_cast<double>(doc_count_)) / (1.0 + static_cast<double>(df))) + 1.0;
}

double IdfTable::idf(std::string_view token) const { return idf_for_df(df(token)); }

double IdfTable::mean_idf(std::string_view text) const {
  const auto tokens = split_tokens(text);
  if (tokens.empty()) return 0.0;
  double sum = 0.0;
  for (auto t : tokens) sum += idf(t);
  return sum / static_cast<double>(tokens.size());
}

IdfTable build_idf(const std::vector<Document>& documents) {
  if (documents.empty()) {
    throw Error(Errc::empty_input, kModule, "cannot build IDF statistics from zero documents");
  }
  IdfTable table;
  table.doc_count_ = documents.size();
  for (const auto& doc : documents) {
    std::unordered_set<std::string> distinct;
    for (const auto& sentence : doc.sentences) {
      for (auto token : split_tokens(sentence)) distinct.insert(nfc(token));
    }
    for (auto& token : distinct) ++table.df_[token];
  }
  return table;
}

double unit_weight(const ChunkUnit& unit, PoolingMethod method, const IdfTable* idf) {
  const auto tokens = static_cast<double>(unit.token_count);
  switch (method) {
    case PoolingMethod::mp: return 1.0;
    case PoolingMethod::lp: return tokens;
    case PoolingMethod::idf: return idf->mean_idf(unit.text);
    case PoolingMethod::lidf: return tokens * idf->mean_idf(unit.text);
  }
  return 1.0;
}

std::vector<float> pool_document(std::span<const ChunkUnit> units, const EmbeddingMatrix& rows,
                                 PoolingMethod method, const IdfTable* idf) {
  const std::string doc = units.empty() ? std::string("<empty>") : units.front().doc_id;
  if (units.empty()) throw Error(Errc::empty_input, kModule, "no units to pool");
  if (rows.rows() != units.size()) {
    throw Error(Errc::count_mismatch, kModule,
                "doc '" + doc + "': " + std::to_string(units.size()) + " units but " +
                    std::to_string(rows.rows()) + " embedding rows");
  }
  if (needs_idf(method) && idf == nullptr) {
    throw Error(Errc::missing_idf, kModule,
                std::string(to_string(method)) + " pooling requires an IDF table");
  }
  if (!needs_idf(method) && idf != nullptr) {
    throw Error(Errc::invalid_argument, kModule,
                std::string(to_string(method)) + " pooling does not take an IDF table");
  }

  const auto& kern = kernels();
  std::vector<double> acc(rows.dim(), 0.0);
  double weight_total = 0.0;
  for (std::size_t i = 0; i < units.size(); ++i) {
    const double w = unit_weight(units[i], method, idf);
    if (w == 0.0) continue;
    weight_total += w;
    kern.accumulate_scaled(acc.data(), rows.row(i).data(), w, rows.dim());
  }
  if (!(weight_total > 0.0)) {
    throw Error(Errc::zero_weights, kModule,
                "doc '" + doc + "': every unit has zero " + std::string(to_string(method)) +
                    " weight");
  }
  double norm = 0.0;
  for (double v : acc) norm += v * v;
  norm = std::sqrt(norm);
  if (!(norm > 1e-12)) {
    throw Error(Errc::zero_norm, kModule, "doc '" + doc + "': pooled vector cancels to zero");
  }
  std::vector<float> out(rows.dim());
  for (std::size_t c = 0; c < out.size(); ++c) out[c] = static_cast<float>(acc[c] / norm);
  return out;
}

EmbeddingMatrix pool_corpus(const std::vector<Document>& documents,
                            const EmbeddingMatrix& sentence_embeddings, PoolingMethod method,
                            const IdfTable* idf, std::size_t workers) {
  if (documents.empty()) throw Error(Errc::empty_input, kModule, "no documents to pool");
  const std::size_t dim = sentence_embeddings.dim();
  std::vector<std::string> ids(documents.size());
  std::vector<float> data(documents.size() * dim);

  parallel_for(documents.size(), workers, [&](std::size_t d) {
    const auto units = segment(documents[d], Granularity(1));
    std::vector<std::string> unit_ids;
    unit_ids.reserve(units.size());
    for (const auto& u : units) unit_ids.push_back(u.unit_id);
    const auto pooled =
        pool_document(units, sentence_embeddings.select(unit_ids), method, idf);
    ids[d] = documents[d].doc_id;
    std::copy(pooled.begin(), pooled.end(), data.begin() + static_cast<std::ptrdiff_t>(d * dim));
  });
  return EmbeddingMatrix(dim, std::move(ids), std::move(data));
}

}  // namespace docmine
