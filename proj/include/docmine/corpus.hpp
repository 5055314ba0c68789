#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace docmine {

struct Document {
  std::string doc_id;
  std::string lang;
  std::vector<std::string> sentences;
};

/// Tag for the G = |D| level: one unit per document. Only the pooling path
/// handles it; segment() rejects it.
struct WholeDocument {
  bool operator==(const WholeDocument&) const = default;
};

class Granularity {
 public:
  /// Throws Error(invalid_argument) when sentences_per_chunk is zero.
  explicit Granularity(std::size_t sentences_per_chunk);
  Granularity(WholeDocument) : value_(WholeDocument{}) {}

  static Granularity parse(std::string_view text);  // "1", "4", "doc"

  bool is_whole_document() const noexcept {
    return std::holds_alternative<WholeDocument>(value_);
  }
  /// Sentences per chunk; throws for WholeDocument.
  std::size_t sentences() const;
  std::string to_string() const;

  bool operator==(const Granularity&) const = default;

 private:
  std::variant<std::size_t, WholeDocument> value_;
};

struct ChunkUnit {
  std::string unit_id;  // "<doc_id>#<chunk_index>"
  std::string doc_id;
  std::size_t chunk_index = 0;
  std::string text;
  std::size_t sentence_count = 0;
  std::size_t token_count = 0;
};

std::string make_unit_id(std::string_view doc_id, std::size_t chunk_index);

/// Count of maximal runs of non-whitespace bytes (ASCII whitespace).
std::size_t count_tokens(std::string_view text);
std::vector<std::string_view> split_tokens(std::string_view text);

/// Reads a JSON-lines manifest of {"doc_id", "lang", "path"} records.
/// Relative sentence-file paths resolve against the manifest's directory.
std::vector<Document> load_corpus(const std::filesystem::path& manifest_path);

/// Validates the Document invariants for an in-memory corpus side
/// (unique ids, non-empty sentence lists, no blank sentences).
void validate_corpus(const std::vector<Document>& docs);

std::vector<ChunkUnit> segment(const Document& doc, const Granularity& g);
std::vector<ChunkUnit> segment_corpus(const std::vector<Document>& docs,
                                      const Granularity& g);

}  // namespace docmine
