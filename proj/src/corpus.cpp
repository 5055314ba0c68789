#include "docmine/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <unordered_set>

#include <json.hpp>

#include "docmine/error.hpp"
#include "docmine/text_io.hpp"

namespace docmine {
namespace {

constexpr const char* kModule = "corpus";

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

}  // namespace

Granularity::Granularity(std::size_t sentences_per_chunk) : value_(sentences_per_chunk) {
  if (sentences_per_chunk == 0) {
    throw Error(Errc::invalid_argument, kModule, "granularity must be >= 1",
                ErrorKind::validation);
  }
}

Granularity Granularity::parse(std::string_view text) {
  if (text == "doc" || text == "D" || text == "whole") return Granularity(WholeDocument{});
  std::size_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw Error(Errc::invalid_argument, kModule,
                "invalid granularity '" + std::string(text) + "'", ErrorKind::validation);
  }
  return Granularity(value);
}

std::size_t Granularity::sentences() const {
  if (is_whole_document()) {
    throw Error(Errc::invalid_argument, kModule,
                "whole-document granularity has no fixed sentence count");
  }
  return std::get<std::size_t>(value_);
}

std::string Granularity::to_string() const {
  return is_whole_document() ? "doc" : std::to_string(std::get<std::size_t>(value_));
}

std::string make_unit_id(std::string_view doc_id, std::size_t chunk_index) {
  std::string id(doc_id);
  id += '#';
  id += std::to_string(chunk_index);
  return id;
}

std::size_t count_tokens(std::string_view text) {
  std::size_t count = 0;
  bool in_token = false;
  for (char c : text) {
    bool space = is_space(c);
    if (!space && !in_token) ++count;
    in_token = !space;
  }
  return count;
}

std::vector<std::string_view> split_tokens(std::string_view text) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    std::size_t start = i;
    while (i < text.size() && !is_space(text[i])) ++i;
    if (i > start) tokens.push_back(text.substr(start, i - start));
  }
  return tokens;
}

std::vector<Document> load_corpus(const std::filesystem::path& manifest_path) {
  if (!std::filesystem::is_regular_file(manifest_path)) {
    throw Error(Errc::missing_file, kModule, "manifest not found: " + manifest_path.string(),
                ErrorKind::validation);
  }
  const auto base_dir = manifest_path.parent_path();
  std::vector<Document> docs;
  std::unordered_set<std::string> seen;

  const auto lines = read_lines(manifest_path);
  for (std::size_t lineno = 0; lineno < lines.size(); ++lineno) {
    if (trim(lines[lineno]).empty()) continue;
    const std::string where = manifest_path.string() + ":" + std::to_string(lineno + 1);

    nlohmann::json record;
    try {
      record = nlohmann::json::parse(lines[lineno]);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(Errc::malformed_input, kModule, where + ": " + e.what(),
                  ErrorKind::validation);
    }
    for (const char* key : {"doc_id", "lang", "path"}) {
      if (!record.is_object() || !record.contains(key) || !record[key].is_string()) {
        throw Error(Errc::malformed_input, kModule,
                    where + ": missing string field '" + key + "'", ErrorKind::validation);
      }
    }

    Document doc;
    doc.doc_id = record["doc_id"].get<std::string>();
    doc.lang = record["lang"].get<std::string>();
    std::filesystem::path path = record["path"].get<std::string>();
    if (path.is_relative()) path = base_dir / path;

    if (!seen.insert(doc.doc_id).second) {
      throw Error(Errc::duplicate_id, kModule,
                  "duplicate doc_id '" + doc.doc_id + "' at " + where, ErrorKind::validation);
    }
    if (!std::filesystem::is_regular_file(path)) {
      throw Error(Errc::missing_file, kModule,
                  "doc '" + doc.doc_id + "': sentence file not found: " + path.string(),
                  ErrorKind::validation);
    }
    for (auto& line : read_lines(path)) {
      auto sentence = trim(line);
      if (!sentence.empty()) doc.sentences.emplace_back(sentence);
    }
    if (doc.sentences.empty()) {
      throw Error(Errc::empty_document, kModule,
                  "doc '" + doc.doc_id + "' has no sentences: " + path.string(),
                  ErrorKind::validation);
    }
    docs.push_back(std::move(doc));
  }
  return docs;
}

void validate_corpus(const std::vector<Document>& docs) {
  std::unordered_set<std::string_view> seen;
  for (const auto& doc : docs) {
    if (!seen.insert(doc.doc_id).second) {
      throw Error(Errc::duplicate_id, kModule, "duplicate doc_id '" + doc.doc_id + "'",
                  ErrorKind::validation);
    }
    if (doc.sentences.empty()) {
      throw Error(Errc::empty_document, kModule, "doc '" + doc.doc_id + "' has no sentences",
                  ErrorKind::validation);
    }
    for (const auto& s : doc.sentences) {
      if (trim(s).empty()) {
        throw Error(Errc::empty_document, kModule,
                    "doc '" + doc.doc_id + "' contains a blank sentence",
                    ErrorKind::validation);
      }
    }
  }
}

std::vector<ChunkUnit> segment(const Document& doc, const Granularity& g) {
  const std::size_t per_chunk = g.sentences();
  const std::size_t n = doc.sentences.size();
  std::vector<ChunkUnit> units;
  units.reserve((n + per_chunk - 1) / per_chunk);

  for (std::size_t begin = 0, index = 0; begin < n; begin += per_chunk, ++index) {
    const std::size_t end = std::min(n, begin + per_chunk);
    ChunkUnit unit;
    unit.unit_id = make_unit_id(doc.doc_id, index);
    unit.doc_id = doc.doc_id;
    unit.chunk_index = index;
    unit.sentence_count = end - begin;
    for (std::size_t i = begin; i < end; ++i) {
      if (i > begin) unit.text += ' ';
      unit.text += doc.sentences[i];
    }
    unit.token_count = count_tokens(unit.text);
    units.push_back(std::move(unit));
  }
  return units;
}

std::vector<ChunkUnit> segment_corpus(const std::vector<Document>& docs,
                                      const Granularity& g) {
  std::vector<ChunkUnit> units;
  for (const auto& doc : docs) {
    auto chunks = segment(doc, g);
    units.insert(units.end(), std::make_move_iterator(chunks.begin()),
                 std::make_move_iterator(chunks.end()));
  }
  return units;
}

}  // namespace docmine
