#pragma once

#include <chrono>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "docmine/corpus.hpp"
#include "docmine/embedding.hpp"

namespace docmine {

/// Environment variable that overrides the endpoint given on the command line.
inline constexpr const char* kEndpointEnvVar = "DOCMINE_EMBED_ENDPOINT";

struct EmbedClientOptions {
  std::size_t batch_size = 32;
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{200};  // doubles after each failure
  std::size_t concurrency = 1;                     // batches in flight
  std::chrono::seconds timeout{120};
};

struct Endpoint {
  std::string origin;  // "http://host:port"
  std::string path;    // "/embed"
};

/// Accepts http://host[:port][/path]. Throws Error(invalid_argument).
Endpoint parse_endpoint(std::string_view url);

/// Endpoint from DOCMINE_EMBED_ENDPOINT when set, else `fallback`.
std::optional<std::string> resolve_endpoint(std::optional<std::string> fallback);

/// POSTs {"texts": [...]} in batches and expects {"vectors": [[...], ...]}
/// back, one vector per text. Rows come back in input order and normalized.
///
/// Transport errors and 5xx responses are retried with exponential backoff
/// up to max_attempts; other statuses fail at once. A response with the
/// wrong vector count, inconsistent dimensions, or a NaN/Inf component
/// (JSON NaN/Infinity tokens are tolerated on the wire) throws, naming the
/// offending unit.
EmbeddingMatrix fetch_embeddings(std::span<const ChunkUnit> units, std::string_view endpoint,
                                 const EmbedClientOptions& options = {});

EmbeddingMatrix fetch_embeddings(std::span<const std::string> ids,
                                 std::span<const std::string> texts, std::string_view endpoint,
                                 const EmbedClientOptions& options = {});

}  // namespace docmine
