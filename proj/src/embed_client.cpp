#include "docmine/embed_client.hpp"

#include <httplib.h>

#include <cmath>
#include <cstdlib>
#include <regex>
#include <thread>
#include <vector>

#include <json.hpp>

#include "docmine/error.hpp"
#include "docmine/parallel.hpp"

namespace docmine {
namespace {

constexpr const char* kModule = "embed_store";

// Python's json module emits bare NaN / Infinity; map them to null outside
// string literals so the parser accepts the body and the finiteness check
// can report which unit was affected.
std::string sanitize_non_finite(std::string_view body) {
  std::string out;
  out.reserve(body.size());
  bool in_string = false;
  for (std::size_t i = 0; i < body.size(); ++i) {
    const char c = body[i];
    if (in_string) {
      out += c;
      if (c == '\\' && i + 1 < body.size()) {
        out += body[++i];
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
      out += c;
    } else if (body.substr(i, 3) == "NaN") {
      out += "null";
      i += 2;
    } else if (body.substr(i, 9) == "-Infinity") {
      out += "null";
      i += 8;
    } else if (body.substr(i, 8) == "Infinity") {
      out += "null";
      i += 7;
    } else {
      out += c;
    }
  }
  return out;
}

struct Batch {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::vector<std::vector<float>> vectors;
};

std::vector<std::vector<float>> request_batch(const Endpoint& endpoint,
                                              std::span<const std::string> ids,
                                              std::span<const std::string> texts,
                                              const EmbedClientOptions& options) {
  const std::string body = nlohmann::json{{"texts", texts}}.dump();
  auto backoff = options.initial_backoff;
  std::string last_error;

  for (int attempt = 1; attempt <= options.max_attempts; ++attempt) {
    if (attempt > 1) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
    httplib::Client client(endpoint.origin);
    client.set_connection_timeout(options.timeout);
    client.set_read_timeout(options.timeout);
    auto res = client.Post(endpoint.path, body, "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status < 200 || res->status >= 300) {
      throw Error(Errc::http_failure, kModule,
                  "embedding service returned HTTP " + std::to_string(res->status) +
                      " for batch starting at '" + ids.front() + "'");
    }

    nlohmann::json parsed;
    try {
      parsed = nlohmann::json::parse(sanitize_non_finite(res->body));
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(Errc::malformed_input, kModule,
                  std::string("embedding service sent invalid JSON: ") + e.what());
    }
    if (!parsed.is_object() || !parsed.contains("vectors") || !parsed["vectors"].is_array()) {
      throw Error(Errc::malformed_input, kModule, "embedding response lacks a 'vectors' array");
    }
    const auto& vectors = parsed["vectors"];
    if (vectors.size() != texts.size()) {
      throw Error(Errc::count_mismatch, kModule,
                  "embedding service returned " + std::to_string(vectors.size()) +
                      " vectors for " + std::to_string(texts.size()) +
                      " texts (batch starting at '" + ids.front() + "')");
    }
    std::vector<std::vector<float>> out(vectors.size());
    for (std::size_t i = 0; i < vectors.size(); ++i) {
      if (!vectors[i].is_array()) {
        throw Error(Errc::malformed_input, kModule, "vector for '" + ids[i] + "' is not an array");
      }
      out[i].reserve(vectors[i].size());
      for (const auto& x : vectors[i]) {
        if (!x.is_number()) {
          throw Error(Errc::non_finite, kModule,
                      "vector for '" + ids[i] + "' has a NaN or non-numeric component");
        }
        const auto v = x.get<double>();
        if (!std::isfinite(v) || !std::isfinite(static_cast<float>(v))) {
          throw Error(Errc::non_finite, kModule,
                      "vector for '" + ids[i] + "' has an infinite component");
        }
        out[i].push_back(static_cast<float>(v));
      }
    }
    return out;
  }
  throw Error(Errc::http_failure, kModule,
              "embedding request failed after " + std::to_string(options.max_attempts) +
                  " attempts: " + last_error);
}

}  // namespace

Endpoint parse_endpoint(std::string_view url) {
  static const std::regex pattern(R"(^(http://[^/\s]+)(/\S*)?$)", std::regex::icase);
  std::match_results<std::string_view::const_iterator> m;
  if (!std::regex_match(url.begin(), url.end(), m, pattern)) {
    throw Error(Errc::invalid_argument, kModule,
                "endpoint must look like http://host[:port][/path], got '" + std::string(url) + "'",
                ErrorKind::validation);
  }
  Endpoint endpoint{m[1].str(), m[2].matched ? m[2].str() : std::string("/")};
  return endpoint;
}

std::optional<std::string> resolve_endpoint(std::optional<std::string> fallback) {
  if (const char* env = std::getenv(kEndpointEnvVar); env && *env) return std::string(env);
  return fallback;
}

EmbeddingMatrix fetch_embeddings(std::span<const std::string> ids,
                                 std::span<const std::string> texts, std::string_view endpoint,
                                 const EmbedClientOptions& options) {
  if (options.batch_size == 0) {
    throw Error(Errc::invalid_argument, kModule, "batch size must be >= 1", ErrorKind::validation);
  }
  if (ids.size() != texts.size()) {
    throw Error(Errc::count_mismatch, kModule, "ids and texts differ in length");
  }
  if (ids.empty()) throw Error(Errc::empty_input, kModule, "no units to embed");
  const Endpoint target = parse_endpoint(endpoint);

  std::vector<Batch> batches;
  for (std::size_t begin = 0; begin < ids.size(); begin += options.batch_size) {
    batches.push_back({begin, std::min(ids.size(), begin + options.batch_size), {}});
  }
  parallel_for(batches.size(), options.concurrency, [&](std::size_t b) {
    auto& batch = batches[b];
    const std::size_t n = batch.end - batch.begin;
    batch.vectors = request_batch(target, ids.subspan(batch.begin, n),
                                  texts.subspan(batch.begin, n), options);
  });

  const std::size_t dim = batches.front().vectors.front().size();
  if (dim == 0) throw Error(Errc::dimension_mismatch, kModule, "service returned empty vectors");
  std::vector<float> data;
  data.reserve(ids.size() * dim);
  for (const auto& batch : batches) {
    for (std::size_t i = 0; i < batch.vectors.size(); ++i) {
      const auto& v = batch.vectors[i];
      if (v.size() != dim) {
        throw Error(Errc::dimension_mismatch, kModule,
                    "vector for '" + ids[batch.begin + i] + "' has dim " +
                        std::to_string(v.size()) + ", expected " + std::to_string(dim));
      }
      data.insert(data.end(), v.begin(), v.end());
    }
  }
  return normalize(
      EmbeddingMatrix(dim, std::vector<std::string>(ids.begin(), ids.end()), std::move(data)));
}

EmbeddingMatrix fetch_embeddings(std::span<const ChunkUnit> units, std::string_view endpoint,
                                 const EmbedClientOptions& options) {
  std::vector<std::string> ids;
  std::vector<std::string> texts;
  ids.reserve(units.size());
  texts.reserve(units.size());
  for (const auto& u : units) {
    ids.push_back(u.unit_id);
    texts.push_back(u.text);
  }
  return fetch_embeddings(ids, texts, endpoint, options);
}

}  // namespace docmine
