#include <gtest/gtest.h>

#include <httplib.h>

#include <atomic>
#include <functional>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "docmine/embed_client.hpp"
#include "docmine/error.hpp"
#include "error_code.hpp"

using namespace docmine;
using docmine::testing::error_code;
using namespace std::chrono_literals;

namespace {

/// Local embedding service double. The handler maps request texts to a
/// response (status, body).
class MockService {
 public:
  using Handler = std::function<std::pair<int, std::string>(const std::vector<std::string>&, int)>;

  explicit MockService(Handler handler) : handler_(std::move(handler)) {
    server_.Post("/embed", [this](const httplib::Request& req, httplib::Response& res) {
      const auto texts = nlohmann::json::parse(req.body)["texts"].get<std::vector<std::string>>();
      int call;
      {
        std::lock_guard lock(mutex_);
        call = calls_++;
        batches_.push_back(texts);
      }
      auto [status, body] = handler_(texts, call);
      res.status = status;
      res.set_content(body, "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~MockService() {
    server_.stop();
    thread_.join();
  }

  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/embed"; }
  int calls() const {
    std::lock_guard lock(mutex_);
    return calls_;
  }
  std::vector<std::vector<std::string>> batches() const {
    std::lock_guard lock(mutex_);
    return batches_;
  }

 private:
  Handler handler_;
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  mutable std::mutex mutex_;
  int calls_ = 0;
  std::vector<std::vector<std::string>> batches_;
};

// Deterministic toy embedding: (len(text), 1).
std::string vectors_for(const std::vector<std::string>& texts) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& t : texts) out.push_back({static_cast<double>(t.size()), 1.0});
  return nlohmann::json{{"vectors", out}}.dump();
}

std::vector<ChunkUnit> units(std::size_t n) {
  std::vector<ChunkUnit> out;
  for (std::size_t i = 0; i < n; ++i) {
    ChunkUnit u;
    u.doc_id = "d";
    u.chunk_index = i;
    u.unit_id = make_unit_id("d", i);
    u.text = std::string(i + 1, 'x');
    out.push_back(u);
  }
  return out;
}

EmbedClientOptions fast(std::size_t batch) {
  EmbedClientOptions o;
  o.batch_size = batch;
  o.initial_backoff = 1ms;
  o.timeout = 5s;
  return o;
}

}  // namespace

TEST(FetchEmbeddings, BatchesPreserveInputOrder) {
  MockService service([](const auto& texts, int) { return std::pair{200, vectors_for(texts)}; });
  const auto m = fetch_embeddings(units(5), service.url(), fast(2));
  EXPECT_EQ(service.calls(), 3);
  ASSERT_EQ(m.rows(), 5u);
  EXPECT_EQ(m.dim(), 2u);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(m.id(i), make_unit_id("d", i));
    const double len = static_cast<double>(i + 1);
    EXPECT_NEAR(m.row(i)[0], len / std::sqrt(len * len + 1.0), 1e-6);
  }
  EXPECT_TRUE(is_normalized(m, 1e-6));
}

TEST(FetchEmbeddings, ConcurrentBatchesStillAssembleInOrder) {
  MockService service([](const auto& texts, int) { return std::pair{200, vectors_for(texts)}; });
  auto opts = fast(3);
  opts.concurrency = 4;
  const auto m = fetch_embeddings(units(20), service.url(), opts);
  EXPECT_EQ(service.calls(), 7);
  for (std::size_t i = 0; i < 20; ++i) EXPECT_EQ(m.id(i), make_unit_id("d", i));
  const auto serial = fetch_embeddings(units(20), service.url(), fast(3));
  EXPECT_EQ(m, serial);
}

TEST(FetchEmbeddings, CountMismatchIsRejected) {
  MockService service([](const auto& texts, int) {
    auto shorter = texts;
    shorter.pop_back();
    return std::pair{200, vectors_for(shorter)};
  });
  EXPECT_EQ(error_code([&] { fetch_embeddings(units(5), service.url(), fast(5)); }),
            Errc::count_mismatch);
}

TEST(FetchEmbeddings, NaNComponentNamesUnit) {
  MockService service([](const auto&, int) {
    return std::pair{200, std::string(R"({"vectors": [[1, 0], [NaN, 1], [0, 1]]})")};
  });
  try {
    fetch_embeddings(units(3), service.url(), fast(3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::non_finite);
    EXPECT_NE(std::string(e.what()).find("d#1"), std::string::npos);
  }
}

TEST(FetchEmbeddings, InfinityComponentIsRejected) {
  MockService service([](const auto&, int) {
    return std::pair{200, std::string(R"({"vectors": [[1, -Infinity]]})")};
  });
  EXPECT_EQ(error_code([&] { fetch_embeddings(units(1), service.url(), fast(1)); }),
            Errc::non_finite);
}

TEST(FetchEmbeddings, RetriesServerErrorsThenSucceeds) {
  MockService service([](const auto& texts, int call) {
    if (call < 2) return std::pair{503, std::string("{}")};
    return std::pair{200, vectors_for(texts)};
  });
  const auto m = fetch_embeddings(units(2), service.url(), fast(2));
  EXPECT_EQ(service.calls(), 3);
  EXPECT_EQ(m.rows(), 2u);
}

TEST(FetchEmbeddings, GivesUpAfterThreeAttempts) {
  MockService service([](const auto&, int) { return std::pair{500, std::string("{}")}; });
  EXPECT_EQ(error_code([&] { fetch_embeddings(units(2), service.url(), fast(2)); }),
            Errc::http_failure);
  EXPECT_EQ(service.calls(), 3);
}

TEST(FetchEmbeddings, ClientErrorsAreNotRetried) {
  MockService service([](const auto&, int) { return std::pair{400, std::string("{}")}; });
  EXPECT_EQ(error_code([&] { fetch_embeddings(units(2), service.url(), fast(2)); }),
            Errc::http_failure);
  EXPECT_EQ(service.calls(), 1);
}

TEST(FetchEmbeddings, UnreachableEndpointFails) {
  // Bind and release a port so nothing is listening on it.
  int port;
  {
    httplib::Server probe;
    port = probe.bind_to_any_port("127.0.0.1");
  }
  auto opts = fast(2);
  opts.timeout = 1s;
  EXPECT_EQ(error_code([&] {
              fetch_embeddings(units(2), "http://127.0.0.1:" + std::to_string(port) + "/e", opts);
            }),
            Errc::http_failure);
}

TEST(FetchEmbeddings, InconsistentDimensionsAreRejected) {
  MockService service([](const auto&, int) {
    return std::pair{200, std::string(R"({"vectors": [[1, 0], [1, 0, 0]]})")};
  });
  EXPECT_EQ(error_code([&] { fetch_embeddings(units(2), service.url(), fast(2)); }),
            Errc::dimension_mismatch);
}

TEST(Endpoint, Parsing) {
  auto e = parse_endpoint("http://localhost:8080/v1/embed");
  EXPECT_EQ(e.origin, "http://localhost:8080");
  EXPECT_EQ(e.path, "/v1/embed");
  EXPECT_EQ(parse_endpoint("http://host").path, "/");
  EXPECT_EQ(error_code([] { parse_endpoint("ftp://host/x"); }), Errc::invalid_argument);
  EXPECT_EQ(error_code([] { fetch_embeddings(units(1), "http://h/x", EmbedClientOptions{0}); }),
            Errc::invalid_argument);
}

TEST(Endpoint, EnvironmentOverridesFlag) {
  ::unsetenv(kEndpointEnvVar);
  EXPECT_EQ(resolve_endpoint("http://flag/x"), "http://flag/x");
  EXPECT_FALSE(resolve_endpoint(std::nullopt));
  ::setenv(kEndpointEnvVar, "http://env/y", 1);
  EXPECT_EQ(resolve_endpoint("http://flag/x"), "http://env/y");
  ::unsetenv(kEndpointEnvVar);
}
