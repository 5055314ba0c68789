#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <fstream>

#include "docmine/embedding.hpp"
#include "docmine/error.hpp"
#include "error_code.hpp"
#include "planted.hpp"
#include "temp_dir.hpp"

using namespace docmine;
using docmine::testing::error_code;
using docmine::testing::TempDir;

namespace {

EmbeddingMatrix random_matrix(SplitMix64& rng, std::size_t rows, std::size_t dim) {
  std::vector<std::string> ids;
  std::vector<float> data;
  for (std::size_t r = 0; r < rows; ++r) {
    // Ids include multi-byte UTF-8 and separators to exercise the id block.
    ids.push_back("doc-\xE0\xA4\x85" + std::to_string(r) + "#" + std::to_string(rng.below(9)));
    for (std::size_t c = 0; c < dim; ++c) {
      data.push_back(static_cast<float>(docmine::testing::gaussian(rng) * 10.0));
    }
  }
  return EmbeddingMatrix(dim, std::move(ids), std::move(data));
}

}  // namespace

TEST(Normalize, PythagoreanRow) {
  const auto m = normalize(EmbeddingMatrix(2, {"a", "b"}, {3, 4, 1, 0}));
  EXPECT_NEAR(m.row(0)[0], 0.6f, 1e-7);
  EXPECT_NEAR(m.row(0)[1], 0.8f, 1e-7);
  EXPECT_EQ(m.row(1)[0], 1.0f);
  EXPECT_EQ(m.row(1)[1], 0.0f);
  EXPECT_EQ(m.ids(), (std::vector<std::string>{"a", "b"}));
}

TEST(Normalize, ZeroRowNamesUnit) {
  try {
    normalize(EmbeddingMatrix(2, {"ok", "dead"}, {1, 1, 0, 0}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::zero_norm);
    EXPECT_NE(std::string(e.what()).find("dead"), std::string::npos);
  }
}

TEST(Normalize, IdempotentAndUnitNorm) {
  SplitMix64 rng(5);
  for (int t = 0; t < 20; ++t) {
    const auto once = normalize(random_matrix(rng, 17, 1 + rng.below(40)));
    const auto twice = normalize(once);
    EXPECT_TRUE(is_normalized(once, 1e-4));
    for (std::size_t i = 0; i < once.data().size(); ++i) {
      EXPECT_NEAR(once.data()[i], twice.data()[i], 1e-7);
    }
  }
}

TEST(EmbeddingMatrix, ShapeAndIdInvariants) {
  EXPECT_EQ(error_code([] { EmbeddingMatrix(0, {}, {}); }), Errc::invalid_argument);
  EXPECT_EQ(error_code([] { EmbeddingMatrix(2, {"a"}, {1, 2, 3}); }), Errc::dimension_mismatch);
  EXPECT_EQ(error_code([] { EmbeddingMatrix(1, {"a", "a"}, {1, 2}); }), Errc::duplicate_id);
  const EmbeddingMatrix m(1, {"a", "b"}, {1, 2});
  EXPECT_EQ(m.find("b"), 1u);
  EXPECT_FALSE(m.find("c"));
  EXPECT_EQ(m.select(std::vector<std::string>{"b", "a"}).data()[0], 2.0f);
  EXPECT_EQ(error_code([&] { m.select(std::vector<std::string>{"c"}); }), Errc::unknown_id);
}

TEST(CheckFinite, RejectsNaNAndInf) {
  EXPECT_NO_THROW(check_finite(EmbeddingMatrix(1, {"a"}, {1})));
  EXPECT_EQ(error_code([] { check_finite(EmbeddingMatrix(1, {"a"}, {NAN})); }), Errc::non_finite);
  EXPECT_EQ(error_code([] { check_finite(EmbeddingMatrix(1, {"a"}, {INFINITY})); }),
            Errc::non_finite);
}

TEST(MatrixFile, SmallRoundTrip) {
  TempDir dir;
  const EmbeddingMatrix m(3, {"x#0", "x#1"}, {0.1f, -2.5f, 3e-8f, 1.0f, 0.0f, -0.0f});
  write_matrix(m, dir / "m.demb");
  const auto back = read_matrix(dir / "m.demb");
  EXPECT_EQ(back, m);
  EXPECT_TRUE(std::signbit(back.row(1)[2]));
}

TEST(MatrixFile, HeaderLayoutIsLittleEndian) {
  const auto bytes = encode_matrix(EmbeddingMatrix(2, {"ab"}, {1.0f, -1.0f}));
  const std::vector<std::uint8_t> expected = {
      'D', 'E', 'M', 'B', 1, 0,           // magic, version
      2, 0, 0, 0,                         // dim
      1, 0, 0, 0, 0, 0, 0, 0,             // rows
      2, 0, 0, 0, 'a', 'b',               // id
      0x00, 0x00, 0x80, 0x3f,             // 1.0f
      0x00, 0x00, 0x80, 0xbf};            // -1.0f
  EXPECT_EQ(bytes, expected);
}

TEST(MatrixFile, RandomRoundTripsAreBitExact) {
  SplitMix64 rng(99);
  for (int t = 0; t < 50; ++t) {
    const auto m = random_matrix(rng, rng.below(30), 1 + rng.below(33));
    const auto back = decode_matrix(encode_matrix(m));
    ASSERT_EQ(back.ids(), m.ids());
    ASSERT_EQ(back.dim(), m.dim());
    ASSERT_EQ(std::memcmp(back.data().data(), m.data().data(), m.data().size_bytes()), 0);
  }
}

TEST(MatrixFile, CorruptionIsRejected) {
  const auto good = encode_matrix(EmbeddingMatrix(3, {"a", "b"}, {1, 2, 3, 4, 5, 6}));

  auto truncated = good;
  truncated.resize(good.size() - 5);
  EXPECT_EQ(error_code([&] { decode_matrix(truncated); }), Errc::payload_size);

  auto extra = good;
  extra.push_back(0);
  EXPECT_EQ(error_code([&] { decode_matrix(extra); }), Errc::payload_size);

  auto bad_magic = good;
  bad_magic[0] = 'X';
  EXPECT_EQ(error_code([&] { decode_matrix(bad_magic); }), Errc::bad_magic);

  auto zero_dim = good;
  zero_dim[6] = 0;
  EXPECT_EQ(error_code([&] { decode_matrix(zero_dim); }), Errc::invalid_header);

  auto bad_version = good;
  bad_version[4] = 2;
  EXPECT_EQ(error_code([&] { decode_matrix(bad_version); }), Errc::invalid_header);

  auto huge_count = good;
  huge_count[17] = 0x7f;
  EXPECT_EQ(error_code([&] { decode_matrix(huge_count); }), Errc::payload_size);

  auto dup = encode_matrix(EmbeddingMatrix(1, {"a", "b"}, {1, 2}));
  dup[27] = 'a';  // second id "b" -> "a"
  EXPECT_EQ(error_code([&] { decode_matrix(dup); }), Errc::duplicate_id);

  EXPECT_EQ(error_code([] { decode_matrix(std::vector<std::uint8_t>{'D', 'E'}); }), Errc::bad_magic);
}

TEST(MatrixFile, MissingFile) {
  TempDir dir;
  EXPECT_EQ(error_code([&] { read_matrix(dir / "none.demb"); }), Errc::missing_file);
}
