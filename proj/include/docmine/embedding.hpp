#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace docmine {

/// Dense row-major float32 matrix with one identifier per row.
///
/// Rows are addressed either by position or by id. The id lookup table is
/// built once at construction, which is also where the shape and uniqueness
/// invariants are enforced.
class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;
  EmbeddingMatrix(std::size_t dim, std::vector<std::string> ids, std::vector<float> data);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t rows() const noexcept { return ids_.size(); }
  bool empty() const noexcept { return ids_.empty(); }

  const std::vector<std::string>& ids() const noexcept { return ids_; }
  const std::string& id(std::size_t row) const { return ids_[row]; }
  std::span<const float> data() const noexcept { return data_; }
  std::span<const float> row(std::size_t r) const {
    return std::span<const float>(data_).subspan(r * dim_, dim_);
  }

  std::optional<std::size_t> find(std::string_view id) const;

  /// Rows for `ids`, in that order. Throws Error(unknown_id) naming the
  /// first id with no row.
  EmbeddingMatrix select(std::span<const std::string> ids) const;

  bool operator==(const EmbeddingMatrix& other) const {
    return dim_ == other.dim_ && ids_ == other.ids_ && data_ == other.data_;
  }

 private:
  std::size_t dim_ = 0;
  std::vector<std::string> ids_;
  std::vector<float> data_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Divides every row by its L2 norm. Zero rows throw Error(zero_norm).
EmbeddingMatrix normalize(const EmbeddingMatrix& m);

/// True when every row norm lies within `tolerance` of 1.
bool is_normalized(const EmbeddingMatrix& m, double tolerance);

/// Throws Error(non_finite) naming the first row holding NaN or Inf.
void check_finite(const EmbeddingMatrix& m);

// Binary layout, all little-endian:
//   "DEMB" | u16 version (=1) | u32 dim | u64 rows
//   rows x (u32 byte length, UTF-8 id)
//   rows x dim f32
inline constexpr std::uint16_t kMatrixFormatVersion = 1;

void write_matrix(const EmbeddingMatrix& m, const std::filesystem::path& path);
EmbeddingMatrix read_matrix(const std::filesystem::path& path);

std::vector<std::uint8_t> encode_matrix(const EmbeddingMatrix& m);
EmbeddingMatrix decode_matrix(std::span<const std::uint8_t> bytes);

}  // namespace docmine
