#include "docmine/embedding.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "docmine/error.hpp"
#include "docmine/kernels.hpp"

namespace docmine {
namespace {

constexpr const char* kModule = "embed_store";
constexpr std::uint8_t kMagic[4] = {'D', 'E', 'M', 'B'};

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T value) {
  using U = std::make_unsigned_t<T>;
  auto bits = static_cast<U>(value);
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
  }
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::size_t remaining() const noexcept { return bytes_.size() - pos_; }

  template <typename T>
  T get_le() {
    need(sizeof(T));
    std::make_unsigned_t<T> bits = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      bits |= static_cast<std::make_unsigned_t<T>>(bytes_[pos_ + i]) << (8 * i);
    }
    pos_ += sizeof(T);
    return static_cast<T>(bits);
  }

  std::span<const std::uint8_t> take(std::size_t n) {
    need(n);
    auto out = bytes_.subspan(pos_, n);
    pos_ += n;
    return out;
  }

 private:
  void need(std::size_t n) const {
    if (remaining() < n) {
      throw Error(Errc::payload_size, kModule, "file truncated before end of declared content");
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

EmbeddingMatrix::EmbeddingMatrix(std::size_t dim, std::vector<std::string> ids,
                                 std::vector<float> data)
    : dim_(dim), ids_(std::move(ids)), data_(std::move(data)) {
  if (dim_ == 0) throw Error(Errc::invalid_argument, kModule, "dim must be >= 1");
  if (data_.size() != ids_.size() * dim_) {
    throw Error(Errc::dimension_mismatch, kModule,
                "payload holds " + std::to_string(data_.size()) + " floats, expected " +
                    std::to_string(ids_.size()) + " x " + std::to_string(dim_));
  }
  index_.reserve(ids_.size());
  for (std::size_t r = 0; r < ids_.size(); ++r) {
    if (!index_.emplace(ids_[r], r).second) {
      throw Error(Errc::duplicate_id, kModule, "duplicate id '" + ids_[r] + "'");
    }
  }
}

std::optional<std::size_t> EmbeddingMatrix::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

EmbeddingMatrix EmbeddingMatrix::select(std::span<const std::string> ids) const {
  std::vector<float> out;
  out.reserve(ids.size() * dim_);
  for (const auto& id : ids) {
    auto r = find(id);
    if (!r) throw Error(Errc::unknown_id, kModule, "no embedding for id '" + id + "'");
    auto src = row(*r);
    out.insert(out.end(), src.begin(), src.end());
  }
  return EmbeddingMatrix(dim_, std::vector<std::string>(ids.begin(), ids.end()),
                         std::move(out));
}

EmbeddingMatrix normalize(const EmbeddingMatrix& m) {
  const auto& k = kernels();
  std::vector<float> out(m.data().begin(), m.data().end());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const double norm = std::sqrt(k.squared_norm(m.row(r).data(), m.dim()));
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      throw Error(Errc::zero_norm, kModule, "row '" + m.id(r) + "' has zero or non-finite norm");
    }
    float* dst = out.data() + r * m.dim();
    for (std::size_t c = 0; c < m.dim(); ++c) {
      dst[c] = static_cast<float>(static_cast<double>(dst[c]) / norm);
    }
  }
  return EmbeddingMatrix(m.dim(), m.ids(), std::move(out));
}

bool is_normalized(const EmbeddingMatrix& m, double tolerance) {
  const auto& k = kernels();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const double norm = std::sqrt(k.squared_norm(m.row(r).data(), m.dim()));
    if (!(std::abs(norm - 1.0) <= tolerance)) return false;
  }
  return true;
}

void check_finite(const EmbeddingMatrix& m) {
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (float v : m.row(r)) {
      if (!std::isfinite(v)) {
        throw Error(Errc::non_finite, kModule, "row '" + m.id(r) + "' contains NaN or Inf");
      }
    }
  }
}

std::vector<std::uint8_t> encode_matrix(const EmbeddingMatrix& m) {
  std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
  out.reserve(18 + m.rows() * 16 + m.data().size() * 4);
  put_le<std::uint16_t>(out, kMatrixFormatVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(m.dim()));
  put_le<std::uint64_t>(out, static_cast<std::uint64_t>(m.rows()));
  for (const auto& id : m.ids()) {
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(id.size()));
    out.insert(out.end(), id.begin(), id.end());
  }
  for (float v : m.data()) put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(v));
  return out;
}

EmbeddingMatrix decode_matrix(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw Error(Errc::bad_magic, kModule, "not an embedding matrix (bad magic)");
  }
  Reader in(bytes.subspan(4));
  const auto version = in.get_le<std::uint16_t>();
  const auto dim = in.get_le<std::uint32_t>();
  const auto count = in.get_le<std::uint64_t>();
  if (version != kMatrixFormatVersion) {
    throw Error(Errc::invalid_header, kModule,
                "unsupported format version " + std::to_string(version));
  }
  if (dim == 0) throw Error(Errc::invalid_header, kModule, "header declares dim 0");
  // Every row needs at least a 4-byte id prefix plus its payload.
  if (count > in.remaining() / (4 + 4ull * dim)) {
    throw Error(Errc::payload_size, kModule,
                "declared row count " + std::to_string(count) + " exceeds file size");
  }

  std::vector<std::string> ids;
  ids.reserve(count);
  for (std::uint64_t r = 0; r < count; ++r) {
    const auto len = in.get_le<std::uint32_t>();
    auto raw = in.take(len);
    ids.emplace_back(reinterpret_cast<const char*>(raw.data()), raw.size());
  }
  const std::uint64_t expected = count * dim * 4ull;
  if (in.remaining() != expected) {
    throw Error(Errc::payload_size, kModule,
                "payload holds " + std::to_string(in.remaining()) + " bytes, header implies " +
                    std::to_string(expected));
  }
  std::vector<float> data(count * dim);
  for (auto& v : data) v = std::bit_cast<float>(in.get_le<std::uint32_t>());
  return EmbeddingMatrix(dim, std::move(ids), std::move(data));
}

void write_matrix(const EmbeddingMatrix& m, const std::filesystem::path& path) {
  const auto bytes = encode_matrix(m);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io_failure, kModule, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(Errc::io_failure, kModule, "write failed for " + path.string());
}

EmbeddingMatrix read_matrix(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(Errc::missing_file, kModule, "cannot open " + path.string(),
                ErrorKind::validation);
  }
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return decode_matrix(bytes);
}

}  // namespace docmine
