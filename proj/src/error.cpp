#include "docmine/error.hpp"

namespace docmine {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::missing_file: return "missing_file";
    case Errc::malformed_input: return "malformed_input";
    case Errc::duplicate_id: return "duplicate_id";
    case Errc::empty_document: return "empty_document";
    case Errc::zero_norm: return "zero_norm";
    case Errc::non_finite: return "non_finite";
    case Errc::bad_magic: return "bad_magic";
    case Errc::invalid_header: return "invalid_header";
    case Errc::payload_size: return "payload_size";
    case Errc::dimension_mismatch: return "dimension_mismatch";
    case Errc::empty_input: return "empty_input";
    case Errc::not_normalized: return "not_normalized";
    case Errc::zero_weights: return "zero_weights";
    case Errc::missing_idf: return "missing_idf";
    case Errc::unknown_id: return "unknown_id";
    case Errc::malformed_unit_id: return "malformed_unit_id";
    case Errc::http_failure: return "http_failure";
    case Errc::count_mismatch: return "count_mismatch";
    case Errc::insufficient_noise: return "insufficient_noise";
    case Errc::id_collision: return "id_collision";
    case Errc::duplicate_pair: return "duplicate_pair";
    case Errc::invalid_argument: return "invalid_argument";
    case Errc::io_failure: return "io_failure";
  }
  return "unknown";
}

}  // namespace docmine
