#include "sq/error.hpp"

#include <fmt/format.h>

namespace sq {

DimensionMismatch::DimensionMismatch(std::string_view what, std::size_t expected,
                                     std::size_t actual)
    : Error(fmt::format("{}: expected {}, got {}", what, expected, actual)),
      expected_(expected),
      actual_(actual) {}

FormatError::FormatError(Kind kind, std::string_view source, std::uint64_t location,
                         bool location_is_row, std::string_view detail)
    : Error(fmt::format("{}: {} at {} {}: {}", source, to_string(kind),
                        location_is_row ? "row" : "byte offset", location, detail)),
      kind_(kind),
      location_(location),
      location_is_row_(location_is_row) {}

std::string_view to_string(FormatError::Kind kind) noexcept {
  switch (kind) {
    case FormatError::Kind::bad_magic: return "bad magic";
    case FormatError::Kind::unsupported_version: return "unsupported version";
    case FormatError::Kind::malformed_header: return "malformed header";
    case FormatError::Kind::truncated_payload: return "truncated payload";
    case FormatError::Kind::trailing_bytes: return "trailing bytes";
    case FormatError::Kind::dimension_mismatch: return "dimension mismatch";
    case FormatError::Kind::non_finite_value: return "non-finite value";
    case FormatError::Kind::bad_label: return "bad label";
    case FormatError::Kind::parse_error: return "parse error";
  }
  return "format error";
}

}  // namespace sq
