#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace sq {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller-supplied argument violates an operation's precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Two operands disagree on a dimension (matrix columns, vector length, ...).
class DimensionMismatch : public Error {
 public:
  DimensionMismatch(std::string_view what, std::size_t expected, std::size_t actual);

  std::size_t expected() const noexcept { return expected_; }
  std::size_t actual() const noexcept { return actual_; }

 private:
  std::size_t expected_;
  std::size_t actual_;
};

/// The file system refused a read or write.
class IoError : public Error {
 public:
  using Error::Error;
};

/// A file's content does not match its declared format.
///
/// `location()` is a byte offset for binary formats and a 0-based row (or
/// line) for text formats and per-row checks; `location_is_row()` tells which.
class FormatError : public Error {
 public:
  enum class Kind {
    bad_magic,
    unsupported_version,
    malformed_header,
    truncated_payload,
    trailing_bytes,
    dimension_mismatch,
    non_finite_value,
    bad_label,
    parse_error,
  };

  FormatError(Kind kind, std::string_view source, std::uint64_t location, bool location_is_row,
              std::string_view detail);

  Kind kind() const noexcept { return kind_; }
  std::uint64_t location() const noexcept { return location_; }
  bool location_is_row() const noexcept { return location_is_row_; }

 private:
  Kind kind_;
  std::uint64_t location_;
  bool location_is_row_;
};

std::string_view to_string(FormatError::Kind kind) noexcept;

}  // namespace sq
