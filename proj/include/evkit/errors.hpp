#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace evkit {

/// Base class for all toolkit errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A parameter or range precondition was violated.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Dimensions or structure of inputs do not line up (mask vs grid,
/// pred vs gt shapes, face index out of range, ...).
class ShapeError : public Error {
public:
    using Error::Error;
};

/// Data invariant violated (unsorted stream, non-orthonormal rotation,
/// duplicate manifest id, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Filesystem failure (missing path, unreadable file, failed rename).
class IoError : public Error {
public:
    using Error::Error;
};

/// Malformed file content. Carries the byte offset of the defect.
class FormatError : public Error {
public:
    FormatError(const std::string& message, std::uint64_t byte_offset)
        : Error(message + " (byte offset " + std::to_string(byte_offset) + ")"),
          offset_(byte_offset) {}

    std::uint64_t offset() const noexcept { return offset_; }

private:
    std::uint64_t offset_ = 0;
};

} // namespace evkit
