#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lionets {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operand shapes do not agree (vector lengths, matrix rows/cols, layer chains).
class DimensionError : public Error {
public:
    using Error::Error;
};

/// A scalar argument lies outside the operation's domain.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Input is structurally valid but numerically degenerate (zero vector, all-zero instance).
class DegenerateInputError : public Error {
public:
    using Error::Error;
};

/// The normal-equation system is singular and no penalty was requested.
class RankDeficiencyError : public Error {
public:
    using Error::Error;
};

/// The model does not have the layer structure an operation needs.
class StructureError : public Error {
public:
    using Error::Error;
};

/// A persisted artifact or a configuration violates its invariants.
class ValidationError : public Error {
public:
    using Error::Error;
};

class TrainingDivergedError : public Error {
public:
    TrainingDivergedError(std::size_t epoch, const std::string& what)
        : Error(what), epoch_(epoch) {}

    std::size_t epoch() const noexcept { return epoch_; }

private:
    std::size_t epoch_;
};

class ParseError : public Error {
public:
    ParseError(std::size_t byte_offset, const std::string& what)
        : Error(what), byte_offset_(byte_offset) {}

    std::size_t byte_offset() const noexcept { return byte_offset_; }

private:
    std::size_t byte_offset_;
};

}  // namespace lionets
