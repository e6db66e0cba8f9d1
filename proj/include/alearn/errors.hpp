#pragma once

#include <stdexcept>
#include <string>

namespace alearn {

/// Base class for all errors raised by the library.
class AlearnError : public std::runtime_error {
public:
    explicit AlearnError(const std::string& what) : std::runtime_error(what) {}
};

/// Input data violates a documented invariant (simplex, label range, ...).
class ValidationError : public AlearnError {
public:
    using AlearnError::AlearnError;
};

/// Tensor/matrix dimensions do not line up.
class ShapeError : public AlearnError {
public:
    using AlearnError::AlearnError;
};

/// A configuration value is out of range or inconsistent.
class ConfigError : public AlearnError {
public:
    using AlearnError::AlearnError;
};

/// Labelling bookkeeping violations: budget overruns, double labelling,
/// out-of-range pool indices.
class PoolError : public AlearnError {
public:
    using AlearnError::AlearnError;
};

/// A file's contents do not match the expected format.
class FormatError : public AlearnError {
public:
    using AlearnError::AlearnError;
};

/// Filesystem failures (open, read, write).
class IoError : public AlearnError {
public:
    using AlearnError::AlearnError;
};

} // namespace alearn
