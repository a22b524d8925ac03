#pragma once

#include <stdexcept>
#include <string>

namespace hir {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid parameters or configuration (bad family parameters, depth out of range, ...).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Unreadable, malformed or mis-sized input files.
class IoError : public Error {
public:
    using Error::Error;
};

/// A checked equivariance/invariance bound did not hold.
class InvariantViolation : public Error {
public:
    InvariantViolation(std::string invariant, const std::string& what)
        : Error(what), invariant_(std::move(invariant)) {}

    const std::string& invariant() const noexcept { return invariant_; }

private:
    std::string invariant_;
};

}  // namespace hir
