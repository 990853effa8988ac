#pragma once

#include <stdexcept>
#include <string>

namespace rsip {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (bad shape, out-of-range id, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A numerical procedure failed: non-convergence, non-finite values, divergence.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// File format errors raised by the readers in io.hpp.
class IoError : public Error {
public:
    enum class Kind { open_failed, bad_magic, truncated, count_mismatch };

    IoError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}

    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

}  // namespace rsip
