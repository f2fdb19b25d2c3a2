#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace pvc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed map expression. `offset` is the byte offset of the offending token.
class ParseError : public Error {
public:
    ParseError(std::size_t offset, std::string expected, const std::string& message)
        : Error(message + " at byte " + std::to_string(offset) + " (expected " + expected + ")"),
          offset_(offset), expected_(std::move(expected)) {}
    std::size_t offset() const noexcept { return offset_; }
    const std::string& expected() const noexcept { return expected_; }

private:
    std::size_t offset_;
    std::string expected_;
};

class UnboundParameterError : public Error {
public:
    explicit UnboundParameterError(std::vector<std::string> names)
        : Error(make_message(names)), names_(std::move(names)) {}
    const std::vector<std::string>& names() const noexcept { return names_; }

private:
    static std::string make_message(const std::vector<std::string>& names) {
        std::string msg = "unbound parameter(s):";
        for (const auto& n : names) msg += " " + n;
        return msg;
    }
    std::vector<std::string> names_;
};

/// An elementary function was evaluated at a pole or branch point.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A point is closer to the boundary than the domain's margin allows.
class BoundaryError : public Error {
public:
    using Error::Error;
};

/// Two vortex positions coincide (or are closer than the collision floor).
class CoincidenceError : public Error {
public:
    using Error::Error;
};

class NotStationaryError : public Error {
public:
    using Error::Error;
};

/// A documented precondition of an operation does not hold.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// Integration or iteration failure (step underflow, no convergence, ...).
class NumericalError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace pvc
