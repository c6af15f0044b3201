#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace costdd {

/// Caller violated a documented precondition.
class ContractError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Checked cost arithmetic left the signed 64-bit range.
class OverflowError : public std::overflow_error {
public:
    using std::overflow_error::overflow_error;
};

/// The node table reached its configured ceiling.
class CapacityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An algorithmic invariant did not hold. Always a bug.
class InternalError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Malformed text input. Carries the 1-based line number (0 when the
/// problem is not tied to a single line, e.g. a missing section).
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

} // namespace costdd
