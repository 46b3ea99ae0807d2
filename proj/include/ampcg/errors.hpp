#pragma once

#include <stdexcept>
#include <string>

namespace ampcg {

// Every failure raised by the library carries a short machine-readable code
// next to the human message; the CLI prints both on one line.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), m_code(std::move(code)) {}

    const std::string& code() const noexcept { return m_code; }

private:
    std::string m_code;
};

/// Malformed arguments: out-of-range nodes, overlapping query sets, bad ranges.
class InputError : public Error {
public:
    explicit InputError(const std::string& message) : Error("input", message) {}
};

/// A graph violates a structural invariant (self-loop, duplicate edge, semidirected cycle).
class StructureError : public Error {
public:
    explicit StructureError(const std::string& message) : Error("structure", message) {}
};

/// An enumeration would exceed its configured node cap.
class CapacityError : public Error {
public:
    explicit CapacityError(const std::string& message) : Error("capacity", message) {}
};

/// Factorization or inversion failed (matrix not positive definite / singular).
class NumericError : public Error {
public:
    explicit NumericError(const std::string& message) : Error("numeric", message) {}
};

/// Too few samples for the number of regressors.
class RankError : public Error {
public:
    explicit RankError(const std::string& message) : Error("rank", message) {}
};

/// File could not be read, parsed, or written.
class IoError : public Error {
public:
    explicit IoError(const std::string& message) : Error("io", message) {}
};

}  // namespace ampcg
