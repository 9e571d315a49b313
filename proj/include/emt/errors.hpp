#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace emt {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A table or curve was queried outside its defined envelope.
class EnvelopeError : public Error {
public:
    using Error::Error;
};

/// Battery asked to deliver more power than the internal-resistance model allows.
class InfeasiblePowerError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class ShapeError : public Error {
public:
    using Error::Error;
};

/// Judgment matrix violates a positive-reciprocal condition at (row, col), 1-based.
class ValidationError : public Error {
public:
    ValidationError(const std::string& what, std::size_t row, std::size_t col)
        : Error(what + " at (" + std::to_string(row) + ", " + std::to_string(col) + ")"),
          row_(row), col_(col) {}

    std::size_t row() const noexcept { return row_; }
    std::size_t col() const noexcept { return col_; }

private:
    std::size_t row_;
    std::size_t col_;
};

/// Malformed input text. Row and column are 1-based; 0 means "whole file".
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t row, std::size_t col = 0)
        : Error(row == 0 ? what
                         : "row " + std::to_string(row) +
                               (col ? ", column " + std::to_string(col) : std::string{}) + ": " + what),
          row_(row), col_(col) {}

    std::size_t row() const noexcept { return row_; }
    std::size_t col() const noexcept { return col_; }

private:
    std::size_t row_;
    std::size_t col_;
};

class UnsupportedOrderError : public Error {
public:
    using Error::Error;
};

/// Forward pass reached a state with no feasible action.
class RolloutError : public Error {
public:
    RolloutError(std::size_t stage, double soc)
        : Error("no feasible action at stage " + std::to_string(stage) + ", soc " + std::to_string(soc)),
          stage_(stage), soc_(soc) {}

    std::size_t stage() const noexcept { return stage_; }
    double soc() const noexcept { return soc_; }

private:
    std::size_t stage_;
    double soc_;
};

class SizeGuardError : public Error {
public:
    using Error::Error;
};

}  // namespace emt
