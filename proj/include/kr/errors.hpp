#pragma once

#include <stdexcept>
#include <string>

namespace kr {

/// Root of every error the toolkit throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operands live on ground sets of different sizes.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// An argument lies outside an operation's domain (k < 1, eps <= 0, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Text that does not parse (rationals, index lists, system files).
class ParseError : public Error {
public:
    using Error::Error;
};

/// A system description that fails the CEPS axioms.
class InvalidSystem : public Error {
public:
    using Error::Error;
};

/// The operation needs a conditionally ergodic system.
class NotErgodic : public Error {
public:
    using Error::Error;
};

/// Some cycle is too short for the requested horizon.
class NotAperiodicAtHorizon : public Error {
public:
    NotAperiodicAtHorizon(const std::string& what, std::size_t cycle_min, std::size_t cycle_length,
                          std::size_t required)
        : Error(what), cycle_min_(cycle_min), cycle_length_(cycle_length), required_(required) {}

    /// Smallest index on the offending cycle.
    std::size_t cycle_min() const { return cycle_min_; }
    std::size_t cycle_length() const { return cycle_length_; }
    /// Minimum cycle length the operation needed.
    std::size_t required_length() const { return required_; }

private:
    std::size_t cycle_min_;
    std::size_t cycle_length_;
    std::size_t required_;
};

/// A construction produced something a theorem forbids. Always a defect.
class InternalConsistencyError : public Error {
public:
    using Error::Error;
};

}  // namespace kr
