// errors.hpp — exception types shared across the library

#pragma once

#include <stdexcept>
#include <string>

namespace polarfit {

// Base class for everything this library throws on purpose.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Invalid physical parameters (negative energies, empty grids, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

// A squared eigenfrequency went negative: the chosen parameters make a
// polariton mode soften. The message names the offending branch.
class InstabilityError : public Error {
public:
    using Error::Error;
};

// Bracketed solver could not find a sign change.
class BracketError : public Error {
public:
    using Error::Error;
};

// Iteration limit reached without meeting the requested tolerance.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

// Request outside a tabulated model's range (no silent extrapolation).
class RangeError : public Error {
public:
    using Error::Error;
};

// Cavity dispersion never crosses the transition energy.
class ResonanceNotFoundError : public Error {
public:
    using Error::Error;
};

// Malformed config or data file; message carries line/key context.
class ParseError : public Error {
public:
    using Error::Error;
};

} // namespace polarfit
