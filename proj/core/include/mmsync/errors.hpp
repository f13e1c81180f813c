#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mmsync {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class InvalidParams : public Error {
public:
    using Error::Error;
};

class CholeskyFailure : public Error {
public:
    using Error::Error;
};

class DegenerateSpectrum : public Error {
public:
    using Error::Error;
};

class ZeroTruth : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

/// The Fisher information is singular. `chain()` is the 1-based RF chain
/// whose zero amplitude makes its phase unidentifiable, or 0 when the
/// singularity could not be attributed to a single chain.
class SingularFim : public Error {
public:
    SingularFim(std::size_t chain, const std::string& what)
        : Error(what), chain_(chain) {}

    std::size_t chain() const noexcept { return chain_; }

private:
    std::size_t chain_;
};

/// Malformed CSV input; row and column are 1-based.
class CsvError : public Error {
public:
    CsvError(std::size_t row, std::size_t column, const std::string& what)
        : Error(what), row_(row), column_(column) {}

    std::size_t row() const noexcept { return row_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t row_;
    std::size_t column_;
};

}  // namespace mmsync
