#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace halfflow {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid parameters: unsupported dimension, non power-of-two N, unknown key.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Argument outside the mathematical domain of an operation (t < 0, r too large).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Fields or meshes that do not fit together.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// Non-finite samples or otherwise unusable input data.
class DataError : public Error {
public:
    using Error::Error;
};

/// Query that does not match the discrete object (time not on mesh, no pairs).
class InterfaceError : public Error {
public:
    using Error::Error;
};

class NonconvergenceError : public Error {
public:
    NonconvergenceError(const std::string& what, std::vector<double> history)
        : Error(what), history_(std::move(history)) {}

    const std::vector<double>& history() const noexcept { return history_; }

private:
    std::vector<double> history_;
};

}  // namespace halfflow
