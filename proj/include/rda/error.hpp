#pragma once

#include <stdexcept>
#include <string>

namespace rda {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Non-conforming or malformed triangulation.
class TopologyError : public Error {
public:
    using Error::Error;
};

/// Requested quadrature order or table entry is outside what is implemented.
class UnsupportedError : public Error {
public:
    using Error::Error;
};

/// Patch recursion ran out of neighbours before reaching the target size.
class PatchGrowthError : public Error {
public:
    using Error::Error;
};

/// Collocation points of a patch do not determine a unique polynomial.
class UnisolvenceError : public Error {
public:
    UnisolvenceError(int element, const std::string& what)
        : Error(what), element_(element) {}
    int element() const noexcept { return element_; }

private:
    int element_;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

/// Non-finite values or a matrix that is singular to working precision.
class NumericalError : public Error {
public:
    using Error::Error;
};

} // namespace rda
