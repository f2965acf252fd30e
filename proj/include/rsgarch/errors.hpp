#pragma once

#include <stdexcept>
#include <string>

namespace rsgarch {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or out-of-contract user input (bad CSV, invalid series, bad flags).
class InputError : public Error {
public:
    using Error::Error;
};

/// A covariance matrix that is not positive semidefinite or not finite.
class InvalidCovariance : public Error {
public:
    using Error::Error;
};

/// Numerical breakdown inside a recursion (near-singular covariance, degenerate filter).
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Estimation could not produce a usable result.
class EstimationError : public Error {
public:
    using Error::Error;
};

}  // namespace rsgarch
