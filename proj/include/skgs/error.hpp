#pragma once

#include <stdexcept>
#include <string>

namespace skgs {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid arguments, inconsistent configuration, operator/scheme mismatch.
class UsageError : public Error {
public:
    using Error::Error;
};

// Singular solves, fixed-point non-convergence, non-finite states.
class NumericalError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace skgs
