#pragma once

#include <stdexcept>
#include <string>

namespace mismatchlab {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
public:
    using Error::Error;
};

class QuadratureNonconvergence : public Error {
public:
    using Error::Error;
};

/// A finite-difference stencil touched a region other than the one it is centred in.
class BoundaryProximity : public Error {
public:
    using Error::Error;
};

class NoRoot : public Error {
public:
    using Error::Error;
};

class OutOfRange : public Error {
public:
    using Error::Error;
};

class LogDomainError : public Error {
public:
    using Error::Error;
};

class EigensolverFailure : public Error {
public:
    using Error::Error;
};

class DegenerateInput : public Error {
public:
    using Error::Error;
};

class NonConvergence : public Error {
public:
    using Error::Error;
};

class DimensionTooLarge : public Error {
public:
    using Error::Error;
};

class FormatError : public Error {
public:
    using Error::Error;
};

// Throws InvalidParameter with `what` when `ok` is false.
void require(bool ok, const std::string& what);

}  // namespace mismatchlab
