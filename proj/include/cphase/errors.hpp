#pragma once

#include <stdexcept>
#include <string>

namespace cphase {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid ensemble dimensions or configuration.
class ConstructionError : public Error {
public:
    using Error::Error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

/// Tail-energy estimation had no usable rows in any repetition.
class EstimationError : public Error {
public:
    using Error::Error;
};

/// Measurements are not consistent with the scheme that supposedly produced them.
class InconsistencyError : public Error {
public:
    using Error::Error;
};

/// A phase cannot be determined from the given magnitudes.
class UnderdeterminedError : public Error {
public:
    using Error::Error;
};

class NumericalError : public Error {
public:
    using Error::Error;
};

class FormatError : public Error {
public:
    using Error::Error;
};

} // namespace cphase
