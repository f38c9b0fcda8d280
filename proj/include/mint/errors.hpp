#pragma once

#include <stdexcept>
#include <string>

namespace mint {

/// Base class for every error thrown by this library.
class Error : public std::runtime_error {
  public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Mismatched operator or vector dimensions.
class DimensionError : public Error {
  public:
    using Error::Error;
};

/// Input violates a mathematical precondition (non-PSD element, invalid
/// state, malformed parameters, ...).
class DomainError : public Error {
  public:
    using Error::Error;
};

/// The zero operator was passed where progress is undefined.
class ZeroOperatorError : public DomainError {
  public:
    using DomainError::DomainError;
};

/// Requested epsilon lies outside the admissible interval.
class EpsilonRangeError : public Error {
  public:
    double lo = 0.0;
    double hi = 0.0;
    EpsilonRangeError(const std::string& what, double lo_, double hi_)
        : Error(what), lo(lo_), hi(hi_) {}
};

/// A coarse-graining partition is not a partition of the outcome set.
class PartitionError : public Error {
  public:
    using Error::Error;
};

/// A state family fails the orthonormality check.
class BasisError : public Error {
  public:
    double worst_overlap = 0.0;
    BasisError(const std::string& what, double overlap)
        : Error(what), worst_overlap(overlap) {}
};

/// Requested interpolation target exceeds the progress of the input.
class TargetUnreachableError : public Error {
  public:
    double target = 0.0;
    double attainable = 0.0;
    TargetUnreachableError(const std::string& what, double target_, double attainable_)
        : Error(what), target(target_), attainable(attainable_) {}
};

/// Root bracketing for the interpolation constant ran out of range.
class BracketError : public Error {
  public:
    using Error::Error;
};

/// An operator expected to be a tensor product is not one.
class NotProductError : public Error {
  public:
    double singular_ratio = 0.0;
    NotProductError(const std::string& what, double ratio)
        : Error(what), singular_ratio(ratio) {}
};

/// A first-stage element could not be factored into local parts.
class FactorizationError : public Error {
  public:
    using Error::Error;
};

/// The first stage disturbs the state family it was meant to preserve.
class DisturbanceError : public Error {
  public:
    using Error::Error;
};

/// A strict-positivity requirement on outcome weights failed.
class ThresholdError : public Error {
  public:
    std::size_t element = 0;
    std::size_t state = 0;
    ThresholdError(const std::string& what, std::size_t element_, std::size_t state_)
        : Error(what), element(element_), state(state_) {}
};

/// Local structure extraction found only trivial factors.
class TrivialExtractionError : public Error {
  public:
    using Error::Error;
};

/// A protocol tree carries no progress in any subtree.
class NoProgressError : public Error {
  public:
    double worst_mu = 0.0;
    NoProgressError(const std::string& what, double worst)
        : Error(what), worst_mu(worst) {}
};

/// Reading or writing a JSON document failed.
class IoError : public Error {
  public:
    using Error::Error;
};

}  // namespace mint
