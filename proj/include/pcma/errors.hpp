#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace pcma {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DegenerateCovariance : public Error {
public:
    using Error::Error;
};

class NotPositiveDefinite : public Error {
public:
    using Error::Error;
};

class InsufficientPoints : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class NonPositiveStepSize : public Error {
public:
    using Error::Error;
};

class UnknownBenchmark : public Error {
public:
    using Error::Error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// An objective threw while evaluating one candidate of a batch.
/// `index` is the lowest failing candidate; `fvals` holds every result that
/// did complete (NaN at failed slots).
class WorkerFailure : public Error {
public:
    WorkerFailure(std::size_t index, const std::string& what, std::vector<double> fvals)
        : Error("evaluation of candidate " + std::to_string(index) + " failed: " + what),
          index_(index), fvals_(std::move(fvals)) {}

    std::size_t index() const noexcept { return index_; }
    const std::vector<double>& partial_fvals() const noexcept { return fvals_; }

private:
    std::size_t index_;
    std::vector<double> fvals_;
};

/// Raised by the optimizer when the batch evaluator reports a failure.
class ObjectiveFailure : public Error {
public:
    ObjectiveFailure(std::size_t index, const std::string& what)
        : Error(what), index_(index) {}

    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

}  // namespace pcma
