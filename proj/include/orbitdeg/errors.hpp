#pragma once

#include <stdexcept>
#include <string>

namespace orbitdeg {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input (config files, shapes, preconditions).
class InputError : public Error {
public:
    using Error::Error;
};

/// A numerical or exact computation could not be completed.
class ComputationError : public Error {
public:
    using Error::Error;
};

class EigenSolverError : public ComputationError {
public:
    EigenSolverError(const std::string& what, std::string matrix)
        : ComputationError(what + ": " + matrix), matrix_(std::move(matrix)) {}
    const std::string& matrix() const noexcept { return matrix_; }

private:
    std::string matrix_;
};

/// A map was evaluated at a point where all image coordinates vanish.
class IndeterminacyError : public ComputationError {
public:
    IndeterminacyError(const std::string& what, std::string point)
        : ComputationError(what + " at " + point), point_(std::move(point)) {}
    const std::string& point() const noexcept { return point_; }

private:
    std::string point_;
};

/// A coordinate grew past the configured decimal-digit cap.
class DigitCapExceeded : public ComputationError {
public:
    using ComputationError::ComputationError;
};

} // namespace orbitdeg
