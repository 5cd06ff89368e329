#pragma once

#include <stdexcept>
#include <string>

namespace vascnet {

/// Base for errors caused by bad inputs or infeasible data. CLI maps these
/// to exit code 1.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Base for runtime numerical failures (vacuum, solver breakdown). CLI maps
/// these to exit code 2.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidInput : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class DomainError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// Boundary data for which no density intercept exists (the feasibility
/// condition on phi_minus - phi_plus fails).
class InfeasibleBoundaryData : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class PerturbationTooLarge : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class ParseError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// Raised when a decay/fit window has too few usable points.
class WindowTooShort : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class LawEvaluationError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class HyperbolicityLoss : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class NumericalFailure : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Non-positive density detected during time stepping. Carries the first
/// offending cell and the simulation time.
class VacuumError : public NumericalError {
public:
    VacuumError(std::size_t cell, double time, const std::string& what)
        : NumericalError(what), cell_(cell), time_(time) {}

    std::size_t cell() const noexcept { return cell_; }
    double time() const noexcept { return time_; }

private:
    std::size_t cell_;
    double time_;
};

} // namespace vascnet
