#ifndef QDA_ERRORS_HPP
#define QDA_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace qda {

/// Base class for runtime numerical failures (as opposed to invalid
/// configuration, which throws std::invalid_argument / std::domain_error).
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// Integration horizon grew past its cap without meeting the tail criterion,
/// or the step controller could not make progress.
class ConvergenceError : public NumericalError {
public:
    explicit ConvergenceError(const std::string& what) : NumericalError(what) {}
};

/// Adaptive quadrature failed to reach the requested tolerance.
class QuadratureError : public NumericalError {
public:
    explicit QuadratureError(const std::string& what) : NumericalError(what) {}
};

/// A physical invariant was violated beyond floating-point slack
/// (single-excitation bound, probability range).
class InvariantViolation : public NumericalError {
public:
    explicit InvariantViolation(const std::string& what) : NumericalError(what) {}
};

} // namespace qda

#endif
