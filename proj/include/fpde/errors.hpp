#ifndef FPDE_ERRORS_HPP
#define FPDE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace fpde {

// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Gamma evaluated at 0 or a negative integer.
struct PoleError : Error {
    explicit PoleError(const std::string& msg) : Error(msg) {}
};

// A series summation failed to start converging within the term cap.
struct ConvergenceError : Error {
    explicit ConvergenceError(const std::string& msg) : Error(msg) {}
};

// Quadrature error estimate exceeded the requested tolerance.
struct QuadratureError : Error {
    explicit QuadratureError(const std::string& msg) : Error(msg) {}
};

// Argument outside the validity region of an operation.
struct DomainError : Error {
    explicit DomainError(const std::string& msg) : Error(msg) {}
};

// Caputo derivative applied to a monomial where it is not defined.
struct UndefinedCaputoError : Error {
    explicit UndefinedCaputoError(const std::string& msg) : Error(msg) {}
};

struct VariableMismatchError : Error {
    explicit VariableMismatchError(const std::string& msg) : Error(msg) {}
};

struct DependentBasisError : Error {
    explicit DependentBasisError(const std::string& msg) : Error(msg) {}
};

struct UnspecializedPolyError : Error {
    explicit UnspecializedPolyError(const std::string& msg) : Error(msg) {}
};

struct NotInvariantError : Error {
    explicit NotInvariantError(const std::string& msg) : Error(msg) {}
};

// Series solver would need more lattice exponents than the configured cap.
struct LatticeError : Error {
    explicit LatticeError(const std::string& msg) : Error(msg) {}
};

struct InconsistentSystemError : Error {
    explicit InconsistentSystemError(const std::string& msg) : Error(msg) {}
};

struct NoPowerLawSolutionError : Error {
    explicit NoPowerLawSolutionError(const std::string& msg) : Error(msg) {}
};

struct TruncationStallError : Error {
    explicit TruncationStallError(const std::string& msg) : Error(msg) {}
};

struct StepError : Error {
    explicit StepError(const std::string& msg) : Error(msg) {}
};

struct UnknownExampleError : Error {
    explicit UnknownExampleError(const std::string& msg) : Error(msg) {}
};

struct ParamOutOfRangeError : Error {
    explicit ParamOutOfRangeError(const std::string& msg) : Error(msg) {}
};

} // namespace fpde

#endif
