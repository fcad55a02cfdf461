#pragma once

#include <stdexcept>
#include <string>

namespace volvar {

/// Base for every error raised by the engine. `kind()` is a short stable tag
/// used in machine-readable CLI error lines.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& message)
        : std::runtime_error(message), kind_(std::move(kind)) {}

    [[nodiscard]] const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

/// Malformed input text (CSV rows, config files).
class ParseError : public Error {
public:
    explicit ParseError(const std::string& message) : Error("parse", message) {}
};

/// Well-formed input that violates a data invariant.
class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& message) : Error("validation", message) {}
};

/// Model or simulation parameters outside their admissible region.
class ParameterError : public Error {
public:
    explicit ParameterError(const std::string& message) : Error("parameter", message) {}
};

/// Likelihood evaluated at a point where the variance path is not strictly positive.
class EvaluationError : public Error {
public:
    explicit EvaluationError(const std::string& message) : Error("evaluation", message) {}
};

/// Cholesky factorization failure.
class DecompositionError : public Error {
public:
    DecompositionError(const std::string& message, std::size_t failing_minor)
        : Error("decomposition", message), failing_minor_(failing_minor) {}

    /// 1-based order of the leading principal minor that is not positive.
    [[nodiscard]] std::size_t failing_minor() const noexcept { return failing_minor_; }

private:
    std::size_t failing_minor_;
};

/// Operations that are declared but have no backing implementation (remote data sources).
class UnavailableError : public Error {
public:
    explicit UnavailableError(const std::string& message) : Error("unavailable", message) {}
};

} // namespace volvar
