#pragma once

#include <stdexcept>
#include <string>

namespace polewarp {

// Base class for everything this library throws on purpose.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad or inconsistent user configuration (CLI exit code 2).
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

// Numerical failure inside a pipeline stage (CLI exit code 3).
class NumericalError : public Error {
public:
    NumericalError(const std::string& stage, const std::string& msg)
        : Error(stage + ": " + msg), stage_(stage) {}
    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

class SingularMatrixError : public NumericalError {
public:
    explicit SingularMatrixError(const std::string& msg)
        : NumericalError("linear-solve", msg) {}
};

class ConvergenceError : public NumericalError {
public:
    ConvergenceError(const std::string& stage, const std::string& msg)
        : NumericalError(stage, msg) {}
};

// Initial state coincides with the target equilibrium; the indicator
// recurrence is meaningless there (the case is trivially stable).
class DegenerateStateError : public NumericalError {
public:
    explicit DegenerateStateError(const std::string& msg)
        : NumericalError("indicator", msg) {}
};

}  // namespace polewarp
