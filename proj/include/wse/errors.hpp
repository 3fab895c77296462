#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace wse {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent configuration document.
class ConfigError : public Error {
public:
    ConfigError(std::string field, std::string message, int line = 0)
        : Error(format_what(field, message, line)), field_(std::move(field)), line_(line) {}

    const std::string& field() const noexcept { return field_; }
    int line() const noexcept { return line_; }

private:
    static std::string format_what(const std::string& field, const std::string& message, int line) {
        std::string out;
        if (line > 0) out += "line " + std::to_string(line) + ": ";
        if (!field.empty()) out += "field '" + field + "': ";
        return out + message;
    }

    std::string field_;
    int line_ = 0;
};

/// Evaluation requested on the zero set of g_ss.
class SingularPointError : public Error {
public:
    SingularPointError(double tau, double sigma, double g)
        : Error("singular point: g_ss(" + std::to_string(tau) + ", " + std::to_string(sigma) +
                ") = " + std::to_string(g) + " is below the singular tolerance"),
          tau_(tau), sigma_(sigma) {}

    double tau() const noexcept { return tau_; }
    double sigma() const noexcept { return sigma_; }

private:
    double tau_;
    double sigma_;
};

/// Closed-form spectrum evaluated where its logarithm diverges or is undefined.
class DegenerateSpectrumError : public Error {
public:
    using Error::Error;
};

/// Extrapolation or iterative refinement failed to settle.
class NonConvergenceError : public Error {
public:
    using Error::Error;
};

/// Configuration shape not handled by the requested method.
class UnsupportedShapeError : public Error {
public:
    using Error::Error;
};

/// Integral value too far from any integer.
class NotNearIntegralError : public Error {
public:
    NotNearIntegralError(double value, long nearest, double deviation, double tolerance,
                         std::vector<std::pair<double, double>> trace)
        : Error("value " + std::to_string(value) + " is not near-integral (nearest " +
                std::to_string(nearest) + ", deviation " + std::to_string(deviation) +
                " > tolerance " + std::to_string(tolerance) + ")"),
          value_(value), nearest_(nearest), deviation_(deviation), trace_(std::move(trace)) {}

    double value() const noexcept { return value_; }
    long nearest() const noexcept { return nearest_; }
    double deviation() const noexcept { return deviation_; }
    const std::vector<std::pair<double, double>>& trace() const noexcept { return trace_; }

private:
    double value_;
    long nearest_;
    double deviation_;
    std::vector<std::pair<double, double>> trace_;
};

} // namespace wse
