#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace trigof {

enum class ErrorKind {
    domain,
    quadrature,
    estimation,
    degenerate_sample,
    singularity,
    configuration,
    sampling,
    data,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what);
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error(ErrorKind::domain, what) {}
};

// Carries the last estimate and its error bound.
class QuadratureError : public Error {
public:
    QuadratureError(const std::string& what, double estimate, double bound)
        : Error(ErrorKind::quadrature, what), estimate_(estimate), bound_(bound) {}
    double estimate() const noexcept { return estimate_; }
    double bound() const noexcept { return bound_; }

private:
    double estimate_;
    double bound_;
};

class EstimationError : public Error {
public:
    EstimationError(const std::string& what, double residual)
        : Error(ErrorKind::estimation, what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

class DegenerateSampleError : public Error {
public:
    explicit DegenerateSampleError(const std::string& what)
        : Error(ErrorKind::degenerate_sample, what) {}
};

class SingularityError : public Error {
public:
    SingularityError(const std::string& what, double condition)
        : Error(ErrorKind::singularity, what), condition_(condition) {}
    double condition() const noexcept { return condition_; }

private:
    double condition_;
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(ErrorKind::configuration, what) {}
};

class SamplingError : public Error {
public:
    explicit SamplingError(const std::string& what) : Error(ErrorKind::sampling, what) {}
};

// Input parsing problem; line is 1-based, 0 when not tied to a line.
class DataError : public Error {
public:
    DataError(const std::string& what, std::size_t line = 0)
        : Error(ErrorKind::data, what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace trigof
