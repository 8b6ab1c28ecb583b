#pragma once

#include <stdexcept>
#include <string>

namespace epochgd {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NonPositiveConstant : public Error {
public:
    explicit NonPositiveConstant(const std::string& field_name)
        : Error("constant must be positive: " + field_name), field(field_name) {}
    std::string field;
};

class ZeroDimension : public Error {
public:
    ZeroDimension() : Error("dimension must be >= 1") {}
};

class DimensionMismatch : public Error {
public:
    DimensionMismatch(std::size_t got, std::size_t want)
        : Error("dimension mismatch: got " + std::to_string(got) +
                ", want " + std::to_string(want)) {}
};

class InvalidBox : public Error {
public:
    explicit InvalidBox(std::size_t component)
        : Error("invalid box: lo > hi at component " + std::to_string(component)) {}
};

class NoConvergence : public Error {
public:
    explicit NoConvergence(long long iterations)
        : Error("projection did not converge after " + std::to_string(iterations) +
                " iterations"),
          iterations(iterations) {}
    long long iterations;
};

class MissingDelta : public Error {
public:
    MissingDelta() : Error("high-probability variant requires delta") {}
};

class InvalidDelta : public Error {
public:
    explicit InvalidDelta(const std::string& why = "delta must lie in (0,1)")
        : Error(why) {}
};

class InfeasibleStart : public Error {
public:
    InfeasibleStart() : Error("start point is not feasible in the domain") {}
};

class MissingOptimum : public Error {
public:
    MissingOptimum() : Error("problem has no recorded optimum") {}
};

class OptimumOutsideDomain : public Error {
public:
    OptimumOutsideDomain() : Error("planted optimum lies outside the domain") {}
};

class EmptyDataset : public Error {
public:
    EmptyDataset() : Error("dataset has no examples") {}
};

class ParseError : public Error {
public:
    ParseError(long long line_no, const std::string& reason)
        : Error("parse error at line " + std::to_string(line_no) + ": " + reason),
          line(line_no) {}
    long long line;
};

class NonBinaryLabel : public Error {
public:
    NonBinaryLabel(long long line_no, const std::string& label)
        : Error("non-binary label '" + label + "' at line " + std::to_string(line_no)),
          line(line_no) {}
    long long line;
};

class ToleranceNotCertified : public Error {
public:
    ToleranceNotCertified(double requested, double certified)
        : Error("requested tolerance " + std::to_string(requested) +
                " not certified within budget (best " + std::to_string(certified) + ")"),
          requested(requested), certified(certified) {}
    double requested;
    double certified;
};

class EmptyInput : public Error {
public:
    EmptyInput() : Error("empty input") {}
};

class InsufficientPoints : public Error {
public:
    explicit InsufficientPoints(const std::string& why = "not enough points")
        : Error(why) {}
};

class NonPositiveValue : public Error {
public:
    explicit NonPositiveValue(const std::string& why = "values must be positive")
        : Error(why) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& why) : Error("config error: " + why) {}
};

}  // namespace epochgd
