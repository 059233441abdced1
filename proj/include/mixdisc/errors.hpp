#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace mixdisc {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Iterative kernel failed to reach its tolerance within the iteration cap.
class NumericalFailure : public Error {
public:
    NumericalFailure(const std::string& what, double residual)
        : Error(what), residual(residual) {}
    double residual;
};

class NotPositiveDefinite : public Error {
public:
    NotPositiveDefinite(std::size_t pivot_index, double pivot)
        : Error("matrix is not positive definite: pivot " + std::to_string(pivot) +
                " at index " + std::to_string(pivot_index)),
          pivot_index(pivot_index), pivot(pivot) {}
    explicit NotPositiveDefinite(const std::string& what)
        : Error(what), pivot_index(0), pivot(0.0) {}
    std::size_t pivot_index;
    double pivot;
};

class DimensionTooLarge : public Error {
public:
    DimensionTooLarge(std::size_t n, std::size_t cap)
        : Error("dimension " + std::to_string(n) + " exceeds cap " + std::to_string(cap)) {}
};

class BasisNotOrthonormal : public Error {
public:
    explicit BasisNotOrthonormal(double deviation)
        : Error("basis columns are not orthonormal (deviation " +
                std::to_string(deviation) + ")") {}
};

class NotUnitVector : public Error {
public:
    explicit NotUnitVector(double norm)
        : Error("vector is not unit length (norm " + std::to_string(norm) + ")") {}
};

/// An input fails the hypothesis of the bound it was passed to; `row` names
/// the offending matrix row.
class HypothesisViolated : public Error {
public:
    HypothesisViolated(const std::string& what, std::size_t row)
        : Error(what + " (row " + std::to_string(row) + ")"), row(row) {}
    std::size_t row;
};

/// A verified inequality came out false on concrete data.
class PropertyViolation : public Error {
public:
    using Error::Error;
};

class NoConvergence : public Error {
public:
    NoConvergence(std::vector<double> best_xi, double residual, int iterations)
        : Error("solver failed to converge: residual " + std::to_string(residual) +
                " after " + std::to_string(iterations) + " iterations"),
          best_xi(std::move(best_xi)), residual(residual), iterations(iterations) {}
    std::vector<double> best_xi;
    double residual;
    int iterations;
};

class ParseError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class UnknownSuite : public Error {
public:
    explicit UnknownSuite(const std::string& name)
        : Error("unknown experiment suite: " + name) {}
};

} // namespace mixdisc
