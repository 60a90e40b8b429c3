#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace minsurf {

// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NonIntegrable : public Error {
public:
    using Error::Error;
};

class InteriorSingularity : public Error {
public:
    using Error::Error;
};

class BranchAmbiguity : public Error {
public:
    using Error::Error;
};

class NonIntegrableVertex : public Error {
public:
    using Error::Error;
};

class DegenerateTarget : public Error {
public:
    using Error::Error;
};

class ParityViolation : public Error {
public:
    using Error::Error;
};

class MismatchedPolygons : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class DivisorMismatch : public Error {
public:
    using Error::Error;
};

class PeriodLeak : public Error {
public:
    PeriodLeak(const std::string& what, double leak) : Error(what), leak_(leak) {}
    double leak() const { return leak_; }

private:
    double leak_;
};

// Raised by iterative solvers and by adaptive quadrature. Solvers attach the
// best iterate they reached and its residual norm.
class NoConvergence : public Error {
public:
    explicit NoConvergence(const std::string& what, std::vector<double> best = {},
                           double residual = -1.0)
        : Error(what), best_(std::move(best)), residual_(residual) {}

    const std::vector<double>& best_iterate() const { return best_; }
    double residual() const { return residual_; }

private:
    std::vector<double> best_;
    double residual_;
};

}  // namespace minsurf
