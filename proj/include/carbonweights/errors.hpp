#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace cw {

// Base for every error raised by the library. Callers that only care about
// "the solve failed" catch this; the CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid parameters (negative populations, non-convex damages, bad weights).
class DomainError : public Error {
public:
    using Error::Error;
};

// An allocation leaves a region with nonpositive consumption.
class InfeasibleAllocation : public Error {
public:
    InfeasibleAllocation(std::string region, double consumption)
        : Error("infeasible allocation: consumption of region '" + region +
                "' is " + std::to_string(consumption)),
          region_(std::move(region)), consumption_(consumption) {}

    const std::string& region() const noexcept { return region_; }
    double consumption() const noexcept { return consumption_; }

private:
    std::string region_;
    double consumption_;
};

// The defining equation has no sign change on the admissible price bracket.
class NoInteriorOptimum : public Error {
public:
    using Error::Error;
};

// Iterative scheme exhausted its budget. Carries the residual history.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, std::vector<double> trace)
        : Error(what), trace_(std::move(trace)) {}

    const std::vector<double>& trace() const noexcept { return trace_; }

private:
    std::vector<double> trace_;
};

// Scenario / configuration text could not be parsed or validated.
class ParseError : public Error {
public:
    using Error::Error;
};

}  // namespace cw
