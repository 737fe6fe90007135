#pragma once

#include <stdexcept>
#include <string>

namespace ri {

/// Evaluation left the representable range (overflow of extreme exponents).
class RangeError : public std::runtime_error {
public:
    explicit RangeError(const std::string& what) : std::runtime_error(what) {}
};

/// A tail integral diverges for every t; carries the side and exponent.
class DivergentTail : public std::runtime_error {
public:
    DivergentTail(const std::string& side, double exponent)
        : std::runtime_error("divergent tail integral on " + side +
                             " side, exponent " + std::to_string(exponent)),
          side_(side), exponent_(exponent) {}
    const std::string& side() const { return side_; }
    double exponent() const { return exponent_; }

private:
    std::string side_;
    double exponent_;
};

/// The extended improper integral does not converge.
class NonConvergent : public std::runtime_error {
public:
    explicit NonConvergent(const std::string& what, double exponent = 0.0)
        : std::runtime_error(what), exponent_(exponent) {}
    double exponent() const { return exponent_; }

private:
    double exponent_;
};

/// A reiteration rule hypothesis evaluated to false/infinite.
class HypothesisFailed : public std::runtime_error {
public:
    explicit HypothesisFailed(const std::string& condition)
        : std::runtime_error("hypothesis failed: " + condition), condition_(condition) {}
    const std::string& condition() const { return condition_; }

private:
    std::string condition_;
};

/// No rule in the catalogue matches the given operand pattern.
class NoRuleMatches : public std::runtime_error {
public:
    explicit NoRuleMatches(const std::string& what) : std::runtime_error(what) {}
};

/// The K-functional oracle requires norm indices >= 1.
class NonConvexIndices : public std::runtime_error {
public:
    explicit NonConvexIndices(const std::string& what) : std::runtime_error(what) {}
};

/// Oracle stopped before reaching tolerance; carries best value and gap bound.
class MaxIterations : public std::runtime_error {
public:
    MaxIterations(double best, double gap)
        : std::runtime_error("oracle iteration limit reached"), best_(best), gap_(gap) {}
    double best() const { return best_; }
    double gap() const { return gap_; }

private:
    double best_;
    double gap_;
};

/// The space is trivial ({0}) under the requested parameters.
class TrivialSpace : public std::runtime_error {
public:
    explicit TrivialSpace(const std::string& what) : std::runtime_error(what) {}
};

/// Norm evaluation requested for a descriptor that failed validation.
class InvalidDescriptor : public std::runtime_error {
public:
    explicit InvalidDescriptor(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ri
