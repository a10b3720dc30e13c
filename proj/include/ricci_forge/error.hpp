#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ricci_forge {

/// Malformed input: bad spec fields, violated preconditions, unsupported plans.
class SpecError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Expression text that does not parse. `offset` is the byte offset of the problem.
class ParseError : public SpecError {
  public:
    ParseError(const std::string& what, std::size_t offset)
        : SpecError(what + " at byte " + std::to_string(offset)), offset_(offset) {}
    std::size_t offset() const { return offset_; }

  private:
    std::size_t offset_;
};

/// A numeric evaluation left its domain (division by zero, even root of a
/// negative, a stencil point outside a chart, ...).
class DomainError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

/// Metric too ill-conditioned to invert at the requested point.
class SingularMetricError : public DomainError {
  public:
    using DomainError::DomainError;
};

}  // namespace ricci_forge
