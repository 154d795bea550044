#pragma once

#include <stdexcept>
#include <string>

namespace peerpay {

// Base for all domain failures. `code` is the stable machine-readable tag
// surfaced on the CLI's stderr channel.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

#define PEERPAY_DEFINE_ERROR(NAME)                                        \
  class NAME : public Error {                                             \
   public:                                                                \
    explicit NAME(const std::string& message) : Error(#NAME, message) {}  \
  }

// Structural input problems: unreadable files, bad JSON, bad number syntax.
PEERPAY_DEFINE_ERROR(MalformedInput);

// World validation.
PEERPAY_DEFINE_ERROR(NonNormalizedPrior);
PEERPAY_DEFINE_ERROR(DuplicateConditional);
PEERPAY_DEFINE_ERROR(OutOfRangeProbability);
PEERPAY_DEFINE_ERROR(ZeroProbabilityObservation);

// Shape and indexing.
PEERPAY_DEFINE_ERROR(DimensionMismatch);
PEERPAY_DEFINE_ERROR(IndexOutOfRange);

// Resource guards.
PEERPAY_DEFINE_ERROR(PopulationTooLarge);
PEERPAY_DEFINE_ERROR(CombinatorialGuardExceeded);

// Solver layer.
PEERPAY_DEFINE_ERROR(MalformedProgram);
PEERPAY_DEFINE_ERROR(Infeasible);
PEERPAY_DEFINE_ERROR(DegenerateWorld);
PEERPAY_DEFINE_ERROR(TooFewAgents);

// A checked internal invariant failed; always a bug or a disproved expectation.
PEERPAY_DEFINE_ERROR(InternalContradiction);

#undef PEERPAY_DEFINE_ERROR

}  // namespace peerpay
