#pragma once

#include <stdexcept>
#include <string>

namespace sedlab {

// Base class for all sedlab errors. Specific error types mirror the failure
// modes named in the public API contracts so tests can catch them precisely.
class Error : public std::runtime_error {
  public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define SEDLAB_DEFINE_ERROR(Name)                                             \
    class Name : public Error {                                               \
      public:                                                                 \
        explicit Name(const std::string& what) : Error(#Name ": " + what) {}  \
    }

SEDLAB_DEFINE_ERROR(NonPositiveInput);
SEDLAB_DEFINE_ERROR(StrongCouplingOutOfScope);
SEDLAB_DEFINE_ERROR(EmptyBandwidth);
SEDLAB_DEFINE_ERROR(TooFewModes);
SEDLAB_DEFINE_ERROR(NonPositiveCutoff);
SEDLAB_DEFINE_ERROR(StepTooLarge);
SEDLAB_DEFINE_ERROR(NonFiniteState);
SEDLAB_DEFINE_ERROR(NonConservativeForce);
SEDLAB_DEFINE_ERROR(MissingJacobian);
SEDLAB_DEFINE_ERROR(MissingSecondDerivative);
SEDLAB_DEFINE_ERROR(GridMismatch);
SEDLAB_DEFINE_ERROR(DimensionTooSmall);
SEDLAB_DEFINE_ERROR(IndexOutOfRange);
SEDLAB_DEFINE_ERROR(MismatchedModeSets);
SEDLAB_DEFINE_ERROR(InconsistentInputs);
SEDLAB_DEFINE_ERROR(DuplicateLabels);
SEDLAB_DEFINE_ERROR(EdgeState);
SEDLAB_DEFINE_ERROR(UpwardTransition);
SEDLAB_DEFINE_ERROR(ConfigParseError);
SEDLAB_DEFINE_ERROR(MultipleSweptAxes);
SEDLAB_DEFINE_ERROR(InvariantViolation);

#undef SEDLAB_DEFINE_ERROR

}  // namespace sedlab
