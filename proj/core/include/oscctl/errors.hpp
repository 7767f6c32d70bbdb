#pragma once

#include <stdexcept>
#include <string>

namespace oscctl {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define OSCCTL_DECLARE_ERROR(Name)            \
  class Name : public Error {                 \
   public:                                    \
    explicit Name(const std::string& what)    \
        : Error(#Name ": " + what) {}         \
  }

OSCCTL_DECLARE_ERROR(ValidationError);
OSCCTL_DECLARE_ERROR(DimensionMismatch);
OSCCTL_DECLARE_ERROR(QuadratureNotConverged);
OSCCTL_DECLARE_ERROR(ZeroVector);
OSCCTL_DECLARE_ERROR(SingularLocus);
OSCCTL_DECLARE_ERROR(ZeroEnergy);
OSCCTL_DECLARE_ERROR(ZeroState);
OSCCTL_DECLARE_ERROR(NoConvergence);
OSCCTL_DECLARE_ERROR(DuplicateFrequency);
OSCCTL_DECLARE_ERROR(InternalMismatch);
OSCCTL_DECLARE_ERROR(NoBracket);
OSCCTL_DECLARE_ERROR(DegenerateC);
OSCCTL_DECLARE_ERROR(HorizonExceeded);
OSCCTL_DECLARE_ERROR(NumericalBlowup);
OSCCTL_DECLARE_ERROR(NotToyCase);
OSCCTL_DECLARE_ERROR(ParseError);

#undef OSCCTL_DECLARE_ERROR

}  // namespace oscctl
