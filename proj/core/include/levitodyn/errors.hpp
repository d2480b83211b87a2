#pragma once

#include <stdexcept>
#include <string>

namespace levitodyn {

// Base class for every error raised by the library. Each subclass maps to one
// failure mode of the public API so callers can catch exactly what they handle.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define LEVITODYN_DEFINE_ERROR(Name)      \
  class Name : public Error {             \
   public:                                \
    using Error::Error;                   \
  }

LEVITODYN_DEFINE_ERROR(InvalidArgument);
LEVITODYN_DEFINE_ERROR(GimbalLock);
LEVITODYN_DEFINE_ERROR(DegeneratePolarization);
LEVITODYN_DEFINE_ERROR(NotUnitVector);
LEVITODYN_DEFINE_ERROR(UnphysicalDielectric);
LEVITODYN_DEFINE_ERROR(DimensionMismatch);
LEVITODYN_DEFINE_ERROR(InvalidUnraveling);
LEVITODYN_DEFINE_ERROR(NumericalBlowup);
LEVITODYN_DEFINE_ERROR(SegmentTooLong);
LEVITODYN_DEFINE_ERROR(FitDiverged);
LEVITODYN_DEFINE_ERROR(ConfigInvalid);
LEVITODYN_DEFINE_ERROR(IoFailure);

#undef LEVITODYN_DEFINE_ERROR

}  // namespace levitodyn
