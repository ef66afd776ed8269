#pragma once

#include <stdexcept>
#include <string>

namespace vig {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define VIG_ERROR(Name)                  \
  struct Name : Error {                  \
    using Error::Error;                  \
  }

VIG_ERROR(DomainError);
VIG_ERROR(DivergentIntegral);
VIG_ERROR(NoBracket);
VIG_ERROR(DivergentNormalizer);
VIG_ERROR(NotStronglyAdmissible);
VIG_ERROR(SubgradientUnbounded);
VIG_ERROR(ConjugateDomain);
VIG_ERROR(Unbounded);
VIG_ERROR(NonInvertibleLink);
VIG_ERROR(RangeError);
VIG_ERROR(NotInvertible);
VIG_ERROR(SingularJacobian);
VIG_ERROR(DegenerateUtility);
VIG_ERROR(UnknownTarget);
VIG_ERROR(DegenerateSamples);
VIG_ERROR(Diverged);

#undef VIG_ERROR

}  // namespace vig
