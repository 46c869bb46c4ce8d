#pragma once

#include <stdexcept>
#include <string>

namespace aff {

/// Root of the library error hierarchy; every failure raised here derives
/// from it so callers can catch by category.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define AFFQETU_DEFINE_ERROR(NAME)                                            \
    class NAME : public Error {                                               \
    public:                                                                   \
        using Error::Error;                                                   \
    }

AFFQETU_DEFINE_ERROR(NonHermitianError);
AFFQETU_DEFINE_ERROR(NoConvergenceError);
AFFQETU_DEFINE_ERROR(DimensionMismatchError);
AFFQETU_DEFINE_ERROR(NotUnitaryError);
AFFQETU_DEFINE_ERROR(BadTargetsError);
AFFQETU_DEFINE_ERROR(TooLargeError);
AFFQETU_DEFINE_ERROR(DegenerateBoundsError);
AFFQETU_DEFINE_ERROR(FullyDegenerateError);
AFFQETU_DEFINE_ERROR(BadParametersError);
AFFQETU_DEFINE_ERROR(InfeasibleBandError);
AFFQETU_DEFINE_ERROR(PhaseOptimizationError);
AFFQETU_DEFINE_ERROR(OutOfDomainError);
AFFQETU_DEFINE_ERROR(NoAcceptedShotsError);
AFFQETU_DEFINE_ERROR(NoQualifyingIntervalError);
AFFQETU_DEFINE_ERROR(ProfilingFailedError);
AFFQETU_DEFINE_ERROR(ZeroInitialOverlapError);
AFFQETU_DEFINE_ERROR(OverfilteringError);

#undef AFFQETU_DEFINE_ERROR

} // namespace aff
