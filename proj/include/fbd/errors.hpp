#pragma once

#include <stdexcept>
#include <string>

namespace fbd {

// Every error raised by the library derives from Error so callers can catch
// the family at once; the concrete type names the failed contract.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define FBD_DECLARE_ERROR(Name)                                   \
    class Name : public Error {                                   \
    public:                                                       \
        explicit Name(const std::string& what) : Error(what) {}   \
    }

FBD_DECLARE_ERROR(InvalidStateError);
FBD_DECLARE_ERROR(CompatibilityError);
FBD_DECLARE_ERROR(DomainError);
FBD_DECLARE_ERROR(NumericalOverflowError);
FBD_DECLARE_ERROR(GuardFailureError);
FBD_DECLARE_ERROR(PhaseConsistencyError);
FBD_DECLARE_ERROR(SequentialityViolation);
FBD_DECLARE_ERROR(DecompositionMismatch);
FBD_DECLARE_ERROR(InconsistencyError);
FBD_DECLARE_ERROR(ConfigError);
FBD_DECLARE_ERROR(DataError);
FBD_DECLARE_ERROR(MarginError);

#undef FBD_DECLARE_ERROR

} // namespace fbd
