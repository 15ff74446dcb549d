#pragma once

#include <stdexcept>
#include <string>

namespace htpa {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A caller-supplied value breaks a documented precondition.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// A numerical procedure could not deliver the requested accuracy.
class NumericalError : public Error {
public:
    using Error::Error;
};

#define HTPA_DECLARE_ERROR(Name, Base)          \
    class Name : public Base {                  \
    public:                                     \
        using Base::Base;                       \
    }

HTPA_DECLARE_ERROR(InvalidParams, ValidationError);
HTPA_DECLARE_ERROR(DegenerateTail, ValidationError);
HTPA_DECLARE_ERROR(InvalidSeed, ValidationError);
HTPA_DECLARE_ERROR(ResourceLimit, ValidationError);
HTPA_DECLARE_ERROR(EmptyInput, ValidationError);
HTPA_DECLARE_ERROR(InsufficientData, ValidationError);
HTPA_DECLARE_ERROR(NonPositiveSample, ValidationError);
HTPA_DECLARE_ERROR(DegenerateTailSample, InsufficientData);
HTPA_DECLARE_ERROR(DomainError, ValidationError);
HTPA_DECLARE_ERROR(InsufficientExceedances, ValidationError);
HTPA_DECLARE_ERROR(InvalidK, ValidationError);
HTPA_DECLARE_ERROR(MarginalDiverges, ValidationError);
HTPA_DECLARE_ERROR(FormatError, ValidationError);

HTPA_DECLARE_ERROR(QuadratureFailure, NumericalError);
HTPA_DECLARE_ERROR(SupportExceeded, NumericalError);

#undef HTPA_DECLARE_ERROR

}  // namespace htpa
