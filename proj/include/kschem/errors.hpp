#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kschem {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual const char* name() const noexcept { return "Error"; }
};

// Bad inputs or violated preconditions. CLI exit code 2.
class InputError : public Error {
public:
    using Error::Error;
};

// Numerical failure on admissible inputs. CLI exit code 3.
class NumericalError : public Error {
public:
    using Error::Error;
};

#define KSCHEM_ERROR(Name, Base)      \
    class Name : public Base {        \
    public:                           \
        using Base::Base;             \
        const char* name() const noexcept override { return #Name; } \
    };

KSCHEM_ERROR(InvalidParameter, InputError)
KSCHEM_ERROR(NonPositiveDiffusivity, InputError)
KSCHEM_ERROR(ExponentBelowOne, InputError)
KSCHEM_ERROR(InvalidScaling, InputError)
KSCHEM_ERROR(DomainError, InputError)
KSCHEM_ERROR(TransformUndefined, InputError)
KSCHEM_ERROR(InvalidBracket, InputError)
KSCHEM_ERROR(NoCriticalValue, InputError)
KSCHEM_ERROR(NotGlobal, InputError)
KSCHEM_ERROR(WrongRegime, InputError)
KSCHEM_ERROR(ExponentOutOfRange, InputError)
KSCHEM_ERROR(InconsistentAmplitudes, InputError)
KSCHEM_ERROR(OutOfDomain, InputError)
KSCHEM_ERROR(StencilOutOfDomain, InputError)

KSCHEM_ERROR(MaxIterExceeded, NumericalError)
KSCHEM_ERROR(ToleranceNotReached, NumericalError)
KSCHEM_ERROR(DegenerateDenominator, NumericalError)

#undef KSCHEM_ERROR

// Adaptive step collapsed. Carries the outcome guessed from the last accepted state.
class StepUnderflow : public NumericalError {
public:
    StepUnderflow(const std::string& what, double radius, bool growing)
        : NumericalError(what), radius_(radius), growing_(growing) {}
    const char* name() const noexcept override { return "StepUnderflow"; }
    double radius() const { return radius_; }
    bool growing() const { return growing_; }

private:
    double radius_;
    bool growing_;
};

class NotConverged : public NumericalError {
public:
    NotConverged(const std::string& what, double gradient_norm, std::size_t iterations)
        : NumericalError(what), gradient_norm_(gradient_norm), iterations_(iterations) {}
    const char* name() const noexcept override { return "NotConverged"; }
    double gradient_norm() const { return gradient_norm_; }
    std::size_t iterations() const { return iterations_; }

private:
    double gradient_norm_;
    std::size_t iterations_;
};

}  // namespace kschem
