#pragma once

#include <stdexcept>
#include <string>

namespace rabihet {

// Base of all library failures. InputError maps to CLI exit code 1,
// NumericalError to exit code 2.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InputError : Error {
  using Error::Error;
};

struct NumericalError : Error {
  using Error::Error;
};

// params
struct BadLambda : InputError { using InputError::InputError; };
struct BadC0 : InputError { using InputError::InputError; };
struct BadOmegaTilde : InputError { using InputError::InputError; };
struct RatioOutOfRange : InputError { using InputError::InputError; };

// equilibria
struct DegenerateSpectrum : NumericalError { using NumericalError::NumericalError; };

// dynamics
struct DomainViolation : NumericalError { using NumericalError::NumericalError; };

// limit_profiles
struct MeshTooCoarse : NumericalError { using NumericalError::NumericalError; };
struct OutOfDomain : InputError { using InputError::InputError; };

// bvp
struct RegimeMismatch : InputError { using InputError::InputError; };
struct NewtonDiverged : NumericalError { using NumericalError::NumericalError; };
struct LeftDomain : NumericalError { using NumericalError::NumericalError; };
struct IllConditioned : NumericalError { using NumericalError::NumericalError; };
struct ContinuationStalled : NumericalError { using NumericalError::NumericalError; };

// asymptotics
struct InsufficientData : InputError { using InputError::InputError; };
struct TailBelowFloor : NumericalError { using NumericalError::NumericalError; };

}  // namespace rabihet
