#pragma once

#include <stdexcept>
#include <string>

namespace permrat {

// Base class for all library errors. Callers that need to distinguish
// conditions catch the specific subclasses below.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// fields
struct NotPrime : Error { using Error::Error; };
struct DegreeOutOfRange : Error { using Error::Error; };
struct NotInvertible : Error { using Error::Error; };
struct NoSolution : Error { using Error::Error; };
struct SieveBudgetExceeded : Error { using Error::Error; };

// mpoly
struct DomainMismatch : Error { using Error::Error; };
struct NotDivisible : Error { using Error::Error; };
struct ZeroDenominator : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };

// derivation
struct DerivationMismatch : Error { using Error::Error; };
struct ZeroTrace : Error { using Error::Error; };
struct CacheCorrupt : Error { using Error::Error; };

// search
struct BudgetExceeded : Error { using Error::Error; };
struct NotFound : Error { using Error::Error; };
struct NoVarietyPoint : Error { using Error::Error; };
struct ReconstructionFailure : Error { using Error::Error; };
struct CoefficientLeak : Error { using Error::Error; };

}  // namespace permrat
