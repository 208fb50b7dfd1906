#ifndef VICIOUS_ERRORS_HPP
#define VICIOUS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace vicious {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Precondition or argument outside the supported domain.
struct DomainError : Error { using Error::Error; };
struct UnsupportedDegree : DomainError { using DomainError::DomainError; };
// Query outside the range covered by a precomputed solution.
struct RangeError : DomainError { using DomainError::DomainError; };

// Non-finite value produced while evaluating an integrand or series.
struct EvaluationError : Error { using Error::Error; };
struct ConvergenceError : Error { using Error::Error; };
struct IntegrationError : Error { using Error::Error; };
struct PrecisionError : Error { using Error::Error; };
struct TailRegularizationError : Error { using Error::Error; };
struct ResolutionError : Error { using Error::Error; };
struct OracleUnavailable : Error { using Error::Error; };
struct InfeasibleConfiguration : Error { using Error::Error; };
struct StatisticsError : Error { using Error::Error; };
struct CacheError : Error { using Error::Error; };

}  // namespace vicious

#endif
