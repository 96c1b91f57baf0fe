// errors.hpp — exception types shared across the library

#pragma once

#include <stdexcept>
#include <string>

namespace sbl {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DegenerateSpectrum : Error { using Error::Error; };
struct NonHermitianCoupling : Error { using Error::Error; };
struct NegativeDensity : Error { using Error::Error; };
struct QuadratureFailure : Error { using Error::Error; };
struct DivergentIntegral : Error { using Error::Error; };
struct TailTooHeavy : Error { using Error::Error; };
struct SeriesNotConverged : Error { using Error::Error; };
struct DegenerateLeadingEigenvalue : Error { using Error::Error; };
struct DimensionBudgetExceeded : Error { using Error::Error; };
struct PropagationToleranceFailure : Error { using Error::Error; };
struct HorizonTooLarge : Error { using Error::Error; };
struct ClusterTooLarge : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };

} // namespace sbl
