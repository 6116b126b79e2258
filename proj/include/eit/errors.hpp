// errors.hpp - exception types shared across the library
#ifndef EIT_ERRORS_HPP
#define EIT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace eit {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Parameter and input validation
struct InvalidParams : Error { using Error::Error; };
struct InvalidWidth : Error { using Error::Error; };
struct InvalidDepth : Error { using Error::Error; };
struct Indeterminate : Error { using Error::Error; };

// Tabulated profile construction
struct NonUniformGrid : Error { using Error::Error; };
struct AllZero : Error { using Error::Error; };
struct NegativeDensity : Error { using Error::Error; };

// Numerics
struct QuadratureNotConverged : Error { using Error::Error; };
struct FitDiverged : Error { using Error::Error; };

// Lineshape analysis
struct NoDip : Error { using Error::Error; };
struct NotResolved : Error { using Error::Error; };
struct EmptyWindow : Error { using Error::Error; };
struct GridTooCoarse : Error { using Error::Error; };
struct FeatureAbsent : Error { using Error::Error; };

// Transmission
struct GridMismatch : Error { using Error::Error; };
struct DegenerateBaseline : Error { using Error::Error; };

// Hole burning
struct AmbiguousSelection : Error { using Error::Error; };
struct NoConvergence : Error { using Error::Error; };

// Config / IO
struct ParseError : Error { using Error::Error; };
struct ValidationError : Error { using Error::Error; };
struct SchemaError : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

}  // namespace eit

#endif  // EIT_ERRORS_HPP
