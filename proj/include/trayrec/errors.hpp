#pragma once

#include <stdexcept>

namespace trayrec {

/// Base type for everything thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ZeroVectorError : Error { using Error::Error; };
struct DimensionMismatchError : Error { using Error::Error; };
struct InvalidParameterError : Error { using Error::Error; };

struct UnknownClassError : Error { using Error::Error; };
struct EmptyTemplateSetError : Error { using Error::Error; };
struct MissingWindowFeaturesError : Error { using Error::Error; };

struct ParseError : Error { using Error::Error; };
struct ValidationError : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

struct NoGroundTruthError : Error { using Error::Error; };
struct InsufficientDataError : Error { using Error::Error; };
struct DegenerateVarianceError : Error { using Error::Error; };

struct InvalidSpecError : Error { using Error::Error; };
struct EmptyPatchError : Error { using Error::Error; };

}  // namespace trayrec
