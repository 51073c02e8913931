#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cmsent {

/// Base class of every error the library throws.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A line-oriented input file could not be parsed. `line` is 1-based.
struct ParseError : Error {
  std::size_t line;
  ParseError(const std::string& msg, std::size_t line_no)
      : Error(msg + " (line " + std::to_string(line_no) + ")"), line(line_no) {}
};

struct MalformedHeader : ParseError { using ParseError::ParseError; };
struct MalformedTokenLine : ParseError { using ParseError::ParseError; };
struct DuplicateUid : ParseError { using ParseError::ParseError; };
struct EmptyTweet : ParseError { using ParseError::ParseError; };
struct MalformedLexiconLine : ParseError { using ParseError::ParseError; };
struct OutOfRangeValence : ParseError { using ParseError::ParseError; };

struct IoError : Error { using Error::Error; };
struct EmptyTrainingSet : Error { using Error::Error; };
struct FeatureSpaceMismatch : Error { using Error::Error; };
struct DegenerateLabels : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };
struct VersionMismatch : Error { using Error::Error; };
struct CorruptModel : Error { using Error::Error; };
struct LengthMismatch : Error { using Error::Error; };
struct EmptyInput : Error { using Error::Error; };
struct InvalidArgument : Error { using Error::Error; };

}  // namespace cmsent
