#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace dtri {

using Index = std::int32_t;
inline constexpr Index kInvalid = -1;

// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MalformedInput : Error {
  using Error::Error;
};
struct NonManifold : Error {
  using Error::Error;
};
struct UnknownVertex : Error {
  using Error::Error;
};
struct UnknownSimplex : Error {
  using Error::Error;
};
struct MissingLength : Error {
  using Error::Error;
};
struct MissingLocalLength : Error {
  using Error::Error;
};
struct Degenerate : Error {
  using Error::Error;
};
struct DegenerateAngle : Error {
  using Error::Error;
};
struct DegenerateHinge : Error {
  using Error::Error;
};
struct NotFlippable : Error {
  using Error::Error;
};
struct DegenerateFlip : Error {
  using Error::Error;
};
struct RequiresZeroWeights : Error {
  using Error::Error;
};
struct IncompatibleRHS : Error {
  using Error::Error;
};
struct SingularBeyondConstants : Error {
  using Error::Error;
};
struct NonpositiveDualVolume : Error {
  using Error::Error;
};
struct UnstableStep : Error {
  using Error::Error;
};
struct UnknownFixture : Error {
  using Error::Error;
};

struct ParseError : Error {
  int line;
  ParseError(int line_, const std::string& msg)
      : Error("parse error (line " + std::to_string(line_) + "): " + msg), line(line_) {}
};

struct ValidationError : Error {
  using Error::Error;
};

}  // namespace dtri
