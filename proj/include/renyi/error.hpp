#pragma once

#include <stdexcept>
#include <string>

namespace renyi {

/// Bad input: malformed measure, out-of-domain parameter, unparseable file.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

/// Numeric failure: a norm underflowed, a fit had too few finite points.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

/// The filtered measure fell below the representable range at this scale.
class ScaleOutOfRange : public NumericError {
 public:
  explicit ScaleOutOfRange(const std::string& what) : NumericError(what) {}
};

namespace detail {

inline void require(bool ok, const std::string& message) {
  if (!ok) throw ValidationError(message);
}

}  // namespace detail
}  // namespace renyi
