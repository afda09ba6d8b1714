#pragma once

#include <stdexcept>
#include <string>

namespace multiport {

/// Device cannot identify all d photon-number probabilities (e.g. s < d-1).
class NonIcError : public std::domain_error {
 public:
  explicit NonIcError(const std::string& what) : std::domain_error(what) {}
};

/// A probability sat at or below the interior floor where Fisher information
/// diverges.
class BoundaryError : public std::domain_error {
 public:
  explicit BoundaryError(const std::string& what) : std::domain_error(what) {}
};

/// Frame operator is numerically singular; canonical duals do not exist.
class SingularFrameError : public std::runtime_error {
 public:
  explicit SingularFrameError(const std::string& what) : std::runtime_error(what) {}
};

/// A quantity assumed monotone for bisection failed the scan validation.
class BracketError : public std::runtime_error {
 public:
  explicit BracketError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace multiport
