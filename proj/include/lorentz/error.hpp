#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace lorentz {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Two scatterer copies overlap or touch. Indices are 0-based; `what()`
/// reports them 1-based.
class OverlapError : public Error {
 public:
  OverlapError(int first, int second, std::array<int, 2> translate, double gap);
  int first;
  int second;
  std::array<int, 2> translate;
  double gap;
};

/// The ray walked more cells than allowed without meeting an obstacle.
class HorizonExceeded : public Error {
 public:
  explicit HorizonExceeded(std::uint64_t cells);
  std::uint64_t cells;
};

/// A tangential hit could not be resolved by direction perturbation.
class GrazingAnomaly : public Error {
 public:
  using Error::Error;
};

class DegenerateMatrix : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class QuadratureNonConvergence : public Error {
 public:
  using Error::Error;
};

class MethodDisagreement : public Error {
 public:
  using Error::Error;
};

class InsufficientData : public Error {
 public:
  using Error::Error;
};

}  // namespace lorentz
