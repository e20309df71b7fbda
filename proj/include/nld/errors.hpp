#pragma once

#include <stdexcept>
#include <string>

namespace nld {

// Base for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside a function's mathematical domain (e.g. log at 0).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Adaptive integration failed to reach its tolerance.
class QuadratureError : public Error {
 public:
  using Error::Error;
};

// A quadrature grid does not cover the particles plus kernel support.
class CoverageError : public Error {
 public:
  using Error::Error;
};

// Mismatched dimensions or sizes between inputs.
class SizeError : public Error {
 public:
  using Error::Error;
};

// Iterative solver stopped without meeting its tolerance.
class SolverError : public Error {
 public:
  using Error::Error;
};

// Invalid experiment configuration; message lists every problem found.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace nld
