#pragma once

#include <stdexcept>
#include <string>

namespace hidsym {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

/// A sample of a field came back non-finite.
class EvaluationDomainError : public Error {
 public:
  using Error::Error;
};

/// Point outside the chart domain of a metric.
class DomainError : public Error {
 public:
  using Error::Error;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

class UnsupportedDegree : public Error {
 public:
  using Error::Error;
};

/// The lifted direction (1, x^i_0) is not timelike. Carries g_{lm} d^l d^m.
class TimelikeViolation : public Error {
 public:
  TimelikeViolation(const std::string& what, double hat_g00)
      : Error(what), hat_g00_(hat_g00) {}
  double hat_g00() const noexcept { return hat_g00_; }

 private:
  double hat_g00_;
};

class ClosednessError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace hidsym
