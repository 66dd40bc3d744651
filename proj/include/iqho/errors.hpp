#pragma once

#include <stdexcept>
#include <string>

namespace iqho {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// conj(f.alpha) + g.alpha has non-positive real part: the pairing integral diverges.
class IncompatiblePair : public Error {
 public:
  using Error::Error;
};

class DegreeTooLarge : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

/// Construction requested outside the admissible theta regime.
class RegimeError : public Error {
 public:
  using Error::Error;
};

class NoConvergence : public Error {
 public:
  using Error::Error;
};

class SpanError : public Error {
 public:
  using Error::Error;
};

/// A function is not in V_rho (or a functional is not in Theta_rho).
class MembershipError : public Error {
 public:
  using Error::Error;
};

class ScheduleError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace iqho
