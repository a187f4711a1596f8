#pragma once

#include <stdexcept>
#include <string>

namespace nsmhd {

/// Base of every error raised by the library. `category()` is the
/// machine-readable tag the CLI prints and maps to an exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* category() const noexcept = 0;
  virtual int exit_code() const noexcept = 0;
};

class ConfigError : public Error {
 public:
  using Error::Error;
  const char* category() const noexcept override { return "config"; }
  int exit_code() const noexcept override { return 2; }
};

class UsageError : public Error {
 public:
  using Error::Error;
  const char* category() const noexcept override { return "usage"; }
  int exit_code() const noexcept override { return 3; }
};

class NumericalError : public Error {
 public:
  using Error::Error;
  const char* category() const noexcept override { return "numerical"; }
  int exit_code() const noexcept override { return 4; }
};

/// Non-finite values appeared during time stepping.
class BlowUpError : public NumericalError {
 public:
  BlowUpError(const std::string& what, double time)
      : NumericalError(what), time_(time) {}
  const char* category() const noexcept override { return "blowup"; }
  int exit_code() const noexcept override { return 5; }
  double time() const noexcept { return time_; }

 private:
  double time_;
};

class CflError : public NumericalError {
 public:
  using NumericalError::NumericalError;
  const char* category() const noexcept override { return "cfl"; }
  int exit_code() const noexcept override { return 6; }
};

/// Neumann data inconsistent with the source beyond tolerance.
class IncompatibleDataError : public NumericalError {
 public:
  IncompatibleDataError(const std::string& what, double defect)
      : NumericalError(what), defect_(defect) {}
  const char* category() const noexcept override { return "incompatible"; }
  int exit_code() const noexcept override { return 7; }
  double defect() const noexcept { return defect_; }

 private:
  double defect_;
};

class IoError : public Error {
 public:
  using Error::Error;
  const char* category() const noexcept override { return "io"; }
  int exit_code() const noexcept override { return 8; }
};

}  // namespace nsmhd
