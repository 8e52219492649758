#pragma once

#include <stdexcept>
#include <string>

namespace bni {

// Exception taxonomy. The three base classes map onto process exit codes
// used by the command-line tool: input problems (2), numerical or structural
// degeneracy (3), and bad parameters/configuration (4).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual int exit_code() const noexcept = 0;
};

class InputError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 2; }
};

class NumericalError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 3; }
};

class ConfigError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 4; }
};

class IoError : public InputError {
 public:
  using InputError::InputError;
};

class FormatError : public InputError {
 public:
  using InputError::InputError;
};

class DuplicateError : public InputError {
 public:
  using InputError::InputError;
};

class MappingError : public InputError {
 public:
  using InputError::InputError;
};

class DegenerateError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SeparationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class RankError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SubgroupError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class PropensityError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class StabilizationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class ParameterError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

}  // namespace bni
