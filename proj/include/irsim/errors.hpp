#pragma once

#include <stdexcept>
#include <string>

namespace irsim {

// All library errors carry a stable machine-readable code so the CLI can
// report it and scripts can branch on it.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

struct InvalidParameterError : Error {
  explicit InvalidParameterError(const std::string& what)
      : Error("invalid-parameter", what) {}
};

struct LengthMismatchError : Error {
  explicit LengthMismatchError(const std::string& what)
      : Error("length-mismatch", what) {}
};

struct UnsupportedParametersError : Error {
  explicit UnsupportedParametersError(const std::string& what)
      : Error("unsupported-parameters", what) {}
};

struct InfeasibleAllocationError : Error {
  explicit InfeasibleAllocationError(const std::string& what)
      : Error("infeasible-allocation", what) {}
};

struct InsufficientDataError : Error {
  explicit InsufficientDataError(const std::string& what)
      : Error("insufficient-data", what) {}
};

struct IoError : Error {
  explicit IoError(const std::string& what) : Error("io-error", what) {}
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& what)
      : Error("invalid-config", what) {}
};

}  // namespace irsim
