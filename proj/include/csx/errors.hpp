#pragma once

#include <stdexcept>
#include <string>

namespace csx {

// Broad failure classes. The CLI maps these onto process exit codes.
enum class ErrorKind {
  kInvalidArgument,  // bad input to a library call (usage-level)
  kConfig,           // run description could not be parsed or validated
  kIo,               // file missing, truncated, or unwritable
  kInvariant,        // a checked invariant failed
  kNumerical,        // on-core loops, under-resolved stacks, budgets
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class InvalidPacketError : public Error {
 public:
  explicit InvalidPacketError(const std::string& what) : Error(ErrorKind::kInvalidArgument, what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorKind::kConfig, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::kIo, what) {}
};

/// A loop vertex landed on (or numerically at) a zero of the sampled field.
/// Callers should perturb the path and retry.
class OnCoreError : public Error {
 public:
  explicit OnCoreError(const std::string& what) : Error(ErrorKind::kNumerical, what) {}
};

class NotRepresentableError : public Error {
 public:
  explicit NotRepresentableError(const std::string& what) : Error(ErrorKind::kInvalidArgument, what) {}
};

class UnderResolvedError : public Error {
 public:
  explicit UnderResolvedError(const std::string& what) : Error(ErrorKind::kNumerical, what) {}
};

inline int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvariant: return 1;
    case ErrorKind::kInvalidArgument:
    case ErrorKind::kConfig:
    case ErrorKind::kNumerical: return 2;
    case ErrorKind::kIo: return 3;
  }
  return 2;
}

}  // namespace csx
