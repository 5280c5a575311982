#pragma once

#include <stdexcept>
#include <string>

namespace bsif {

// Error categories map one-to-one onto the CLI exit codes (2, 3, 4).
enum class ErrorKind { Precondition, Data, Numeric };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Caller violated a documented precondition (bad argument, bad config).
class PreconditionError : public Error {
 public:
  explicit PreconditionError(const std::string& what) : Error(ErrorKind::Precondition, what) {}
};

/// Input data is missing, malformed or inconsistent.
class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ErrorKind::Data, what) {}
};

/// A numeric procedure could not produce a meaningful result.
class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what) : Error(ErrorKind::Numeric, what) {}
};

}  // namespace bsif
