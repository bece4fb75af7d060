#pragma once

#include <stdexcept>
#include <string>

namespace mceus {

/// Coarse failure category; front ends map it onto exit codes / HTTP statuses.
enum class ErrorKind {
  kInvalidInput,  // malformed arguments, files or contract-violating values
  kNotFound,      // missing file or dataset
  kIo,            // read/write failure on an existing path
  kNumeric,       // degenerate numeric condition (e.g. all-dark reference)
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

inline void require(bool cond, const std::string& what) {
  if (!cond) fail(ErrorKind::kInvalidInput, what);
}

}  // namespace mceus
