#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace mnec {

enum class ErrorKind {
  Parse,
  Validation,
  Coverage,
  Degenerate,
  Estimation,
  Io,
};

const char* to_string(ErrorKind kind);

/// Exception carrying a classification used by the CLI to pick an exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Non-fatal diagnostics collected by operations that degrade gracefully.
using Warnings = std::vector<std::string>;

}  // namespace mnec
