#pragma once

#include <stdexcept>
#include <string>

namespace cas {

/// Failure carrying a machine-readable code (`E_...`) and a process exit status.
class CodedError : public std::runtime_error {
 public:
  CodedError(std::string code, int exit_status, const std::string& detail)
      : std::runtime_error(detail), code_(std::move(code)), exit_status_(exit_status) {}

  const std::string& code() const { return code_; }
  int exit_status() const { return exit_status_; }

 private:
  std::string code_;
  int exit_status_;
};

inline constexpr int kExitFailure = 1;
inline constexpr int kExitMissingInput = 2;
inline constexpr int kExitBadConfig = 3;

}  // namespace cas
