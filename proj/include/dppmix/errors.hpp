// SPDX-License-Identifier: MIT
#pragma once

#include <stdexcept>
#include <string>

namespace dppmix {

/// Exit codes used by the CLI; library errors map onto them 1:1.
enum class ExitCode : int {
  Ok = 0,
  Validation = 2,
  Numeric = 3,
  Resource = 4,
  NonConvergence = 5,
};

/// Bad parameters, bad config, or a precondition violation.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A numeric method failed to reach its tolerance, or an operator check
/// failed (eigenvalue above 1, indefinite matrix where PSD was required).
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Work or memory guard tripped (too many points in a ball, grid too large).
class ResourceError : public std::runtime_error {
 public:
  explicit ResourceError(const std::string& msg) : std::runtime_error(msg) {}
};

/// An iteration (Newton, rejection sampling, contrast search) hit its cap.
class NonConvergenceError : public std::runtime_error {
 public:
  explicit NonConvergenceError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Maps a caught exception type to the CLI exit code.
inline ExitCode exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ValidationError*>(&e)) return ExitCode::Validation;
  if (dynamic_cast<const ResourceError*>(&e)) return ExitCode::Resource;
  if (dynamic_cast<const NonConvergenceError*>(&e)) return ExitCode::NonConvergence;
  if (dynamic_cast<const NumericError*>(&e)) return ExitCode::Numeric;
  return ExitCode::Numeric;
}

}  // namespace dppmix
