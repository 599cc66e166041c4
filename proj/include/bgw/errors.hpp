#pragma once

#include <stdexcept>
#include <string>

namespace bgw {

// Thrown for malformed user input: bad law files, out-of-range parameters,
// unusable CLI arguments. CLI maps it to exit code 2.
struct InputError : std::runtime_error {
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when an internal cross-check fails: an oracle disagrees with the
// implementation, a sampler violates its own invariant, a table goes
// inconsistent. CLI maps it to exit code 3.
struct VerifyError : std::runtime_error {
  explicit VerifyError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when a configured sampling budget (rejection attempts x steps,
// retry caps) runs out. CLI maps it to exit code 4.
struct BudgetError : std::runtime_error {
  explicit BudgetError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown for filesystem trouble: unreadable input, unwritable output.
// CLI maps it to exit code 2 alongside other invalid-input conditions.
struct IoError : std::runtime_error {
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace bgw
