#pragma once

#include <stdexcept>

namespace lbsim {

// Invalid configuration values or input schema. The CLI maps this to exit code 1.
class ConfigError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Unreadable/unwritable files or malformed streams. The CLI maps this to exit code 2.
class IoError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace lbsim
