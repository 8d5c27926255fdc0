#pragma once

#include <stdexcept>

namespace mttbd {

// Configuration text that cannot be parsed or fails validation; messages
// carry source:line context where available.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Filesystem failures and malformed data files.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mttbd
