#pragma once

#include <stdexcept>
#include <string>

namespace pucut {

// Invalid arguments or inconsistent inputs handed to a library routine.
class InputError : public std::invalid_argument {
 public:
  explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

// Malformed external data (CSV rows, weight files, mask files).
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace pucut
