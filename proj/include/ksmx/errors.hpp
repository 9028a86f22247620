#pragma once

#include <stdexcept>
#include <string>

namespace ksmx {

// Bad argument values (ranges, empty grids, unsupported p, ...).
struct parameter_error : std::invalid_argument {
  explicit parameter_error(const std::string& m) : std::invalid_argument(m) {}
};

// Violated caller contract (negative data, missing max, mismatched grids).
struct precondition_error : std::runtime_error {
  explicit precondition_error(const std::string& m) : std::runtime_error(m) {}
};

// Corrupt numerical data: non-finite samples, broken Hermitian symmetry.
struct data_error : std::runtime_error {
  explicit data_error(const std::string& m) : std::runtime_error(m) {}
};

// Input is valid but the quantity is undefined on it (constant field etc).
struct degenerate_input_error : std::runtime_error {
  explicit degenerate_input_error(const std::string& m)
      : std::runtime_error(m) {}
};

struct config_error : std::runtime_error {
  explicit config_error(const std::string& m) : std::runtime_error(m) {}
};

}  // namespace ksmx
