#pragma once

#include <stdexcept>
#include <string>

namespace l2d {

// Error categories map onto CLI exit codes: config 2, data 3, io 4.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace l2d
