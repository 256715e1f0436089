#pragma once

#include <stdexcept>
#include <string>

namespace fsmr {

// Precondition violated by the caller (bad index, mismatched sizes, invalid params).
class contract_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Resampling could not produce an output, e.g. the mesh has no samples.
class numerical_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class io_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool ok, const char* what) {
  if (!ok) throw contract_error(what);
}

inline void require(bool ok, const std::string& what) {
  if (!ok) throw contract_error(what);
}

}  // namespace detail
}  // namespace fsmr
