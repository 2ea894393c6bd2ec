#pragma once

#include <stdexcept>
#include <string>

namespace mzkit {

/// Raised when a configured numerical cap is exceeded: degree beyond the
/// precision of the basis assembly, quadrature node budget, Carleson net
/// budget, or transport LP size. The CLI maps this to exit code 2; plain
/// input errors (std::invalid_argument) map to exit code 1.
class CapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mzkit
