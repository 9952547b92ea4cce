#pragma once

#include <stdexcept>
#include <string>

namespace bellscope {

/// Raised when a numerical kernel cannot deliver its contract (quadrature
/// non-convergence, non-finite correlators, degenerate conditional states).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace bellscope
