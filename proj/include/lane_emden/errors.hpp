#pragma once

#include <stdexcept>
#include <string>

namespace le {

/// A numerical method failed to deliver (divergence, bracketing, stagnation).
class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace le
