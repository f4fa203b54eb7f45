#pragma once

#include <stdexcept>
#include <string>

namespace fracheat {

// Invalid experiment or solver configuration (bad mesh size, mismatched
// dimensions, empty penalty list, ...).
class config_error : public std::invalid_argument {
 public:
  explicit config_error(const std::string& what) : std::invalid_argument(what) {}
};

// A numerical routine failed to deliver its accuracy contract
// (singular system, eigensolver non-convergence, divergent quadrature).
class numerical_error : public std::runtime_error {
 public:
  explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

// Bisection bracket does not straddle the feasibility boundary.
class bracket_error : public std::runtime_error {
 public:
  explicit bracket_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fracheat
