#pragma once

#include <stdexcept>
#include <string>

namespace niss {

/// Malformed or invalid measurement: structural problems (wrong shape, empty)
/// as well as validation failures (Hermiticity, PSD, completeness).
class povm_error : public std::runtime_error {
  public:
    explicit povm_error(const std::string& what) : std::runtime_error(what) {}
};

/// A target distribution lies outside the feasible set, or a coefficient
/// product cannot be split within its box constraints.
class infeasible_error : public std::runtime_error {
  public:
    explicit infeasible_error(const std::string& what) : std::runtime_error(what) {}
};

/// Floating-point output violated an exactness guarantee (e.g. an imaginary
/// residue above tolerance where the result must be real, or negative
/// probability mass beyond rounding scale).
class numeric_error : public std::runtime_error {
  public:
    explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

/// Per-realization marginals that must agree across the other party's
/// realizations fail to do so.
class no_signaling_error : public std::runtime_error {
  public:
    explicit no_signaling_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace niss
