#pragma once

#include <cmath>
#include <functional>

#include "doctest.h"
#include "regdiv/model.hpp"

namespace testing {

inline regdiv::ValidatedParams base(double mu2) { return regdiv::validate(regdiv::reference_params(mu2)); }

template <class Fn>
regdiv::ErrorCode code_of(Fn&& fn) {
  try {
    fn();
  } catch (const regdiv::Error& e) {
    return e.code();
  }
  FAIL("expected a regdiv::Error");
  return regdiv::ErrorCode::NoVerifiedCase;
}

// Central differences of f at x: first and second derivative.
inline double d1_fd(const std::function<double(double)>& f, double x, double h = 1e-5) {
  return (f(x + h) - f(x - h)) / (2 * h);
}
inline double d2_fd(const std::function<double(double)>& f, double x, double h = 1e-4) {
  return (f(x + h) - 2 * f(x) + f(x - h)) / (h * h);
}

// Fourth-order stencils, for steep exponentials where the three-point error shows.
inline double d1_fd4(const std::function<double(double)>& f, double x, double h = 1e-3) {
  return (f(x - 2 * h) - 8 * f(x - h) + 8 * f(x + h) - f(x + 2 * h)) / (12 * h);
}
inline double d2_fd4(const std::function<double(double)>& f, double x, double h = 1e-3) {
  return (-f(x - 2 * h) + 16 * f(x - h) - 30 * f(x) + 16 * f(x + h) - f(x + 2 * h)) / (12 * h * h);
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace testing
