#pragma once

#include <array>

#include "regdiv/model.hpp"

namespace regdiv {

// phi(a) = -sigma^2 a^2 / 2 - mu a + (lambda + rho)
double phi(double alpha, double mu, double sigma, double lambda, double rho);
double phi(double alpha, const ValidatedParams& p, Regime r);

struct QuadraticRoots {
  double positive;
  double negative;
};

QuadraticRoots quadratic_roots(double mu, double sigma, double lambda, double rho);
QuadraticRoots quadratic_roots(const ValidatedParams& p, Regime r);

enum class QuarticBackend { Companion, Bisection };

// Roots of phi1 * phi2 - lambda1 * lambda2, ascending: a3 < a4 < 0 < a5 < a6.
std::array<double, 4> quartic_roots(const ValidatedParams& p, QuarticBackend backend = QuarticBackend::Companion);
double quartic_value(double alpha, const ValidatedParams& p);

struct CharRoots {
  double alpha1, alpha2;  // phi1
  double alpha7, alpha8;  // phi2
  std::array<double, 4> quartic;  // alpha3..alpha6

  static CharRoots compute(const ValidatedParams& p, QuarticBackend backend = QuarticBackend::Companion);
};

struct CoefficientRatio {
  double ratio;         // phi1(a) / lambda1
  double identity_gap;  // |phi1(a)/lambda1 - lambda2/phi2(a)|
};

// Factor taking a regime-1 quartic coefficient to the coupled regime-2 one.
CoefficientRatio coefficient_ratio(double alpha, const ValidatedParams& p);

}  // namespace regdiv
