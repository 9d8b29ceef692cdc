#include "regdiv/roots.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/tools/roots.hpp>

namespace regdiv {

double phi(double alpha, double mu, double sigma, double lambda, double rho) {
  return -0.5 * sigma * sigma * alpha * alpha - mu * alpha + (lambda + rho);
}

double phi(double alpha, const ValidatedParams& p, Regime r) {
  return phi(alpha, p.mu(r), p.sigma(r), p.lambda(r), p.rho());
}

QuadraticRoots quadratic_roots(double mu, double sigma, double lambda, double rho) {
  const double s2 = sigma * sigma;
  const double disc = std::sqrt(mu * mu + 2.0 * s2 * (lambda + rho));
  const double product = -2.0 * (lambda + rho) / s2;
  // Take the root without cancellation first, the other from the product.
  if (mu <= 0.0) {
    const double pos = (-mu + disc) / s2;
    return {pos, product / pos};
  }
  const double neg = (-mu - disc) / s2;
  return {product / neg, neg};
}

QuadraticRoots quadratic_roots(const ValidatedParams& p, Regime r) {
  return quadratic_roots(p.mu(r), p.sigma(r), p.lambda(r), p.rho());
}

double quartic_value(double alpha, const ValidatedParams& p) {
  return phi(alpha, p, Regime::One) * phi(alpha, p, Regime::Two) - p.lambda(Regime::One) * p.lambda(Regime::Two);
}

namespace {

double quartic_slope(double a, const ValidatedParams& p) {
  const double f1 = phi(a, p, Regime::One), f2 = phi(a, p, Regime::Two);
  const double d1 = -p.sigma(Regime::One) * p.sigma(Regime::One) * a - p.mu(Regime::One);
  const double d2 = -p.sigma(Regime::Two) * p.sigma(Regime::Two) * a - p.mu(Regime::Two);
  return d1 * f2 + f1 * d2;
}

double polish(double a, const ValidatedParams& p) {
  for (int it = 0; it < 4; ++it) {
    const double d = quartic_slope(a, p);
    if (d == 0.0) break;
    const double step = quartic_value(a, p) / d;
    a -= step;
    if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(a))) break;
  }
  return a;
}

// Size of the terms summed in quartic_value; rounding error scales with it.
double quartic_scale(double a, const ValidatedParams& p) {
  auto size = [&](Regime r) {
    return 0.5 * p.sigma(r) * p.sigma(r) * a * a + std::abs(p.mu(r) * a) + p.lambda(r) + p.rho();
  };
  return size(Regime::One) * size(Regime::Two) + p.lambda(Regime::One) * p.lambda(Regime::Two);
}

bool pattern_ok(const std::array<double, 4>& r, const ValidatedParams& p) {
  if (!(r[0] < r[1] && r[1] < 0.0 && 0.0 < r[2] && r[2] < r[3])) return false;
  return std::all_of(r.begin(), r.end(),
                     [&](double a) { return std::abs(quartic_value(a, p)) < 1e-9 * quartic_scale(a, p); });
}

std::array<double, 4> companion_roots(const ValidatedParams& p) {
  const double a1 = -0.5 * p.sigma(Regime::One) * p.sigma(Regime::One), b1 = -p.mu(Regime::One),
               c1 = p.lambda(Regime::One) + p.rho();
  const double a2 = -0.5 * p.sigma(Regime::Two) * p.sigma(Regime::Two), b2 = -p.mu(Regime::Two),
               c2 = p.lambda(Regime::Two) + p.rho();
  // descending coefficients of the expanded product
  const std::array<double, 5> c{a1 * a2, a1 * b2 + b1 * a2, a1 * c2 + b1 * b2 + c1 * a2, b1 * c2 + c1 * b2,
                                c1 * c2 - p.lambda(Regime::One) * p.lambda(Regime::Two)};
  Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
  for (int j = 0; j < 4; ++j) m(0, j) = -c[j + 1] / c[0];
  for (int i = 1; i < 4; ++i) m(i, i - 1) = 1.0;
  Eigen::EigenSolver<Eigen::Matrix4d> es(m, false);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::RootIsolationFailure, "eigenvalue iteration failed");
  std::array<double, 4> out{};
  for (int i = 0; i < 4; ++i) {
    const std::complex<double> z = es.eigenvalues()[i];
    if (std::abs(z.imag()) >= 1e-8 * std::abs(z.real()))
      throw Error(ErrorCode::RootIsolationFailure, "complex quartic root");
    out[i] = polish(z.real(), p);
  }
  std::sort(out.begin(), out.end());
  if (!pattern_ok(out, p)) throw Error(ErrorCode::RootIsolationFailure, "quartic roots lack the sign pattern");
  return out;
}

double bisect_root(double lo, double hi, const ValidatedParams& p) {
  auto f = [&](double a) { return quartic_value(a, p); };
  if (f(lo) * f(hi) > 0.0) throw Error(ErrorCode::RootIsolationFailure, "no sign change in quartic bracket");
  auto tol = [](double a, double b) { return std::abs(b - a) <= 4e-16 * std::max(1.0, std::abs(a)); };
  boost::uintmax_t iters = 400;
  auto [a, b] = boost::math::tools::bisect(f, lo, hi, tol, iters);
  return polish(0.5 * (a + b), p);
}

std::array<double, 4> bracketed_roots(const ValidatedParams& p) {
  // phi1*phi2 - l1*l2 equals -l1*l2 < 0 at every root of phi1 and phi2, is
  // positive at 0 and at +-infinity, so each root sits in a known bracket.
  const auto q1 = quadratic_roots(p, Regime::One);
  const auto q2 = quadratic_roots(p, Regime::Two);
  double big = 10.0 * std::max({std::abs(q1.positive), std::abs(q1.negative), std::abs(q2.positive),
                                std::abs(q2.negative)});
  for (int i = 0; i < 60 && (quartic_value(big, p) <= 0.0 || quartic_value(-big, p) <= 0.0); ++i) big *= 2.0;
  const double neg_in = std::max(q1.negative, q2.negative), neg_out = std::min(q1.negative, q2.negative);
  const double pos_in = std::min(q1.positive, q2.positive), pos_out = std::max(q1.positive, q2.positive);
  std::array<double, 4> out{bisect_root(-big, neg_out, p), bisect_root(neg_in, 0.0, p), bisect_root(0.0, pos_in, p),
                            bisect_root(pos_out, big, p)};
  if (!pattern_ok(out, p)) throw Error(ErrorCode::RootIsolationFailure, "bisection roots lack the sign pattern");
  return out;
}

}  // namespace

std::array<double, 4> quartic_roots(const ValidatedParams& p, QuarticBackend backend) {
  if (backend == QuarticBackend::Bisection) return bracketed_roots(p);
  try {
    return companion_roots(p);
  } catch (const Error&) {
    return bracketed_roots(p);
  }
}

CharRoots CharRoots::compute(const ValidatedParams& p, QuarticBackend backend) {
  const auto q1 = quadratic_roots(p, Regime::One);
  const auto q2 = quadratic_roots(p, Regime::Two);
  return {q1.positive, q1.negative, q2.positive, q2.negative, quartic_roots(p, backend)};
}

CoefficientRatio coefficient_ratio(double alpha, const ValidatedParams& p) {
  const double f1 = phi(alpha, p, Regime::One), f2 = phi(alpha, p, Regime::Two);
  const double l1 = p.lambda(Regime::One), l2 = p.lambda(Regime::Two);
  if (std::abs(f2) <= 1e-12 * l2) throw Error(ErrorCode::DegenerateRatio, "phi2 vanishes at the exponent");
  const double ratio = f1 / l1;
  return {ratio, std::abs(ratio - l2 / f2)};
}

}  // namespace regdiv
