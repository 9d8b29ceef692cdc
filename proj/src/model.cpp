#include "regdiv/model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace regdiv {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonFiniteParameter: return "NonFiniteParameter";
    case ErrorCode::NonPositiveVolatility: return "NonPositiveVolatility";
    case ErrorCode::NonPositiveRate: return "NonPositiveRate";
    case ErrorCode::ThetaOrderViolation: return "ThetaOrderViolation";
    case ErrorCode::PositiveMu1: return "PositiveMu1";
    case ErrorCode::InvalidPolicy: return "InvalidPolicy";
    case ErrorCode::RootIsolationFailure: return "RootIsolationFailure";
    case ErrorCode::DegenerateRatio: return "DegenerateRatio";
    case ErrorCode::CaseNotApplicable: return "CaseNotApplicable";
    case ErrorCode::BracketFailure: return "BracketFailure";
    case ErrorCode::X0NotBracketed: return "X0NotBracketed";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::OrderingViolated: return "OrderingViolated";
    case ErrorCode::NoVerifiedCase: return "NoVerifiedCase";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

Regime regime_from_int(int r) {
  if (r == 1) return Regime::One;
  if (r == 2) return Regime::Two;
  throw std::invalid_argument("regime must be 1 or 2, got " + std::to_string(r));
}

double& ModelParams::field(std::string_view name) {
  if (name == "mu1") return mu1;
  if (name == "mu2") return mu2;
  if (name == "sigma1") return sigma1;
  if (name == "sigma2") return sigma2;
  if (name == "lambda1") return lambda1;
  if (name == "lambda2") return lambda2;
  if (name == "theta1") return theta1;
  if (name == "theta2") return theta2;
  if (name == "rho") return rho;
  throw std::invalid_argument("unknown parameter '" + std::string(name) + "'");
}

double ModelParams::field(std::string_view name) const {
  return const_cast<ModelParams&>(*this).field(name);
}

ModelParams reference_params(double mu2) {
  return ModelParams{-0.8, mu2, 0.5, 0.5, 10.0, 1.0, -0.2, 0.2, 0.5};
}

ValidatedParams ValidatedParams::validate(const ModelParams& p, ValidationOptions opts) {
  const std::array<std::pair<const char*, double>, 9> all{{{"mu1", p.mu1},
                                                           {"mu2", p.mu2},
                                                           {"sigma1", p.sigma1},
                                                           {"sigma2", p.sigma2},
                                                           {"lambda1", p.lambda1},
                                                           {"lambda2", p.lambda2},
                                                           {"theta1", p.theta1},
                                                           {"theta2", p.theta2},
                                                           {"rho", p.rho}}};
  for (const auto& [name, v] : all)
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteParameter, std::string(name) + " is not finite");
  if (p.sigma1 <= 0.0) throw Error(ErrorCode::NonPositiveVolatility, "sigma1 must be > 0");
  if (p.sigma2 <= 0.0) throw Error(ErrorCode::NonPositiveVolatility, "sigma2 must be > 0");
  if (p.lambda1 <= 0.0) throw Error(ErrorCode::NonPositiveRate, "lambda1 must be > 0");
  if (p.lambda2 <= 0.0) throw Error(ErrorCode::NonPositiveRate, "lambda2 must be > 0");
  if (p.rho <= 0.0) throw Error(ErrorCode::NonPositiveRate, "rho must be > 0");
  const bool ok = opts.allow_equal_thetas ? p.theta1 <= p.theta2 : p.theta1 < p.theta2;
  if (!ok)
    throw Error(ErrorCode::ThetaOrderViolation,
                opts.allow_equal_thetas ? "theta1 must be <= theta2" : "theta1 must be < theta2");
  if (p.mu1 > 0.0) throw Error(ErrorCode::PositiveMu1, "mu1 must be <= 0");
  return ValidatedParams(p, opts);
}

std::string_view to_string(CaseTag c) {
  switch (c) {
    case CaseTag::A: return "A";
    case CaseTag::B: return "B";
    case CaseTag::C: return "C";
    case CaseTag::D: return "D";
  }
  return "?";
}

std::string_view to_string(Ordering o) {
  switch (o) {
    case Ordering::C_b2_lt_b1: return "C_b2_lt_b1";
    case Ordering::C_b1_lt_b2: return "C_b1_lt_b2";
    case Ordering::D_b2_lt_b1: return "D_b2_lt_b1";
    case Ordering::D_b1_lt_b2: return "D_b1_lt_b2";
  }
  return "?";
}

Ordering parse_ordering(std::string_view s) {
  for (auto o : {Ordering::C_b2_lt_b1, Ordering::C_b1_lt_b2, Ordering::D_b2_lt_b1, Ordering::D_b1_lt_b2})
    if (to_string(o) == s) return o;
  throw Error(ErrorCode::InvalidPolicy, "unknown ordering '" + std::string(s) + "'");
}

CaseTag case_of(Ordering o) {
  return (o == Ordering::C_b2_lt_b1 || o == Ordering::C_b1_lt_b2) ? CaseTag::C : CaseTag::D;
}

bool b2_below_b1(Ordering o) { return o == Ordering::C_b2_lt_b1 || o == Ordering::D_b2_lt_b1; }

void check_policy(const Policy& policy, const ValidatedParams& params) {
  const double t1 = params.theta(Regime::One), t2 = params.theta(Regime::Two);
  if (const auto* b = std::get_if<BarrierRegime2>(&policy)) {
    if (!(std::isfinite(b->b2) && b->b2 > t2))
      throw Error(ErrorCode::InvalidPolicy, "barrier b2 must exceed theta2");
  } else if (const auto* lb = std::get_if<LiquidationBarrier>(&policy)) {
    if (!(std::isfinite(lb->d1) && std::isfinite(lb->b1) && std::isfinite(lb->b2)))
      throw Error(ErrorCode::InvalidPolicy, "boundaries must be finite");
    const bool d_ok = case_of(lb->ordering) == CaseTag::C ? (t2 < lb->d1) : (t1 < lb->d1 && lb->d1 < t2);
    const bool b_ok = b2_below_b1(lb->ordering) ? (lb->d1 < lb->b2 && lb->b2 < lb->b1)
                                                : (lb->d1 < lb->b1 && lb->b1 < lb->b2);
    const bool above = std::min(lb->b1, lb->b2) > t2;
    if (!(d_ok && b_ok && above))
      throw Error(ErrorCode::InvalidPolicy,
                  "boundaries violate ordering " + std::string(to_string(lb->ordering)));
  }
}

double max_barrier(const Policy& policy, const ValidatedParams& params) {
  if (const auto* b = std::get_if<BarrierRegime2>(&policy)) return b->b2;
  if (const auto* lb = std::get_if<LiquidationBarrier>(&policy)) return std::max(lb->b1, lb->b2);
  return params.theta(Regime::Two);
}

}  // namespace regdiv
