#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

namespace regdiv {

enum class ErrorCode {
  NonFiniteParameter,
  NonPositiveVolatility,
  NonPositiveRate,
  ThetaOrderViolation,
  PositiveMu1,
  InvalidPolicy,
  RootIsolationFailure,
  DegenerateRatio,
  CaseNotApplicable,
  BracketFailure,
  X0NotBracketed,
  NoConvergence,
  OrderingViolated,
  NoVerifiedCase,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

enum class Regime : int { One = 1, Two = 2 };

constexpr int index_of(Regime r) { return static_cast<int>(r) - 1; }
constexpr Regime other(Regime r) { return r == Regime::One ? Regime::Two : Regime::One; }
Regime regime_from_int(int r);

struct ModelParams {
  double mu1 = 0.0;
  double mu2 = 0.0;
  double sigma1 = 0.0;
  double sigma2 = 0.0;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double theta1 = 0.0;
  double theta2 = 0.0;
  double rho = 0.0;

  // Settable by the names used in the JSON schema and on the command line.
  double& field(std::string_view name);
  double field(std::string_view name) const;
  bool operator==(const ModelParams&) const = default;
};

// Base parameter set of the numerical study; mu2 is the swept drift.
ModelParams reference_params(double mu2 = 0.0);

struct ValidationOptions {
  // theta1 == theta2 is otherwise rejected; with the flag the Case B/C
  // formulas are evaluated with theta2 := theta1.
  bool allow_equal_thetas = false;
};

class ValidatedParams {
 public:
  static ValidatedParams validate(const ModelParams& p, ValidationOptions opts = {});

  const ModelParams& raw() const { return p_; }
  const ValidationOptions& options() const { return opts_; }

  double mu(Regime r) const { return r == Regime::One ? p_.mu1 : p_.mu2; }
  double sigma(Regime r) const { return r == Regime::One ? p_.sigma1 : p_.sigma2; }
  double lambda(Regime r) const { return r == Regime::One ? p_.lambda1 : p_.lambda2; }
  double theta(Regime r) const { return r == Regime::One ? p_.theta1 : p_.theta2; }
  double rho() const { return p_.rho; }

 private:
  ValidatedParams(const ModelParams& p, ValidationOptions o) : p_(p), opts_(o) {}
  ModelParams p_;
  ValidationOptions opts_;
};

inline ValidatedParams validate(const ModelParams& p, ValidationOptions opts = {}) {
  return ValidatedParams::validate(p, opts);
}

enum class CaseTag { A, B, C, D };
std::string_view to_string(CaseTag c);

// C_* puts d1 above theta2, D_* puts it between theta1 and theta2.
enum class Ordering { C_b2_lt_b1, C_b1_lt_b2, D_b2_lt_b1, D_b1_lt_b2 };
std::string_view to_string(Ordering o);
Ordering parse_ordering(std::string_view s);
CaseTag case_of(Ordering o);
bool b2_below_b1(Ordering o);

struct LiquidateBoth {
  bool operator==(const LiquidateBoth&) const = default;
};
struct BarrierRegime2 {
  double b2;
  bool operator==(const BarrierRegime2&) const = default;
};
struct LiquidationBarrier {
  double d1;
  double b1;
  double b2;
  Ordering ordering;
  bool operator==(const LiquidationBarrier&) const = default;
};
using Policy = std::variant<LiquidateBoth, BarrierRegime2, LiquidationBarrier>;

// Throws InvalidPolicy when the boundaries leave the policy's admissible cone.
void check_policy(const Policy& policy, const ValidatedParams& params);
// Largest reflecting barrier, or theta2 for immediate liquidation.
double max_barrier(const Policy& policy, const ValidatedParams& params);

}  // namespace regdiv
