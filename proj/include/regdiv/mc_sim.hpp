#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include <boost/random/exponential_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>

#include "regdiv/model.hpp"
#include "regdiv/policy.hpp"

namespace regdiv {

struct SimConfig {
  double dt = 1e-4;
  std::optional<double> horizon;  // default: tail bound below 1e-4
  std::size_t n_paths = 10000;
  std::uint64_t seed = 1;
  bool antithetic = false;
  // Brownian-bridge test for crossings of the absorbing levels between grid
  // points; without it the end-of-step check misses crossings and overpays.
  bool bridge_correction = true;
  // Up to this many dt steps are merged while the path is at least
  // 8 sigma sqrt(h) + |mu| h away from every boundary; 1 disables merging.
  unsigned max_merged_steps = 1024;
  // Next to the reflecting barrier, draw the step's endpoint and running
  // maximum jointly and apply the reflection map exactly, merging up to
  // max_reflected_steps dt steps. Off: clip the Euler step at the barrier.
  bool exact_reflection = true;
  unsigned max_reflected_steps = 64;
  unsigned threads = 0;  // 0: REGDIV_THREADS, else hardware concurrency
};

struct SimEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n_paths = 0;
  double horizon = 0.0;
  double discount_tail_bound = 0.0;  // mean over paths of the value left after the horizon, bounded
};

// Independent streams for path `index`; the same (seed, index) always gives the same draws.
class PathRng {
 public:
  PathRng(std::uint64_t seed, std::uint64_t index);
  double normal() { return negate_ ? -normal_(brownian_) : normal_(brownian_); }
  double holding_time(double rate) { return exponential_(chain_) / rate; }
  double uniform() { return uniform_(bridge_); }
  void set_antithetic(bool negate) { negate_ = negate; }

 private:
  std::mt19937_64 brownian_, chain_, bridge_;
  boost::random::normal_distribution<double> normal_;
  boost::random::exponential_distribution<double> exponential_;
  boost::random::uniform_01<double> uniform_;
  bool negate_ = false;
};

struct PathSample {
  double t;
  int regime;
  double x;
  double dividends;  // cumulative, undiscounted
};

struct PathRecorder {
  std::size_t stride = 1;  // keep every stride-th Euler step plus every event
  std::vector<PathSample> samples;
};

struct PathResult {
  double discounted_total = 0.0;
  double tail_bound = 0.0;
};

PathResult simulate_path(const Policy& policy, const ValidatedParams& p, double x0, Regime regime0,
                         const SimConfig& config, PathRng& rng, PathRecorder* recorder = nullptr);

double default_horizon(const Policy& policy, const ValidatedParams& p, double x0, double tail = 1e-4);

SimEstimate estimate_value(const Policy& policy, const ValidatedParams& p, double x0, Regime regime0,
                           const SimConfig& config);

struct ProbeResult {
  SimEstimate estimate;
  double analytic = 0.0;
  double difference = 0.0;  // estimate - analytic
  bool dominated = false;   // difference <= 3 stderr
};

ProbeResult suboptimality_probe(const Selection& optimal, double x0, Regime regime0, const Policy& perturbed,
                                const SimConfig& config);

unsigned resolve_threads(unsigned requested);

}  // namespace regdiv
