#include "regdiv/mc_sim.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <span>
#include <thread>

namespace regdiv {

namespace {

// seed_seq mixes (seed, index, stream) into one key; filling the whole
// engine state from seed_seq costs more than most paths.
std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t index, std::uint32_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), stream};
  std::array<std::uint32_t, 2> key;
  seq.generate(key.begin(), key.end());
  return std::mt19937_64((static_cast<std::uint64_t>(key[0]) << 32) | key[1]);
}

double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 16) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t h = v.size() / 2;
  return pairwise_sum(v.first(h)) + pairwise_sum(v.subspan(h));
}

double positive_drift(const ValidatedParams& p) { return std::max({0.0, p.mu(Regime::One), p.mu(Regime::Two)}); }

}  // namespace

PathRng::PathRng(std::uint64_t seed, std::uint64_t index)
    : brownian_(make_engine(seed, index, 0)), chain_(make_engine(seed, index, 1)), bridge_(make_engine(seed, index, 2)) {}

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("REGDIV_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

double default_horizon(const Policy& policy, const ValidatedParams& p, double x0, double tail) {
  const double top = std::max(max_barrier(policy, p), x0);
  const double bound = top - p.theta(Regime::One) + positive_drift(p) / p.rho();
  return std::max(0.0, std::log(bound / tail) / p.rho());
}

PathResult simulate_path(const Policy& policy, const ValidatedParams& p, double x0, Regime regime0,
                         const SimConfig& config, PathRng& rng, PathRecorder* rec) {
  const double horizon = config.horizon ? *config.horizon : default_horizon(policy, p, x0);
  const double rho = p.rho();
  const std::array<ActionRule, 2> rules{action_rule(policy, p, Regime::One), action_rule(policy, p, Regime::Two)};

  PathResult out;
  double t = 0.0, x = x0, disc = 1.0, paid = 0.0;
  Regime r = regime0;
  std::size_t step = 0;
  auto record = [&](bool force) {
    if (rec && (force || step % rec->stride == 0)) rec->samples.push_back({t, static_cast<int>(r), x, paid});
  };
  // true when the path ends
  auto act = [&]() {
    const Action a = immediate_action(policy, p, x, r);
    if (a.payout > 0.0) {
      out.discounted_total += disc * a.payout;
      paid += a.payout;
    }
    if (a.bankrupt()) {
      record(true);
      return true;
    }
    x = *a.resulting_state;
    return false;
  };

  record(true);
  if (act()) return out;
  record(true);

  const double dt = config.dt;
  // step sizes dt * 2^k with their square roots and discount factors
  std::vector<double> hs, sqs, dds;
  for (unsigned m = 1; m <= std::max(1u, config.max_merged_steps); m *= 2) {
    hs.push_back(m * dt);
    sqs.push_back(std::sqrt(m * dt));
    dds.push_back(std::exp(-rho * m * dt));
  }
  const double reflected_cap = config.exact_reflection ? std::max(1u, config.max_reflected_steps) * dt : dt;
  constexpr double kSafety = 8.0;
  while (true) {
    const ActionRule& rule = rules[index_of(r)];
    const double mu = p.mu(r), sigma = p.sigma(r);
    const double floor = std::max(rule.theta, rule.liquidate == rule.theta ? rule.theta : rule.liquidate);
    const bool liquidating = rule.liquidate > rule.theta;
    const double t_switch = t + rng.holding_time(p.lambda(r));
    const double t_end = std::min(t_switch, horizon);
    while (t < t_end) {
      double h = hs[0], sq = sqs[0], dd = dds[0];
      bool near_barrier = true;
      if (t_end - t < dt) {
        h = t_end - t;
        sq = std::sqrt(h);
        dd = std::exp(-rho * h);
      } else {
        for (std::size_t k = 1; k < hs.size(); ++k) {
          const double reach = kSafety * sigma * sqs[k] + std::abs(mu) * hs[k];
          if (hs[k] > t_end - t || reach > x - floor) break;
          const bool far = reach <= rule.barrier - x;
          if (!far && hs[k] > reflected_cap) break;
          h = hs[k];
          sq = sqs[k];
          dd = dds[k];
          near_barrier = !far;
        }
        if (h == hs[0]) near_barrier = kSafety * sigma * sq + std::abs(mu) * h > rule.barrier - x;
      }
      const double prev = x;
      const double w = mu * h + sigma * sq * rng.normal();
      double reflected = 0.0;
      if (config.exact_reflection && near_barrier) {
        // running maximum of the increment given its endpoint
        const double top = 0.5 * (w + std::sqrt(w * w - 2.0 * sigma * sigma * h * std::log1p(-rng.uniform())));
        reflected = std::max(0.0, x + top - rule.barrier);
      }
      x += w - reflected;
      if (reflected > 0.0) {
        // paid somewhere inside the step; discount at its midpoint
        out.discounted_total += disc * std::sqrt(dd) * reflected;
        paid += reflected;
      }
      t += h;
      disc *= dd;
      ++step;
      bool hit = x <= floor;
      if (!hit && config.bridge_correction) {
        const double e = 2.0 * (prev - floor) * (x - floor) / (sigma * sigma * h);
        if (e < 40.0 && rng.uniform() < std::exp(-e)) {
          hit = true;
          x = floor;
        }
      }
      if (hit) {
        if (liquidating) {
          const double amount = std::max(x, rule.theta) - rule.theta;
          out.discounted_total += disc * amount;
          paid += amount;
        }
        record(true);
        return out;
      }
      if (x > rule.barrier) {
        const double over = x - rule.barrier;
        out.discounted_total += disc * over;
        paid += over;
        x = rule.barrier;
      }
      record(false);
    }
    if (t >= horizon) {
      out.tail_bound = disc * (x - p.theta(Regime::One) + positive_drift(p) / rho);
      record(true);
      return out;
    }
    r = other(r);
    if (act()) return out;
    record(true);
  }
}

SimEstimate estimate_value(const Policy& policy, const ValidatedParams& p, double x0, Regime regime0,
                           const SimConfig& config) {
  check_policy(policy, p);
  if (!(config.dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (config.horizon && !(*config.horizon >= 0.0)) throw std::invalid_argument("horizon must be >= 0");
  if (config.n_paths < 1) throw std::invalid_argument("n_paths must be >= 1");

  SimConfig cfg = config;
  if (!cfg.horizon) cfg.horizon = default_horizon(policy, p, x0);

  SimEstimate est;
  est.horizon = *cfg.horizon;
  est.n_paths = cfg.n_paths;
  if (x0 <= p.theta(regime0)) return est;

  const bool anti = cfg.antithetic && cfg.n_paths >= 2;
  const std::size_t units = anti ? cfg.n_paths / 2 : cfg.n_paths;
  if (anti) est.n_paths = 2 * units;
  std::vector<double> value(units), tail(units);

  auto run = [&](std::size_t begin, std::size_t end) {
    for (std::size_t u = begin; u < end; ++u) {
      PathRng rng(cfg.seed, u);
      PathResult a = simulate_path(policy, p, x0, regime0, cfg, rng);
      if (anti) {
        PathRng twin(cfg.seed, u);
        twin.set_antithetic(true);
        PathResult b = simulate_path(policy, p, x0, regime0, cfg, twin);
        value[u] = 0.5 * (a.discounted_total + b.discounted_total);
        tail[u] = 0.5 * (a.tail_bound + b.tail_bound);
      } else {
        value[u] = a.discounted_total;
        tail[u] = a.tail_bound;
      }
    }
  };

  const unsigned nt = std::min<std::size_t>(resolve_threads(cfg.threads), units);
  if (nt <= 1) {
    run(0, units);
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (units + nt - 1) / nt;
    for (unsigned k = 0; k < nt; ++k) {
      const std::size_t b = k * chunk, e = std::min(units, b + chunk);
      if (b < e) pool.emplace_back(run, b, e);
    }
  }

  const double n = static_cast<double>(units);
  est.mean = pairwise_sum(value) / n;
  for (double& v : value) v = (v - est.mean) * (v - est.mean);
  est.std_error = units > 1 ? std::sqrt(pairwise_sum(value) / (n - 1.0) / n) : 0.0;
  est.discount_tail_bound = pairwise_sum(tail) / n;
  return est;
}

ProbeResult suboptimality_probe(const Selection& optimal, double x0, Regime regime0, const Policy& perturbed,
                                const SimConfig& config) {
  ProbeResult pr;
  pr.estimate = estimate_value(perturbed, optimal.params, x0, regime0, config);
  pr.analytic = value_at(optimal, x0, regime0);
  pr.difference = pr.estimate.mean - pr.analytic;
  pr.dominated = pr.difference <= 3.0 * pr.estimate.std_error;
  return pr;
}

}  // namespace regdiv
