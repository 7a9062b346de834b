#pragma once

// Asynchronous SAR timing budget: worst-case regeneration time for a metastability target,
// maximum sampling rate, the synchronous baseline and a Monte Carlo check of the
// metastability rate.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <thread>
#include <vector>

#include "sarsim/comparator.hpp"
#include "sarsim/config.hpp"
#include "sarsim/errors.hpp"
#include "sarsim/random.hpp"

namespace sarsim {

// Regeneration time so that an input drawn uniformly within one LSB fails to resolve with
// probability p_meta: tau * ln(2 V_DD / (A_v * p_meta * lsb)).
inline double t_hard(double tau, double v_dd, double a_v, double p_meta, double lsb) {
  const double arg = 2.0 * v_dd / (a_v * p_meta * lsb);
  if (!(arg >= 1.0))
    throw DomainError("t_hard: log argument below 1, the metastability target is met with no regeneration time");
  return tau * std::log(arg);
}

struct BudgetInputs {
  int bits = 10;
  double t_easy = 0;
  double t_hard = 0;
  double t_fix = 0;
  double t_delay = 0;
  double t_track = 0;
};

// Shortest conversion period the asynchronous loop can sustain.
inline double async_period(const BudgetInputs& in) {
  return in.t_easy + in.t_hard + (in.bits - 1) * in.t_fix + in.bits * in.t_delay + in.t_track;
}

inline double max_sampling_rate(const BudgetInputs& in) {
  if (in.t_easy < 0 || in.t_hard < 0 || in.t_fix < 0 || in.t_delay < 0 || in.t_track < 0)
    throw PreconditionError("max_sampling_rate: time components must be non-negative");
  return 1.0 / async_period(in);
}

// A synchronous SAR gives every bit the worst-case slot.
inline double sync_period(const BudgetInputs& in) {
  const double slot = in.t_hard + in.t_fix + in.t_delay;
  return in.bits * slot + in.t_track;
}

// f_max(async) / f_max(sync) - 1.
inline double sync_async_ratio(const BudgetInputs& in) { return sync_period(in) / async_period(in) - 1.0; }

struct TimingBudget {
  int bits = 0;
  double tau_reg = 0;
  double t_hard = 0;
  double t_easy = 0;
  double t_fix = 0;
  double t_delay = 0;
  double t_track = 0;
  double period = 0;        // s, async minimum period
  double f_s_max = 0;       // Hz, async
  double f_s_max_sync = 0;  // Hz
  double f_s = 0;           // Hz, configured
  double margin = 0;        // s, 1/f_s - period; must be > 0
  double async_gain = 0;    // f_s_max / f_s_max_sync - 1
  bool violation = false;

  BudgetInputs inputs() const { return {bits, t_easy, t_hard, t_fix, t_delay, t_track}; }
};

inline TimingBudget timing_budget(const AdcConfig& cfg) {
  const auto d = derived_constants(cfg);
  TimingBudget b;
  b.bits = cfg.bits;
  b.tau_reg = d.tau_reg;
  b.t_hard = t_hard(d.tau_reg, cfg.v_dd, cfg.comp_av, cfg.p_meta, d.lsb);
  b.t_easy = d.t_easy;
  b.t_fix = cfg.t_fix;
  b.t_delay = cfg.t_delay;
  b.t_track = cfg.t_track;
  const auto in = b.inputs();
  b.period = async_period(in);
  b.f_s_max = max_sampling_rate(in);
  b.f_s_max_sync = 1.0 / sync_period(in);
  b.f_s = cfg.f_s;
  b.margin = 1.0 / cfg.f_s - b.period;
  b.async_gain = sync_async_ratio(in);
  b.violation = !(b.margin > 0);
  return b;
}

struct MetastabilityResult {
  std::uint64_t trials = 0;
  std::uint64_t events = 0;
  double rate = 0;
  double sigma = 0;  // binomial standard error at the target rate
  double ci_low = 0;   // 3-sigma interval around the empirical rate
  double ci_high = 0;
  double expected = 0;  // closed-form rate for a noiseless comparator
  double t_hard = 0;
};

inline constexpr std::uint64_t kMetastabilityBlock = 1 << 16;

// Draws comparator inputs uniformly over one LSB and counts decisions slower than
// t_hard(p_test). Trials are cut into fixed blocks, each with its own random stream, so the
// result does not depend on the worker count.
inline MetastabilityResult metastability_mc(const AdcConfig& cfg, std::uint64_t trials, double p_test,
                                            std::uint64_t seed, bool noise = false, unsigned workers = 1) {
  if (!(p_test > 0 && p_test <= 1)) throw PreconditionError("metastability_mc: p_test must lie in (0, 1]");
  if (static_cast<double>(trials) < 10.0 / p_test)
    throw PreconditionError("metastability_mc: need at least 10/p_test trials");
  const auto d = derived_constants(cfg);
  auto model = ComparatorModel::from(cfg);
  if (!noise) model.noise_rms = 0;
  MetastabilityResult r;
  r.trials = trials;
  r.t_hard = t_hard(d.tau_reg, cfg.v_dd, cfg.comp_av, p_test, d.lsb);
  r.expected = p_test;

  const std::uint64_t blocks = (trials + kMetastabilityBlock - 1) / kMetastabilityBlock;
  std::vector<std::uint64_t> counts(blocks, 0);
  const auto run_block = [&](std::uint64_t blk) {
    auto rng = make_rng(seed, Stream::metastability, blk);
    std::uniform_real_distribution<double> u(-0.5 * d.lsb, 0.5 * d.lsb);
    const std::uint64_t n = std::min(kMetastabilityBlock, trials - blk * kMetastabilityBlock);
    std::uint64_t c = 0;
    for (std::uint64_t k = 0; k < n; ++k) {
      const double v = u(rng) + gaussian(rng, model.noise_rms);
      if (regeneration_time(v, model.tau_reg, model.v_dd, model.a_v) > r.t_hard) ++c;
    }
    counts[blk] = c;
  };
  workers = std::max(1u, workers);
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      for (std::uint64_t blk = w; blk < blocks; blk += workers) run_block(blk);
    });
  for (auto& t : pool) t.join();

  for (auto c : counts) r.events += c;
  r.rate = static_cast<double>(r.events) / static_cast<double>(trials);
  r.sigma = std::sqrt(p_test * (1.0 - p_test) / static_cast<double>(trials));
  const double se = std::sqrt(std::max(r.rate * (1.0 - r.rate), 1e-300) / static_cast<double>(trials));
  r.ci_low = std::max(0.0, r.rate - 3.0 * se);
  r.ci_high = std::min(1.0, r.rate + 3.0 * se);
  return r;
}

}  // namespace sarsim
