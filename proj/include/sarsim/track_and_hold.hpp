#pragma once

// Bootstrapped sampling switch: input-dependent on-resistance, single-pole settling onto
// the DAC top plate, hold step and kT/C noise.

#include <cmath>

#include "sarsim/config.hpp"
#include "sarsim/errors.hpp"
#include "sarsim/random.hpp"

namespace sarsim {

struct HeldSample {
  double v_p = 0;  // V, sampled top-plate voltages
  double v_n = 0;
  double settling_error_p = 0;  // V, held minus fully settled value (noise excluded)
  double settling_error_n = 0;
  double noise_p = 0;  // V, realized kT/C draws
  double noise_n = 0;

  double differential() const { return v_p - v_n; }
};

struct TrackOptions {
  bool noise = true;
  bool ideal = false;  // infinite track time and no hold step
};

// r_on0 * (1 + alpha*v + beta*v^2); v is the side voltage relative to v_cm.
inline double ron_of_input(double v, const AdcConfig& cfg) {
  const double r = cfg.th_ron0 * (1.0 + cfg.th_alpha * v + cfg.th_beta * v * v);
  if (!(r > 0.0))
    throw ConfigError("th_beta", "on-resistance polynomial is non-positive at v = " + std::to_string(v) + " V");
  return r;
}

// Fraction of the initial step still present after tracking for t through r_on into c.
inline double settling_factor(double r_on, double c, double t) { return std::exp(-t / (r_on * c)); }

// Per-side rms of the sampled thermal noise.
inline double ktc_sigma(double kt, double c) { return std::sqrt(kt / c); }

namespace detail {

struct SideSample {
  double held;
  double settling_error;
  double noise;
};

inline SideSample sample_side(double v_in, double v_prev, double c_side, const AdcConfig& cfg,
                              double kt, Rng& rng, const TrackOptions& opt) {
  const double u = v_in - cfg.v_cm;
  SideSample s{v_in, 0.0, 0.0};
  if (!opt.ideal) {
    const double eps = settling_factor(ron_of_input(u, cfg), c_side, cfg.t_track);
    s.settling_error = -(v_in - v_prev) * eps;
    // charge injection and feedthrough at switch opening
    s.held += s.settling_error + cfg.th_pedestal - cfg.th_inject_k3 * u * u * u;
  }
  if (opt.noise) {
    s.noise = gaussian(rng, ktc_sigma(kt, c_side));
    s.held += s.noise;
  }
  return s;
}

}  // namespace detail

// Samples both sides onto c_side (DAC plus top-plate parasitic), starting from the
// previously held plate voltages.
inline HeldSample sample(double v_in_p, double v_in_n, double prev_p, double prev_n, double c_side,
                         const AdcConfig& cfg, Rng& rng, const TrackOptions& opt = {}) {
  const double kt = kBoltzmann * cfg.temperature;
  const auto p = detail::sample_side(v_in_p, prev_p, c_side, cfg, kt, rng, opt);
  const auto n = detail::sample_side(v_in_n, prev_n, c_side, cfg, kt, rng, opt);
  return {p.held, n.held, p.settling_error, n.settling_error, p.noise, n.noise};
}

}  // namespace sarsim
