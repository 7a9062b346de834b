#pragma once

// StrongARM latch behavioral model.

#include <algorithm>
#include <cmath>
#include <limits>

#include "sarsim/config.hpp"
#include "sarsim/errors.hpp"
#include "sarsim/random.hpp"

namespace sarsim {

struct Decision {
  int bit = 0;             // -1 or +1
  double t_decide = 0;     // s, regeneration latency (+inf for a zero input)
  bool metastable = false;
  double v_effective = 0;  // V, input plus realized noise
};

// Input-referred noise power exactly as the published expression is printed:
//   ((Vgs-Vth)/Vth) * [4kT*gamma/C_PQ + ((Vgs-Vth)/Vth) * kT/(2 C_PQ)]
// Kept as a budget cross-check only; the simulator uses the configured comp_noise.
inline double input_noise_power(double c_pq, double v_gs, double v_thn, double gamma, double temperature) {
  if (!(c_pq > 0) || !(v_thn > 0) || !(gamma > 0) || !(temperature > 0))
    throw DomainError("input_noise_power: operands must be positive");
  if (v_gs < v_thn) throw DomainError("input_noise_power: requires V_GS >= V_THN");
  const double kt = kBoltzmann * temperature;
  const double r = (v_gs - v_thn) / v_thn;
  return r * (4.0 * kt * gamma / c_pq + r * kt / (2.0 * c_pq));
}

// Dynamic power of a latch fired f_ck times per second.
inline double comparator_power(double f_ck, double c_pq, double c_xy, double v_dd) {
  return f_ck * (2.0 * c_pq + c_xy) * v_dd * v_dd;
}

inline double comparator_energy_per_decision(const AdcConfig& cfg) {
  return comparator_power(1.0, cfg.comp_c_pq, cfg.comp_c_xy, cfg.v_dd);
}

// Log-law regeneration latency for an input v, clamped at zero.
inline double regeneration_time(double v, double tau, double v_dd, double a_v) {
  const double mag = std::fabs(v);
  if (mag == 0.0) return std::numeric_limits<double>::infinity();
  return std::max(0.0, tau * std::log(v_dd / (a_v * mag)));
}

struct ComparatorModel {
  double tau_reg;
  double v_dd;
  double a_v;
  double noise_rms;

  static ComparatorModel from(const AdcConfig& cfg) {
    return {cfg.comp_c_xy / cfg.comp_gm5, cfg.v_dd, cfg.comp_av, cfg.comp_noise};
  }
};

// One comparison with t_available seconds to regenerate. A metastable latch resolves to a
// random bit. noise_scale multiplies the configured rms noise (0 disables it).
inline Decision decide(double v_diff, double t_available, const ComparatorModel& m, Rng& rng,
                       double noise_scale = 1.0) {
  if (!(t_available > 0)) throw PreconditionError("decide: t_available must be positive");
  Decision d;
  d.v_effective = v_diff + gaussian(rng, m.noise_rms * noise_scale);
  d.t_decide = regeneration_time(d.v_effective, m.tau_reg, m.v_dd, m.a_v);
  d.metastable = d.v_effective == 0.0 || d.t_decide > t_available;
  if (d.metastable) {
    std::bernoulli_distribution coin(0.5);
    d.bit = coin(rng) ? 1 : -1;
  } else {
    d.bit = d.v_effective > 0.0 ? 1 : -1;
  }
  return d;
}

}  // namespace sarsim
