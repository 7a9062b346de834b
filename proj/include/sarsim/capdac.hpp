#pragma once

// Differential capacitive DAC with common-mode-preserving switching.
//
// Every switched capacitor starts the conversion with its bottom plate at V_REF/2. After
// bit i is decided, capacitor i moves to ground on the side that must fall and to V_REF on
// the side that must rise, so the two comparator inputs move by equal and opposite amounts
// and each bottom plate switches exactly once, never back. The first comparison acts on the
// sampled value directly, hence B-1 switched capacitors per side.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "sarsim/charge_network.hpp"
#include "sarsim/config.hpp"
#include "sarsim/errors.hpp"
#include "sarsim/random.hpp"
#include "sarsim/track_and_hold.hpp"

namespace sarsim {

inline constexpr int kSideP = 0;
inline constexpr int kSideN = 1;

// One side of the array. Node 0 is the comparator top plate; the split topology adds node 1,
// the LSB sub-array node behind the attenuation capacitor.
struct SideArray {
  std::vector<double> caps;  // switched capacitors, MSB first (B-1 entries)
  std::vector<int> node;     // node of each switched capacitor
  std::vector<int> units;    // unit capacitors making up each switched capacitor
  double terminator = 0;     // never switched, sits on the last node
  int terminator_node = 0;
  double c_att = 0;
  std::array<double, 2> c_ground{};  // parasitic to ground per node
  int nodes = 1;

  // derived by finalize()
  std::vector<std::array<double, 2>> transfer;  // node voltage change per volt on each bottom plate
  double c_sampled = 0;                         // capacitance seen at the top plate
};

struct CapArray {
  Topology topology = Topology::binary;
  int bits = 0;
  double v_ref = 0;
  double unit = 0;  // nominal unit capacitor of the array
  std::array<SideArray, 2> side;

  int switched() const { return bits - 1; }

  // Sum of every physical capacitor on one side, parasitics excluded.
  double c_total(int s) const {
    const auto& a = side[static_cast<std::size_t>(s)];
    double c = a.terminator + a.c_att;
    for (double x : a.caps) c += x;
    return c;
  }
};

namespace detail {

inline void finalize(SideArray& a) {
  std::array<std::array<double, 2>, 2> k{};
  for (std::size_t j = 0; j < a.caps.size(); ++j) k[a.node[j]][a.node[j]] += a.caps[j];
  k[a.terminator_node][a.terminator_node] += a.terminator;
  for (int n = 0; n < a.nodes; ++n) k[n][n] += a.c_ground[n];
  std::array<std::array<double, 2>, 2> inv{};
  if (a.nodes == 1) {
    inv[0][0] = 1.0 / k[0][0];
    a.c_sampled = k[0][0];
  } else {
    k[0][0] += a.c_att;
    k[1][1] += a.c_att;
    k[0][1] = k[1][0] = -a.c_att;
    const double det = k[0][0] * k[1][1] - k[0][1] * k[1][0];
    inv = {{{k[1][1] / det, -k[0][1] / det}, {-k[1][0] / det, k[0][0] / det}}};
    a.c_sampled = k[0][0] - k[0][1] * k[1][0] / k[1][1];
  }
  a.transfer.resize(a.caps.size());
  for (std::size_t j = 0; j < a.caps.size(); ++j)
    for (int n = 0; n < 2; ++n) a.transfer[j][n] = n < a.nodes ? inv[n][a.node[j]] * a.caps[j] : 0.0;
}

// Draws `count` unit capacitors and returns their sum.
inline double draw_units(int count, double unit, double sigma, Rng& rng) {
  if (sigma == 0.0) return count * unit;
  std::normal_distribution<double> dist(0.0, sigma);
  double c = 0;
  for (int u = 0; u < count; ++u) c += unit * (1.0 + dist(rng));
  return c;
}

}  // namespace detail

// Nominal unit of the binary array: c_dac spread over 2^(B-1) units so that the ideal
// array reproduces the net full scale exactly. Never below the technology minimum c_unit.
inline double array_unit(const AdcConfig& cfg) { return cfg.c_dac / std::ldexp(1.0, cfg.bits - 1); }

inline constexpr int kMaxMismatchRetries = 100;

// Builds both sides with per-unit Gaussian mismatch: each unit is c*(1 + N(0, sigma)) and a
// bit capacitor is the sum of its units. Any non-positive capacitor triggers a redraw of the
// whole array, up to kMaxMismatchRetries times.
inline CapArray build_cap_array(const AdcConfig& cfg, Rng& rng, Topology topology, double mismatch) {
  if (mismatch < 0) throw ConfigError("dac_mismatch", "must be non-negative");
  const int b = cfg.bits;
  CapArray arr;
  arr.topology = topology;
  arr.bits = b;
  arr.v_ref = cfg.v_ref;
  arr.unit = array_unit(cfg);

  for (int attempt = 0; attempt < kMaxMismatchRetries; ++attempt) {
    bool ok = true;
    for (int s = 0; s < 2; ++s) {
      SideArray a;
      if (topology == Topology::binary) {
        a.nodes = 1;
        for (int i = 1; i <= b - 1; ++i) {
          const int n = 1 << (b - 1 - i);
          a.units.push_back(n);
          a.caps.push_back(detail::draw_units(n, arr.unit, mismatch, rng));
          a.node.push_back(0);
        }
        a.terminator = detail::draw_units(1, arr.unit, mismatch, rng);
        a.terminator_node = 0;
        a.c_ground = {cfg.c_p, 0.0};
      } else {
        const int lsb_bits = cfg.split_lsb_bits;
        const int msb_bits = b - 1 - lsb_bits;
        a.nodes = 2;
        for (int i = 1; i <= msb_bits; ++i) {
          const int n = 1 << (msb_bits - i);
          a.units.push_back(n);
          a.caps.push_back(detail::draw_units(n, arr.unit, mismatch, rng));
          a.node.push_back(0);
        }
        for (int i = 1; i <= lsb_bits; ++i) {
          const int n = 1 << (lsb_bits - i);
          a.units.push_back(n);
          a.caps.push_back(detail::draw_units(n, arr.unit, mismatch, rng));
          a.node.push_back(1);
        }
        a.terminator = detail::draw_units(1, arr.unit, mismatch, rng);
        a.terminator_node = 1;
        // series-matched bridge: C_att in series with the 2^L-unit LSB array equals one unit
        const double c_lsb = std::ldexp(1.0, lsb_bits);
        a.c_att = arr.unit * c_lsb / (c_lsb - 1.0);
        a.c_ground = {cfg.c_p, cfg.split_c_bridge_p};
      }
      for (double c : a.caps) ok = ok && c > 0.0;
      ok = ok && a.terminator > 0.0;
      detail::finalize(a);
      arr.side[static_cast<std::size_t>(s)] = std::move(a);
    }
    if (ok) return arr;
  }
  throw ConfigError("dac_mismatch", "could not draw a capacitor array with all capacitors positive");
}

inline CapArray build_cap_array(const AdcConfig& cfg, Rng& rng) {
  return build_cap_array(cfg, rng, cfg.dac_topology, cfg.dac_mismatch);
}

// Relative deviation of every realized switched capacitor from its nominal value.
inline std::vector<double> realized_deviation(const CapArray& arr, int s) {
  const auto& a = arr.side[static_cast<std::size_t>(s)];
  std::vector<double> out;
  for (std::size_t j = 0; j < a.caps.size(); ++j) out.push_back(a.caps[j] / (a.units[j] * arr.unit) - 1.0);
  return out;
}

// Differential correction applied after bit i (1-based, 1 <= i <= B-1). Each side moves by
// half of it, in opposite directions.
inline double step_voltage(int i, const CapArray& arr) {
  if (i < 1 || i > arr.switched()) throw PreconditionError("step_voltage: bit index out of range");
  const auto j = static_cast<std::size_t>(i - 1);
  return 0.5 * arr.v_ref * (arr.side[0].transfer[j][0] + arr.side[1].transfer[j][0]);
}

// Differential full scale realized by the array (twice the largest reachable correction).
inline double array_full_scale(const CapArray& arr) {
  double half = step_voltage(arr.switched(), arr);
  for (int i = 1; i <= arr.switched(); ++i) half += step_voltage(i, arr);
  return 2.0 * half;
}

inline double array_lsb(const CapArray& arr) { return array_full_scale(arr) / std::ldexp(1.0, arr.bits); }

// Switch on-resistances giving every bit the same r_on*C = t_clk_low / N. With
// dac_ron_literal the expression 1/(N * C * t_clk_low) is evaluated as printed instead; it
// is not dimensionally a resistance and exists for audits only.
inline std::vector<double> ron_schedule(const CapArray& arr, const AdcConfig& cfg) {
  if (!cfg.dac_ron.empty()) return cfg.dac_ron;
  if (!(cfg.t_clk_low > 0) || !(cfg.dac_settle_n > 0))
    throw ConfigError("t_clk_low", "switch sizing needs positive t_clk_low and dac_settle_n");
  std::vector<double> r;
  for (int u : arr.side[0].units) {
    const double c = u * arr.unit;
    r.push_back(cfg.dac_ron_literal ? 1.0 / (cfg.dac_settle_n * c * cfg.t_clk_low)
                                    : cfg.t_clk_low / (cfg.dac_settle_n * c));
  }
  return r;
}

// --- conversion-local DAC state ------------------------------------------------------

enum class Bottom : std::int8_t { ground = -1, mid = 0, ref = 1 };

struct DacState {
  std::array<double, 2> target{};  // fully settled plate voltages
  std::array<std::vector<Bottom>, 2> bottom;
  std::array<std::array<double, 2>, 2> c_on_ref{};  // [side][node]
  std::array<double, 2> common_mode_start{};
  double energy = 0;  // J drawn from V_REF so far
  double clock = 0;   // s since the start of the conversion

  struct Pending {
    double start;
    double amp_p;  // V still to travel at start time
    double amp_n;
    double tau;
  };
  std::vector<Pending> pending;

  // Plate voltage including incomplete settling of earlier events.
  double plate(int s) const {
    double v = target[static_cast<std::size_t>(s)];
    for (const auto& p : pending) {
      const double a = s == kSideP ? p.amp_p : p.amp_n;
      v -= a * std::exp(-(clock - p.start) / p.tau);
    }
    return v;
  }
  double differential() const { return plate(kSideP) - plate(kSideN); }
  double common_mode() const { return 0.5 * (plate(kSideP) + plate(kSideN)); }

  void advance(double dt) {
    if (!(dt >= 0)) throw PreconditionError("DacState::advance: negative time step");
    clock += dt;
  }
};

inline DacState reset_dac(const CapArray& arr, double v_p, double v_n) {
  DacState st;
  st.target = {v_p, v_n};
  for (auto& b : st.bottom) b.assign(static_cast<std::size_t>(arr.switched()), Bottom::mid);
  st.common_mode_start = {0.5 * (v_p + v_n), 0.0};
  return st;
}

struct SwitchEvent {
  double energy = 0;       // J drawn from V_REF by this event
  double delta_p = 0;      // V, settled plate moves
  double delta_n = 0;
  double residual = 0;     // V, differential error still unsettled after dt
};

// Switches bit i (1-based) for a decision of +1 (P above N) or -1, then lets the plates
// settle for dt through r_on (tau = r_on * C_i). tau <= 0 means instantaneous settling.
// Energy is the charge V_REF delivers to the plates it is connected to after the event.
inline SwitchEvent switch_bit(DacState& st, int i, int decision, double dt, const CapArray& arr, double r_on) {
  if (i < 1 || i > arr.switched()) throw PreconditionError("switch_bit: bit index out of range");
  if (decision != 1 && decision != -1) throw PreconditionError("switch_bit: decision must be +1 or -1");
  if (!(dt > 0)) throw PreconditionError("switch_bit: non-positive settling window (broken schedule)");
  const auto j = static_cast<std::size_t>(i - 1);
  if (st.bottom[0][j] != Bottom::mid) throw PreconditionError("switch_bit: bit already switched");

  SwitchEvent ev;
  std::array<double, 2> delta{};
  for (int s = 0; s < 2; ++s) {
    const auto si = static_cast<std::size_t>(s);
    const SideArray& a = arr.side[si];
    // P falls and N rises for a +1 decision
    const bool rise = (s == kSideP) == (decision < 0);
    const double db = rise ? 0.5 * arr.v_ref : -0.5 * arr.v_ref;
    st.bottom[si][j] = rise ? Bottom::ref : Bottom::ground;
    if (rise) st.c_on_ref[si][static_cast<std::size_t>(a.node[j])] += a.caps[j];
    double q = rise ? a.caps[j] * db : 0.0;
    for (int n = 0; n < a.nodes; ++n) q -= st.c_on_ref[si][static_cast<std::size_t>(n)] * a.transfer[j][n] * db;
    ev.energy += arr.v_ref * q;
    delta[si] = a.transfer[j][0] * db;
    st.target[si] += delta[si];
  }
  ev.delta_p = delta[0];
  ev.delta_n = delta[1];
  st.energy += ev.energy;

  const double c_i = arr.side[0].units[j] * arr.unit;
  const double tau = r_on * c_i;
  if (tau > 0) st.pending.push_back({st.clock, delta[0], delta[1], tau});
  st.advance(dt);
  ev.residual = tau > 0 ? -(delta[0] - delta[1]) * std::exp(-dt / tau) : 0.0;
  return ev;
}

// --- static transfer -----------------------------------------------------------------

// Code transition levels T_1..T_{2^B-1} (differential input volts) of a SAR using this
// array: between codes k-1 and k the first differing decision is bit j (the lowest set bit
// of k), whose threshold is the correction accumulated by the bits above it.
inline std::vector<double> transition_levels(const CapArray& arr) {
  const int b = arr.bits;
  std::vector<double> steps(static_cast<std::size_t>(b));
  for (int i = 1; i < b; ++i) steps[static_cast<std::size_t>(i - 1)] = step_voltage(i, arr);
  const int n = 1 << b;
  std::vector<double> t(static_cast<std::size_t>(n - 1));
  for (int k = 1; k < n; ++k) {
    int j = b;  // 1-based bit position where k-1 and k first differ
    while (!((k >> (b - j)) & 1)) --j;
    double level = 0;
    for (int i = 1; i < j; ++i) level += (((k >> (b - i)) & 1) ? 1.0 : -1.0) * steps[static_cast<std::size_t>(i - 1)];
    t[static_cast<std::size_t>(k - 1)] = level;
  }
  return t;
}

struct StaticLinearity {
  std::vector<double> inl;  // LSB, endpoint fit, per transition
  std::vector<double> dnl;  // LSB, per inner code
  double inl_max = 0;
  double dnl_max = 0;
};

// INL/DNL from transition levels with an endpoint-fit straight line.
inline StaticLinearity static_linearity(const CapArray& arr) {
  const auto t = transition_levels(arr);
  const std::size_t m = t.size();
  const double lsb = (t.back() - t.front()) / static_cast<double>(m - 1);
  StaticLinearity r;
  for (std::size_t k = 0; k < m; ++k) {
    const double ideal = t.front() + lsb * static_cast<double>(k);
    r.inl.push_back((t[k] - ideal) / lsb);
    r.inl_max = std::max(r.inl_max, std::fabs(r.inl.back()));
  }
  for (std::size_t k = 1; k < m; ++k) {
    r.dnl.push_back((t[k] - t[k - 1]) / lsb - 1.0);
    r.dnl_max = std::max(r.dnl_max, std::fabs(r.dnl.back()));
  }
  return r;
}

// --- switching-energy study ----------------------------------------------------------

namespace detail {

inline std::vector<int> code_decisions(int code, int bits) {
  std::vector<int> d;
  for (int i = 1; i <= bits; ++i) d.push_back(((code >> (bits - i)) & 1) ? 1 : -1);
  return d;
}

// Charge network of one side of a CapArray with all bottoms at V_REF/2.
struct SideNetwork {
  ChargeNetwork net{1};
  std::vector<int> cap;
  int gnd = 0, ref = 0, mid = 0;
};

inline SideNetwork side_network(const SideArray& a, double v_ref) {
  SideNetwork sn{ChargeNetwork(a.nodes), {}, 0, 0, 0};
  sn.ref = sn.net.add_source(v_ref);
  sn.mid = sn.net.add_source(0.5 * v_ref, false);
  using CN = ChargeNetwork;
  for (std::size_t j = 0; j < a.caps.size(); ++j)
    sn.cap.push_back(sn.net.add_cap(a.caps[j], CN::node(a.node[j]), CN::source(sn.mid)));
  sn.net.add_cap(a.terminator, CN::node(a.terminator_node), CN::source(sn.mid));
  for (int n = 0; n < a.nodes; ++n)
    if (a.c_ground[static_cast<std::size_t>(n)] > 0) sn.net.add_cap(a.c_ground[static_cast<std::size_t>(n)], CN::node(n), CN::source(0));
  if (a.nodes == 2) sn.net.add_cap(a.c_att, CN::node(0), CN::node(1));
  return sn;
}

// Single-node array of the given capacitors (bottoms at ground) plus a top-plate parasitic.
struct PlainNetwork {
  ChargeNetwork net{1};
  std::vector<int> cap;
  int ref = 0;
};

inline PlainNetwork plain_network(const std::vector<double>& caps, double c_p, double v_ref) {
  PlainNetwork pn;
  pn.ref = pn.net.add_source(v_ref);
  for (double c : caps) pn.cap.push_back(pn.net.add_cap(c, ChargeNetwork::node(0), ChargeNetwork::source(0)));
  if (c_p > 0) pn.net.add_cap(c_p, ChargeNetwork::node(0), ChargeNetwork::source(0));
  return pn;
}

}  // namespace detail

// Reference energy of one conversion ending in `code` under common-mode-preserving
// switching, computed by brute-force charge redistribution.
inline double cm_switching_energy(const CapArray& arr, int code) {
  const auto d = detail::code_decisions(code, arr.bits);
  double e = 0;
  for (int s = 0; s < 2; ++s) {
    auto sn = detail::side_network(arr.side[static_cast<std::size_t>(s)], arr.v_ref);
    for (int i = 0; i < arr.switched(); ++i) {
      const bool rise = (s == kSideP) == (d[static_cast<std::size_t>(i)] < 0);
      e += sn.net.apply({{sn.cap[static_cast<std::size_t>(i)], rise ? sn.ref : 0}}).energy;
    }
  }
  return e;
}

// Conventional trial-and-reset switching on a 2^B-unit binary array per side (unit
// c_total/2^B). Each side tries the MSB, then for every decision either keeps the trial or
// resets it while trying the next bit. The N side runs on the complementary decisions.
inline double conventional_switching_energy(int bits, double c_total, double c_p, double v_ref, int code) {
  const double unit = c_total / std::ldexp(1.0, bits);
  std::vector<double> caps;
  for (int i = 0; i < bits; ++i) caps.push_back(unit * std::ldexp(1.0, bits - 1 - i));
  caps.push_back(unit);
  const auto d = detail::code_decisions(code, bits);
  double e = 0;
  for (int s = 0; s < 2; ++s) {
    auto pn = detail::plain_network(caps, c_p, v_ref);
    e += pn.net.apply({{pn.cap[0], pn.ref}}).energy;
    for (int i = 0; i < bits - 1; ++i) {
      const bool keep = (s == kSideP) ? d[static_cast<std::size_t>(i)] > 0 : d[static_cast<std::size_t>(i)] < 0;
      std::vector<ChargeNetwork::Move> mv;
      if (!keep) mv.push_back({pn.cap[static_cast<std::size_t>(i)], 0});
      mv.push_back({pn.cap[static_cast<std::size_t>(i + 1)], pn.ref});
      e += pn.net.apply(mv).energy;
    }
  }
  return e;
}

// Split-capacitor switching: every capacitor of the conventional array is built as two
// equal halves and the first half of every one starts at V_REF, which is the MSB trial.
// After bit i a kept trial raises the second half of capacitor i, a rejected one drops its
// first half; no charge is ever dumped and recharged.
inline double split_capacitor_switching_energy(int bits, double c_total, double c_p, double v_ref, int code) {
  const double unit = c_total / std::ldexp(1.0, bits);
  std::vector<double> caps;
  for (int i = 0; i <= bits; ++i) {
    const double c = unit * (i < bits ? std::ldexp(1.0, bits - 1 - i) : 1.0);
    caps.push_back(0.5 * c);
    caps.push_back(0.5 * c);
  }
  const auto d = detail::code_decisions(code, bits);
  double e = 0;
  for (int s = 0; s < 2; ++s) {
    auto pn = detail::plain_network(caps, c_p, v_ref);
    std::vector<ChargeNetwork::Move> first;
    for (int i = 0; i <= bits; ++i) first.push_back({pn.cap[static_cast<std::size_t>(2 * i)], pn.ref});
    e += pn.net.apply(first).energy;
    for (int i = 0; i < bits - 1; ++i) {
      const bool keep = (s == kSideP) ? d[static_cast<std::size_t>(i)] > 0 : d[static_cast<std::size_t>(i)] < 0;
      const auto k = static_cast<std::size_t>(2 * i + (keep ? 1 : 0));
      e += pn.net.apply({{pn.cap[k], keep ? pn.ref : 0}}).energy;
    }
  }
  return e;
}

struct TopologyRow {
  std::string topology;
  double c_total = 0;     // F per side, physical capacitors
  double c_sampled = 0;   // F per side, seen by the sampling switch
  double e_avg = 0;       // J per conversion, averaged over all codes
  double sigma_ktc = 0;   // V rms, differential sampled noise
  double inl_max = 0;     // LSB
};

struct TradeReport {
  std::vector<TopologyRow> rows;
  // split-capacitor vs conventional binary, equal capacitance, no parasitics
  double energy_saving_split = 0;
  // bridged split vs binary, both common-mode preserving, as configured
  double energy_saving_bridged = 0;
  double capacitance_reduction = 0;  // sampled DAC capacitance (no c_p) binary / bridged split
  double noise_ratio = 0;            // sigma_ktc bridged split / binary

  const TopologyRow& row(std::string_view name) const {
    for (const auto& r : rows)
      if (r.topology == name) return r;
    throw PreconditionError("TradeReport: no row " + std::string(name));
  }
};

// Averages switching energy over all 2^B output codes for each topology and reports
// capacitance, sampled-noise and static-linearity figures. Both arrays are drawn from the
// same mismatch stream so that linearity differences come from the topology alone.
inline TradeReport compare_topologies(const AdcConfig& cfg, std::uint64_t seed) {
  TradeReport rep;
  const double kt = kBoltzmann * cfg.temperature;
  const int codes = 1 << cfg.bits;

  auto rng_b = make_rng(seed, Stream::mismatch, 0);
  auto rng_s = make_rng(seed, Stream::mismatch, 0);
  const CapArray binary = build_cap_array(cfg, rng_b, Topology::binary, cfg.dac_mismatch);
  const CapArray split = build_cap_array(cfg, rng_s, Topology::split, cfg.dac_mismatch);

  const auto cm_row = [&](const CapArray& arr, std::string name) {
    TopologyRow r;
    r.topology = std::move(name);
    r.c_total = arr.c_total(kSideP);
    r.c_sampled = arr.side[0].c_sampled;
    for (int c = 0; c < codes; ++c) r.e_avg += cm_switching_energy(arr, c);
    r.e_avg /= codes;
    r.sigma_ktc = std::sqrt(kt / arr.side[0].c_sampled + kt / arr.side[1].c_sampled);
    r.inl_max = static_linearity(arr).inl_max;
    return r;
  };
  const auto plain_row = [&](std::string name, auto energy_fn) {
    TopologyRow r;
    r.topology = std::move(name);
    r.c_total = cfg.c_dac;
    r.c_sampled = cfg.c_dac;
    for (int c = 0; c < codes; ++c) r.e_avg += energy_fn(cfg.bits, cfg.c_dac, 0.0, cfg.v_ref, c);
    r.e_avg /= codes;
    r.sigma_ktc = std::sqrt(2.0 * kt / cfg.c_dac);
    r.inl_max = 0.0;  // ideal arrays
    return r;
  };

  rep.rows.push_back(cm_row(binary, "binary_cm"));
  rep.rows.push_back(cm_row(split, "split_bridged_cm"));
  rep.rows.push_back(plain_row("binary_conventional", conventional_switching_energy));
  rep.rows.push_back(plain_row("split_capacitor", split_capacitor_switching_energy));

  rep.energy_saving_split = 1.0 - rep.row("split_capacitor").e_avg / rep.row("binary_conventional").e_avg;
  rep.energy_saving_bridged = 1.0 - rep.row("split_bridged_cm").e_avg / rep.row("binary_cm").e_avg;
  rep.capacitance_reduction = (binary.side[0].c_sampled - binary.side[0].c_ground[0]) /
                              (split.side[0].c_sampled - split.side[0].c_ground[0]);
  rep.noise_ratio = rep.row("split_bridged_cm").sigma_ktc / rep.row("binary_cm").sigma_ktc;
  return rep;
}

}  // namespace sarsim
