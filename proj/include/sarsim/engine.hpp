#pragma once

// Full conversions: sample, B asynchronous bit cycles with greedy time allocation, energy
// accounting and batch conversion of waveforms. Also the analytic noise budget and the
// per-block power report.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include "sarsim/analysis.hpp"
#include "sarsim/capdac.hpp"
#include "sarsim/comparator.hpp"
#include "sarsim/config.hpp"
#include "sarsim/errors.hpp"
#include "sarsim/random.hpp"
#include "sarsim/track_and_hold.hpp"

namespace sarsim {

struct EngineOptions {
  bool sampling_noise = true;    // kT/C on the sampled value
  bool comparator_noise = true;
  bool ideal_tracking = false;   // no settling error, hold step or TH distortion
  bool ideal_settling = false;   // DAC steps settle instantly
  bool unlimited_time = false;   // no conversion window
  bool ideal_dac = false;        // ignore dac_mismatch

  static EngineOptions ideal() { return {false, false, true, true, true, true}; }
};

// The configuration with every nonideality zeroed that is set in the parameter file.
inline AdcConfig ideal_config(AdcConfig cfg) {
  cfg.comp_noise = 0;
  cfg.dac_mismatch = 0;
  cfg.th_alpha = 0;
  cfg.th_beta = 0;
  cfg.th_pedestal = 0;
  cfg.th_inject_k3 = 0;
  return cfg;
}

struct BitRecord {
  Decision decision;
  bool resolved = false;        // false when the window ran out before this bit
  double allocated = 0;         // s, comparator + logic delay + DAC fix time
  double settle_residual = 0;   // V, differential DAC error still unsettled at the comparison
  double e_comparator = 0;      // J
  double e_dac = 0;             // J
  double e_logic = 0;           // J
};

struct ConversionRecord {
  double v_diff = 0;            // V, input at the sampling instant
  HeldSample held;
  std::vector<BitRecord> bits;
  int code = 0;
  double total_time = 0;        // s, tracking included
  int metastable_bits = 0;
  bool timing_violation = false;
  double e_track = 0;           // J
  double cm_drift = 0;          // V, largest comparator common-mode excursion

  double bit_energy() const {
    double e = 0;
    for (const auto& b : bits) e += b.e_comparator + b.e_dac + b.e_logic;
    return e;
  }
  double energy() const { return bit_energy() + e_track; }
};

namespace flags {
inline constexpr std::uint8_t metastable = 1;
inline constexpr std::uint8_t timing_violation = 2;
}  // namespace flags

inline std::uint8_t record_flags(const ConversionRecord& r) {
  return static_cast<std::uint8_t>((r.metastable_bits ? flags::metastable : 0) |
                                   (r.timing_violation ? flags::timing_violation : 0));
}

class Converter {
 public:
  // Draws the capacitor arrays from the mismatch stream of `seed`.
  explicit Converter(const AdcConfig& cfg, std::uint64_t seed = 0, EngineOptions opt = {})
      : cfg_(cfg), opt_(opt), derived_(derived_constants(cfg)) {
    validate(cfg_);
    auto rng = make_rng(seed, Stream::mismatch, 0);
    arr_ = build_cap_array(cfg_, rng, cfg_.dac_topology, opt_.ideal_dac ? 0.0 : cfg_.dac_mismatch);
    init();
  }

  Converter(const AdcConfig& cfg, CapArray arr, EngineOptions opt = {})
      : cfg_(cfg), opt_(opt), derived_(derived_constants(cfg)), arr_(std::move(arr)) {
    validate(cfg_);
    init();
  }

  const AdcConfig& config() const { return cfg_; }
  const EngineOptions& options() const { return opt_; }
  const CapArray& array() const { return arr_; }
  const DerivedConstants& derived() const { return derived_; }
  const std::vector<double>& ron() const { return ron_; }

  // Conversion window after tracking.
  double window() const { return 1.0 / cfg_.f_s - cfg_.t_track; }

  HeldSample track(double v_p, double v_n, double prev_p, double prev_n, Rng& rng) const {
    check_input(v_p, v_n);
    TrackOptions to;
    to.noise = opt_.sampling_noise;
    to.ideal = opt_.ideal_tracking;
    // both sides are assumed equal for the settling time constant
    return sample(v_p, v_n, prev_p, prev_n, arr_.side[0].c_sampled, cfg_, rng, to);
  }

  // Bit cycling on an already held sample.
  ConversionRecord resolve(const HeldSample& held, double v_diff, Rng& rng) const {
    const int b = cfg_.bits;
    ConversionRecord rec;
    rec.v_diff = v_diff;
    rec.held = held;
    rec.e_track = cfg_.e_track;
    rec.bits.resize(static_cast<std::size_t>(b));

    DacState st = reset_dac(arr_, held.v_p, held.v_n);
    const double inf = std::numeric_limits<double>::infinity();
    double remaining = opt_.unlimited_time ? inf : window();
    double elapsed = 0;
    int code = 0;
    for (int j = 1; j <= b; ++j) {
      BitRecord& br = rec.bits[static_cast<std::size_t>(j - 1)];
      const double overhead = cfg_.t_delay + (j < b ? cfg_.t_fix : 0.0);
      const double avail = remaining - overhead - reserve_[static_cast<std::size_t>(j)];
      if (!(avail > 0)) {
        // window exhausted: mid-scale completion of the unresolved bits
        rec.timing_violation = true;
        code |= 1 << (b - j);
        break;
      }
      const double v = st.differential();
      br.settle_residual = v - (st.target[kSideP] - st.target[kSideN]);
      rec.cm_drift = std::max(rec.cm_drift, std::fabs(st.common_mode() - st.common_mode_start[0]));
      const double scale =
          opt_.comparator_noise ? 1.0 + cfg_.comp_cm_slope * std::fabs(st.common_mode() - st.common_mode_start[0]) : 0.0;
      br.decision = decide(v, avail, comp_, rng, scale);
      br.resolved = true;
      double used = br.decision.metastable ? avail : br.decision.t_decide;
      if (!std::isfinite(used)) used = 0;  // unlimited window, zero input
      if (br.decision.metastable) ++rec.metastable_bits;
      br.e_comparator = e_comp_;
      br.e_logic = cfg_.e_logic;
      st.advance(used + cfg_.t_delay);
      if (j < b) {
        const double r = opt_.ideal_settling ? 0.0 : ron_[static_cast<std::size_t>(j - 1)];
        br.e_dac = switch_bit(st, j, br.decision.bit, cfg_.t_fix, arr_, r).energy;
      }
      br.allocated = used + overhead;
      remaining -= br.allocated;
      elapsed += br.allocated;
      if (br.decision.bit > 0) code |= 1 << (b - j);
    }
    rec.code = code;
    rec.total_time = cfg_.t_track + elapsed;
    return rec;
  }

  // One conversion starting from previously held plate voltages (v_cm by default).
  ConversionRecord convert(double v_p, double v_n, Rng& rng, double prev_p = -1, double prev_n = -1) const {
    if (prev_p < 0) prev_p = cfg_.v_cm;
    if (prev_n < 0) prev_n = cfg_.v_cm;
    return resolve(track(v_p, v_n, prev_p, prev_n, rng), v_p - v_n, rng);
  }

 private:
  void init() {
    ron_ = ron_schedule(arr_, cfg_);
    comp_ = ComparatorModel::from(cfg_);
    e_comp_ = comparator_energy_per_decision(cfg_);
    // reserve_[j]: time kept back for bits j+1..B when bit j is compared
    const int b = cfg_.bits;
    const double easy_share = derived_.t_easy / (b - 1);
    reserve_.assign(static_cast<std::size_t>(b + 1), 0.0);
    for (int j = b - 1; j >= 0; --j) {
      const int k = j + 1;
      reserve_[static_cast<std::size_t>(j)] =
          reserve_[static_cast<std::size_t>(k)] + easy_share + cfg_.t_delay + (k < b ? cfg_.t_fix : 0.0);
    }
  }

  void check_input(double v_p, double v_n) const {
    const auto ok = [&](double v) { return v >= 0.0 && v <= cfg_.v_dd; };
    if (!ok(v_p) || !ok(v_n))
      throw PreconditionError("convert: input outside [0, V_DD]: " + std::to_string(v_p) + ", " + std::to_string(v_n));
  }

  AdcConfig cfg_;
  EngineOptions opt_;
  DerivedConstants derived_;
  CapArray arr_;
  std::vector<double> ron_;
  ComparatorModel comp_{};
  double e_comp_ = 0;
  std::vector<double> reserve_;
};

// --- batch conversion ------------------------------------------------------------------

struct BlockEnergy {
  double comparator = 0;
  double dac = 0;
  double logic = 0;
  double track = 0;

  double total() const { return comparator + dac + logic + track; }
};

struct WaveformResult {
  std::vector<int> codes;
  std::vector<std::uint8_t> flags;
  std::vector<ConversionRecord> records;  // filled only on request
  std::size_t metastable_conversions = 0;
  std::size_t metastable_bits = 0;
  std::size_t violations = 0;
  BlockEnergy energy;  // summed over the record
  double f_s = 0;

  std::size_t size() const { return codes.size(); }
  double mean_power() const { return codes.empty() ? 0.0 : energy.total() / static_cast<double>(codes.size()) * f_s; }
};

// Converts every sample. Tracking runs in order (each sample starts from the previous held
// value, the first from the last input, as for a periodic record); bit cycling is spread
// over `workers` threads. Random streams are derived from (seed, sample index), so the
// output does not depend on the worker count.
inline WaveformResult convert_waveform(const Converter& conv, const std::vector<DifferentialSample>& in,
                                       std::uint64_t seed, unsigned workers = 1, bool keep_records = false) {
  if (in.empty()) throw PreconditionError("convert_waveform: empty input");
  const std::size_t n = in.size();
  std::vector<HeldSample> held(n);
  double prev_p = in.back().v_p, prev_n = in.back().v_n;
  for (std::size_t k = 0; k < n; ++k) {
    auto rng = make_rng(seed, Stream::track_and_hold, k);
    held[k] = conv.track(in[k].v_p, in[k].v_n, prev_p, prev_n, rng);
    prev_p = held[k].v_p;
    prev_n = held[k].v_n;
  }

  WaveformResult out;
  out.f_s = conv.config().f_s;
  out.codes.resize(n);
  out.flags.resize(n);
  std::vector<BlockEnergy> e(n);
  std::vector<int> meta(n, 0);
  if (keep_records) out.records.resize(n);

  const auto work = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t k = lo; k < hi; ++k) {
      auto rng = make_rng(seed, Stream::comparator, k);
      auto rec = conv.resolve(held[k], in[k].differential(), rng);
      out.codes[k] = rec.code;
      out.flags[k] = record_flags(rec);
      meta[k] = rec.metastable_bits;
      for (const auto& b : rec.bits) {
        e[k].comparator += b.e_comparator;
        e[k].dac += b.e_dac;
        e[k].logic += b.e_logic;
      }
      e[k].track = rec.e_track;
      if (keep_records) out.records[k] = std::move(rec);
    }
  };
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(n)));
  if (workers == 1) {
    work(0, n);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (n + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::size_t lo = std::min(n, w * chunk), hi = std::min(n, lo + chunk);
      pool.emplace_back(work, lo, hi);
    }
    for (auto& t : pool) t.join();
  }

  for (std::size_t k = 0; k < n; ++k) {
    out.energy.comparator += e[k].comparator;
    out.energy.dac += e[k].dac;
    out.energy.logic += e[k].logic;
    out.energy.track += e[k].track;
    if (meta[k]) ++out.metastable_conversions;
    out.metastable_bits += static_cast<std::size_t>(meta[k]);
    if (out.flags[k] & flags::timing_violation) ++out.violations;
  }
  return out;
}

// --- power -----------------------------------------------------------------------------

struct BlockPower {
  std::string block;
  double power = 0;     // W
  double fraction = 0;
};

struct PowerReport {
  std::vector<BlockPower> blocks;  // comparator, dac, logic, track_and_hold
  double total = 0;                // W, sum of the blocks
  double f_s = 0;
  std::size_t conversions = 0;
};

// Mean power per block over a completed batch. Reference charge is charged to the DAC.
inline PowerReport power_report(const WaveformResult& r) {
  if (r.codes.empty()) throw PreconditionError("power_report: empty batch");
  PowerReport p;
  p.f_s = r.f_s;
  p.conversions = r.codes.size();
  const double scale = r.f_s / static_cast<double>(r.codes.size());
  p.blocks = {{"comparator", r.energy.comparator * scale, 0},
              {"dac", r.energy.dac * scale, 0},
              {"logic", r.energy.logic * scale, 0},
              {"track_and_hold", r.energy.track * scale, 0}};
  for (const auto& b : p.blocks) p.total += b.power;
  for (auto& b : p.blocks) b.fraction = p.total > 0 ? b.power / p.total : 0.0;
  return p;
}

// --- noise budget ----------------------------------------------------------------------

struct NoiseTerm {
  std::string name;
  double power = 0;  // V^2, differential input referred
};

struct NoiseBudget {
  std::vector<NoiseTerm> terms;  // comparator, sampling, quantization, th_distortion
  double total = 0;              // V^2
  double rss = 0;                // V
  double signal_power = 0;       // V^2
  double target_sndr_db = 0;
  double allowed = 0;            // V^2, P_sig / 10^(SNDR/10)
  double slack = 0;              // V^2, allowed - total; negative means over budget
  double predicted_sndr_db = 0;  // 10 log10(P_sig / total)

  double term(std::string_view name) const {
    for (const auto& t : terms)
      if (t.name == name) return t.power;
    throw PreconditionError("NoiseBudget: no term " + std::string(name));
  }
};

// Distortion the track-and-hold adds to a coherent tone: power in every non-DC,
// non-signal bin of the noiseless held differential voltage.
inline double th_distortion_power(const AdcConfig& cfg, int n, int bin, double amplitude) {
  const Converter conv(cfg, 0, [] {
    EngineOptions o;
    o.sampling_noise = false;
    o.ideal_dac = true;
    return o;
  }());
  const auto tone = gen_coherent_tone(n, bin, amplitude, cfg.v_cm);
  std::vector<double> x(tone.size());
  double prev_p = tone.back().v_p, prev_n = tone.back().v_n;
  Rng unused = make_rng(0, Stream::track_and_hold, 0);
  for (std::size_t k = 0; k < tone.size(); ++k) {
    const auto h = conv.track(tone[k].v_p, tone[k].v_n, prev_p, prev_n, unused);
    prev_p = h.v_p;
    prev_n = h.v_n;
    x[k] = h.differential();
  }
  const auto spec = power_spectrum(x);
  double p = 0;
  for (std::size_t k = 1; k < spec.size(); ++k)
    if (static_cast<int>(k) != bin) p += spec[k];
  return p;
}

// Sum of the noise terms against the power allowed by a target SNDR. Terms disabled in
// `opt` are zero, so a fully ideal budget is quantization only.
inline NoiseBudget noise_budget(const AdcConfig& cfg, double target_sndr_db, double signal_power,
                                double th_power = 0, const EngineOptions& opt = {}) {
  if (!(target_sndr_db > 0)) throw PreconditionError("noise_budget: target SNDR must be positive");
  if (!(signal_power > 0)) throw PreconditionError("noise_budget: signal power must be positive");
  const auto d = derived_constants(cfg);
  NoiseBudget nb;
  nb.terms = {{"comparator", opt.comparator_noise ? cfg.comp_noise * cfg.comp_noise : 0.0},
              {"sampling", opt.sampling_noise ? 2.0 * d.kt / cfg.c_dac : 0.0},
              {"quantization", d.lsb * d.lsb / 12.0},
              {"th_distortion", opt.ideal_tracking ? 0.0 : th_power}};
  for (const auto& t : nb.terms) nb.total += t.power;
  nb.rss = std::sqrt(nb.total);
  nb.signal_power = signal_power;
  nb.target_sndr_db = target_sndr_db;
  nb.allowed = signal_power / std::pow(10.0, target_sndr_db / 10.0);
  nb.slack = nb.allowed - nb.total;
  nb.predicted_sndr_db = 10.0 * std::log10(signal_power / nb.total);
  return nb;
}

}  // namespace sarsim
