#pragma once

// Converter parameter set: schema, validation, loading and serialization.
//
// The configuration document is either a list of `key = value unit` lines (with `#`
// comments) or a JSON object mapping the same keys to numbers (SI base units) or strings
// carrying a unit ("2.5 fF"). Every numeric key has a fixed physical dimension and an
// accepted range; a value outside the range is almost always a missing or wrong SI prefix
// (farads vs femtofarads), so range violations are reported with the bounds.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "sarsim/errors.hpp"

namespace sarsim {

inline constexpr double kBoltzmann = 1.380649e-23;  // J/K

enum class Topology { binary, split };

inline std::string_view to_string(Topology t) { return t == Topology::binary ? "binary" : "split"; }

struct AdcConfig {
  // converter
  int bits = 10;
  double v_dd = 0;    // V
  double v_ref = 0;   // V, full scale is 2 * v_ref
  double f_s = 0;     // Hz
  double c_unit = 0;  // F, minimum technology unit capacitor
  double c_dac = 0;   // F, per-side DAC capacitance
  double c_p = 0;     // F, top-plate parasitic incl. comparator input

  // comparator (StrongARM latch)
  double comp_c_pq = 0;      // F
  double comp_c_xy = 0;      // F
  double comp_gm5 = 0;       // S
  double comp_av = 0;        // pre-regeneration gain
  double comp_noise = 0;     // V rms, operative input-referred noise
  double v_cm = 0;           // V
  double comp_gamma = 0;     // thermal noise factor
  double comp_vgs = 0;       // V
  double comp_vthn = 0;      // V
  double comp_cm_slope = 0;  // 1/V, relative noise increase per volt of CM drift

  // timing
  double t_track = 0;    // s
  double t_delay = 0;    // s, logic delay per bit
  double t_fix = 0;      // s, fixed per-bit DAC settle + clock overhead
  double t_clk_low = 0;  // s, comparator clock off time used to size DAC switches
  double p_meta = 0;
  std::optional<double> t_easy;  // s, overrides 39 tau_reg

  // track and hold
  double th_ron0 = 0;       // Ohm
  double th_alpha = 0;      // 1/V
  double th_beta = 0;       // 1/V^2
  double th_pedestal = 0;   // V, constant hold step
  double th_inject_k3 = 0;  // 1/V^2, cubic signal-dependent hold step

  // capacitive DAC
  double dac_mismatch = 0;  // relative sigma of one unit capacitor
  Topology dac_topology = Topology::binary;
  std::vector<double> dac_ron;  // Ohm per switched bit; empty means sized automatically
  double dac_settle_n = 0;      // settling time constants per t_clk_low
  bool dac_ron_literal = false;
  int split_lsb_bits = 4;
  double split_c_bridge_p = 0;  // F, parasitic on the attenuation node

  // energy
  double e_logic = 0;  // J per bit cycle
  double e_track = 0;  // J per sample, sampling switch and bootstrap driver

  double temperature = 300;  // K

  bool operator==(const AdcConfig&) const = default;
};

struct DerivedConstants {
  double v_fs;      // 2 * v_ref
  double v_fs_net;  // after parasitic attenuation
  double lsb;       // v_fs_net / 2^B
  double tau_reg;   // C_XY / g_m5
  double t_easy;    // total easy-comparison regeneration time
  double kt;        // J
};

// Full scale after charge sharing with the top-plate parasitic.
inline double net_full_scale(double v_fs, double c_dac, double c_p) {
  return v_fs * c_dac / (c_dac + c_p);
}

// Regeneration time of all comparisons but the hardest one, for the 10-bit converter.
inline constexpr double kEasyTauCount10Bit = 39.0;

inline DerivedConstants derived_constants(const AdcConfig& cfg) {
  DerivedConstants d{};
  d.v_fs = 2.0 * cfg.v_ref;
  d.v_fs_net = net_full_scale(d.v_fs, cfg.c_dac, cfg.c_p);
  d.lsb = d.v_fs_net / std::ldexp(1.0, cfg.bits);
  d.tau_reg = cfg.comp_c_xy / cfg.comp_gm5;
  d.t_easy = cfg.t_easy ? *cfg.t_easy : kEasyTauCount10Bit * d.tau_reg;
  d.kt = kBoltzmann * cfg.temperature;
  return d;
}

namespace detail {

enum class KeyKind { real, optional_real, integer, topology, ron_list, boolean };

struct KeySpec {
  std::string_view name;
  KeyKind kind;
  std::string_view unit;  // SI base unit; "" for dimensionless
  double lo;
  double hi;
  bool required;
  double AdcConfig::*real = nullptr;
  int AdcConfig::*integer = nullptr;
};

// Ranges are generous for physical designs but reject values off by a prefix factor.
inline const std::vector<KeySpec>& schema() {
  using K = KeyKind;
  static const std::vector<KeySpec> keys = {
      {"bits", K::integer, "", 2, 24, true, nullptr, &AdcConfig::bits},
      {"v_dd", K::real, "V", 0.1, 10, true, &AdcConfig::v_dd},
      {"v_ref", K::real, "V", 0.01, 10, true, &AdcConfig::v_ref},
      {"f_s", K::real, "Hz", 1e3, 1e11, true, &AdcConfig::f_s},
      {"c_unit", K::real, "F", 1e-17, 1e-12, true, &AdcConfig::c_unit},
      {"c_dac", K::real, "F", 1e-16, 1e-8, true, &AdcConfig::c_dac},
      {"c_p", K::real, "F", 0, 1e-9, true, &AdcConfig::c_p},
      {"comp_c_pq", K::real, "F", 1e-17, 1e-11, true, &AdcConfig::comp_c_pq},
      {"comp_c_xy", K::real, "F", 1e-17, 1e-11, true, &AdcConfig::comp_c_xy},
      {"comp_gm5", K::real, "S", 1e-7, 10, true, &AdcConfig::comp_gm5},
      {"comp_av", K::real, "", 1e-3, 1e4, true, &AdcConfig::comp_av},
      {"comp_noise", K::real, "V", 0, 0.1, true, &AdcConfig::comp_noise},
      {"v_cm", K::real, "V", 0, 10, true, &AdcConfig::v_cm},
      {"comp_gamma", K::real, "", 1e-3, 10, true, &AdcConfig::comp_gamma},
      {"comp_vgs", K::real, "V", 1e-3, 10, true, &AdcConfig::comp_vgs},
      {"comp_vthn", K::real, "V", 1e-3, 10, true, &AdcConfig::comp_vthn},
      {"comp_cm_slope", K::real, "/V", 0, 1e3, false, &AdcConfig::comp_cm_slope},
      {"t_track", K::real, "s", 1e-14, 1e-2, true, &AdcConfig::t_track},
      {"t_delay", K::real, "s", 1e-15, 1e-2, true, &AdcConfig::t_delay},
      {"t_fix", K::real, "s", 1e-15, 1e-2, true, &AdcConfig::t_fix},
      {"t_clk_low", K::real, "s", 1e-15, 1e-2, true, &AdcConfig::t_clk_low},
      {"p_meta", K::real, "", 0, 1, true, &AdcConfig::p_meta},
      {"t_easy", K::optional_real, "s", 1e-15, 1e-2, false},
      {"th_ron0", K::real, "Ohm", 1e-3, 1e7, true, &AdcConfig::th_ron0},
      {"th_alpha", K::real, "/V", -100, 100, true, &AdcConfig::th_alpha},
      {"th_beta", K::real, "/V2", -1000, 1000, true, &AdcConfig::th_beta},
      {"th_pedestal", K::real, "V", -1, 1, false, &AdcConfig::th_pedestal},
      {"th_inject_k3", K::real, "/V2", -100, 100, false, &AdcConfig::th_inject_k3},
      {"dac_mismatch", K::real, "", 0, 0.5, true, &AdcConfig::dac_mismatch},
      {"dac_topology", K::topology, "", 0, 0, true},
      {"dac_ron", K::ron_list, "Ohm", 1e-3, 1e9, true},
      {"dac_settle_n", K::real, "", 1e-3, 100, true, &AdcConfig::dac_settle_n},
      {"dac_ron_literal", K::boolean, "", 0, 0, false},
      {"split_lsb_bits", K::integer, "", 1, 22, false, nullptr, &AdcConfig::split_lsb_bits},
      {"split_c_bridge_p", K::real, "F", 0, 1e-9, false, &AdcConfig::split_c_bridge_p},
      {"e_logic", K::real, "J", 0, 1e-9, true, &AdcConfig::e_logic},
      {"e_track", K::real, "J", 0, 1e-9, true, &AdcConfig::e_track},
      {"temperature", K::real, "K", 1, 1000, false, &AdcConfig::temperature},
  };
  return keys;
}

inline const KeySpec* find_key(std::string_view name) {
  for (const auto& k : schema())
    if (k.name == name) return &k;
  return nullptr;
}

inline std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

inline std::optional<double> prefix_factor(std::string_view p) {
  if (p.empty()) return 1.0;
  if (p == "f") return 1e-15;
  if (p == "p") return 1e-12;
  if (p == "n") return 1e-9;
  if (p == "u" || p == "\xC2\xB5") return 1e-6;
  if (p == "m") return 1e-3;
  if (p == "k") return 1e3;
  if (p == "M") return 1e6;
  if (p == "G") return 1e9;
  if (p == "T") return 1e12;
  return std::nullopt;
}

// Parses "2.5 fF", "2.5fF", "1e-15" into SI base units for a key of the given unit.
inline double parse_quantity(const KeySpec& key, std::string_view text) {
  const std::string s = trim(text);
  if (s.empty()) throw ConfigError(std::string(key.name), "empty value");
  const char* begin = s.c_str();
  char* end = nullptr;
  const double value = std::strtod(begin, &end);
  if (end == begin) throw ConfigError(std::string(key.name), "not a number: '" + s + "'");
  std::string unit = trim(std::string_view(end));
  if (unit == "\xCE\xA9") unit = "Ohm";
  if (unit.size() > 2 && unit.substr(unit.size() - 2) == "\xCE\xA9") unit = unit.substr(0, unit.size() - 2) + "Ohm";
  if (unit.empty()) return value;
  const std::string_view base = key.unit;
  if (base.empty())
    throw ConfigError(std::string(key.name), "dimensionless value given unit '" + unit + "'");
  if (unit.size() >= base.size() && std::string_view(unit).substr(unit.size() - base.size()) == base) {
    const auto factor = prefix_factor(std::string_view(unit).substr(0, unit.size() - base.size()));
    // '/V' style units take no prefix
    if (factor && (base[0] != '/' || unit.size() == base.size())) return value * *factor;
  }
  throw ConfigError(std::string(key.name),
                    "unit '" + unit + "' is not compatible with '" + std::string(base) + "'");
}

inline bool parse_bool(const KeySpec& key, std::string_view text) {
  const std::string s = trim(text);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError(std::string(key.name), "expected true or false, got '" + s + "'");
}

inline void check_range(const KeySpec& key, double v) {
  if (!std::isfinite(v) || v < key.lo || v > key.hi) {
    std::ostringstream os;
    os << "value " << v << " " << key.unit << " outside accepted range [" << key.lo << ", " << key.hi
       << "] " << key.unit << " (check sign and SI prefix)";
    throw ConfigError(std::string(key.name), os.str());
  }
}

inline std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

// Cross-field rules. Throws ConfigError naming the first offending key.
inline void validate(const AdcConfig& cfg) {
  using detail::check_range;
  for (const auto& key : detail::schema()) {
    if (key.real) check_range(key, cfg.*key.real);
    if (key.integer) check_range(key, cfg.*key.integer);
  }
  // p_meta is an open interval
  if (cfg.p_meta <= 0.0 || cfg.p_meta >= 1.0)
    throw ConfigError("p_meta", "metastability target must lie strictly between 0 and 1");
  if (cfg.c_unit <= 0.0) throw ConfigError("c_unit", "must be strictly positive");
  if (cfg.t_easy) check_range(*detail::find_key("t_easy"), *cfg.t_easy);
  if (cfg.bits != 10 && !cfg.t_easy)
    throw ConfigError("t_easy", "required when bits != 10 (39 tau_reg holds for 10 bits only)");
  if (cfg.v_cm - cfg.v_ref / 2.0 < 0.0 || cfg.v_cm + cfg.v_ref / 2.0 > cfg.v_dd)
    throw ConfigError("v_cm", "v_cm +/- v_fs/4 must stay within [0, v_dd]");
  if (cfg.dac_topology == Topology::binary &&
      cfg.c_dac < std::ldexp(cfg.c_unit, cfg.bits - 1) * (1.0 - 1e-12))
    throw ConfigError("c_dac", "binary array needs c_dac >= 2^(bits-1) * c_unit");
  if (!cfg.dac_ron.empty()) {
    if (static_cast<int>(cfg.dac_ron.size()) != cfg.bits - 1)
      throw ConfigError("dac_ron", "needs exactly bits-1 values or 'auto'");
    for (double r : cfg.dac_ron) check_range(*detail::find_key("dac_ron"), r);
  }
  if (cfg.dac_topology == Topology::split && cfg.split_lsb_bits > cfg.bits - 2)
    throw ConfigError("split_lsb_bits", "must leave at least one bit in the MSB sub-array");
}

namespace detail {

inline void assign(AdcConfig& cfg, const KeySpec& key, std::string_view text) {
  const std::string name(key.name);
  switch (key.kind) {
    case KeyKind::real:
      cfg.*key.real = parse_quantity(key, text);
      break;
    case KeyKind::optional_real:
      cfg.t_easy = parse_quantity(key, text);
      break;
    case KeyKind::integer: {
      const double v = parse_quantity(key, text);
      if (v != std::floor(v)) throw ConfigError(name, "expected an integer");
      check_range(key, v);
      cfg.*key.integer = static_cast<int>(v);
      break;
    }
    case KeyKind::topology: {
      const std::string s = trim(text);
      if (s == "binary")
        cfg.dac_topology = Topology::binary;
      else if (s == "split")
        cfg.dac_topology = Topology::split;
      else
        throw ConfigError(name, "expected 'binary' or 'split', got '" + s + "'");
      break;
    }
    case KeyKind::ron_list: {
      cfg.dac_ron.clear();
      const std::string s = trim(text);
      if (s == "auto") break;
      std::stringstream ss(s);
      std::string item;
      while (std::getline(ss, item, ',')) cfg.dac_ron.push_back(parse_quantity(key, item));
      if (cfg.dac_ron.empty()) throw ConfigError(name, "empty resistance list");
      break;
    }
    case KeyKind::boolean:
      cfg.dac_ron_literal = parse_bool(key, text);
      break;
  }
}

inline AdcConfig finish(AdcConfig cfg, const std::vector<std::string>& seen) {
  for (const auto& key : schema()) {
    if (!key.required) continue;
    bool found = false;
    for (const auto& s : seen) found = found || s == key.name;
    if (!found) throw ConfigError(std::string(key.name), "required key missing");
  }
  validate(cfg);
  return cfg;
}

inline AdcConfig load_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("", std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("", "JSON configuration must be an object");
  AdcConfig cfg;
  std::vector<std::string> seen;
  for (const auto& [name, value] : doc.items()) {
    const KeySpec* key = find_key(name);
    if (!key) throw ConfigError(name, "unknown key");
    for (const auto& s : seen)
      if (s == name) throw ConfigError(name, "duplicate key");
    seen.push_back(name);
    if (value.is_number()) {
      assign(cfg, *key, format_real(value.get<double>()));
    } else if (value.is_string()) {
      assign(cfg, *key, value.get<std::string>());
    } else if (value.is_boolean()) {
      assign(cfg, *key, value.get<bool>() ? "true" : "false");
    } else if (value.is_array() && key->kind == KeyKind::ron_list) {
      std::string joined;
      for (const auto& v : value) {
        if (!joined.empty()) joined += ",";
        joined += v.is_number() ? format_real(v.get<double>()) : v.get<std::string>();
      }
      assign(cfg, *key, joined);
    } else {
      throw ConfigError(name, "unsupported JSON value type");
    }
  }
  return finish(std::move(cfg), seen);
}

}  // namespace detail

// Loads a configuration document (key = value lines or a JSON object). Unknown keys,
// duplicates and missing required keys are rejected; all invariants are checked.
inline AdcConfig load_config(std::string_view text) {
  const std::string head = detail::trim(text.substr(0, std::min<std::size_t>(text.size(), 64)));
  if (!head.empty() && head.front() == '{') return detail::load_json(text);

  AdcConfig cfg;
  std::vector<std::string> seen;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = detail::trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      throw ConfigError("", "line " + std::to_string(lineno) + ": expected 'key = value'");
    const std::string name = detail::trim(std::string_view(body).substr(0, eq));
    const std::string value = detail::trim(std::string_view(body).substr(eq + 1));
    const detail::KeySpec* key = detail::find_key(name);
    if (!key) throw ConfigError(name, "unknown key (line " + std::to_string(lineno) + ")");
    for (const auto& s : seen)
      if (s == name) throw ConfigError(name, "duplicate key (line " + std::to_string(lineno) + ")");
    seen.push_back(name);
    detail::assign(cfg, *key, value);
  }
  return detail::finish(std::move(cfg), seen);
}

// Overrides one key (value text as in the configuration file) and revalidates.
inline AdcConfig with_param(AdcConfig cfg, std::string_view name, std::string_view value) {
  const detail::KeySpec* key = detail::find_key(name);
  if (!key) throw ConfigError(std::string(name), "unknown key");
  detail::assign(cfg, *key, value);
  validate(cfg);
  return cfg;
}

// Emits every key in schema order, SI base units, full double precision.
inline std::string serialize(const AdcConfig& cfg) {
  using detail::format_real;
  std::ostringstream os;
  for (const auto& key : detail::schema()) {
    std::string value;
    switch (key.kind) {
      case detail::KeyKind::real:
        value = format_real(cfg.*key.real);
        if (!key.unit.empty()) value += " " + std::string(key.unit);
        break;
      case detail::KeyKind::optional_real:
        if (!cfg.t_easy) continue;
        value = format_real(*cfg.t_easy) + " s";
        break;
      case detail::KeyKind::integer:
        value = std::to_string(cfg.*key.integer);
        break;
      case detail::KeyKind::topology:
        value = std::string(to_string(cfg.dac_topology));
        break;
      case detail::KeyKind::ron_list:
        if (cfg.dac_ron.empty()) {
          value = "auto";
        } else {
          for (std::size_t i = 0; i < cfg.dac_ron.size(); ++i)
            value += (i ? ", " : "") + format_real(cfg.dac_ron[i]) + " Ohm";
        }
        break;
      case detail::KeyKind::boolean:
        value = cfg.dac_ron_literal ? "true" : "false";
        break;
    }
    os << key.name << " = " << value << "\n";
  }
  return os.str();
}

// The shipped, calibrated configuration of the 10-bit 130-MS/s converter. Emitted verbatim
// by `sarsim print-defaults`; configs/default.conf holds the same text.
inline constexpr std::string_view kDefaultConfigText = R"(# 10-bit 130-MS/s asynchronous SAR ADC, 90-nm CMOS, calibrated behavioral model.
# Units: SI with optional prefix (f p n u m k M G). Dimensionless keys take no unit.

# --- converter ---------------------------------------------------------------
bits         = 10
v_dd         = 1.2 V
v_ref        = 0.8 V        # full scale 2*v_ref = 1.6 V
f_s          = 130 MHz
c_unit       = 2.5 fF       # minimum MIM unit capacitor
c_dac        = 1.3 pF       # per side, seen from the sampling switch
c_p          = 20 fF        # top-plate parasitic incl. comparator input
# Net differential range from c_dac and c_p is +/-787.9 mV; the specification
# table quotes +/-750 mV (the test-tone amplitude) and the design text +/-785 mV.

# --- comparator ----------------------------------------------------------------
comp_c_pq    = 20 fF        # calibration value, not published
comp_c_xy    = 26 fF        # calibration value: tau_reg = c_xy/gm5 = 13 ps
comp_gm5     = 2 mS         # calibration value
comp_av      = 5            # ASSUMPTION: typical pre-regeneration gain, not published
comp_noise   = 312 uV       # input-referred rms noise (operative noise source)
v_cm         = 0.7 V
comp_gamma   = 1
comp_vgs     = 0.7 V        # operands of the printed noise expression (cross-check only)
comp_vthn    = 0.35 V
comp_cm_slope = 0 /V        # no published common-mode sensitivity

# --- timing --------------------------------------------------------------------
t_track      = 2 ns
t_delay      = 100 ps       # asynchronous clock generation per bit
t_fix        = 150 ps       # DAC settle + clock overhead per switched bit
t_clk_low    = 150 ps       # comparator-clock off time used to size DAC switches
p_meta       = 1e-7

# --- track and hold (bootstrapped switch) --------------------------------------
th_ron0      = 200 Ohm
th_alpha     = 0 /V         # odd term cancels differentially
th_beta      = 0.5 /V2      # calibration: residual on-resistance modulation
th_pedestal  = 0 V
th_inject_k3 = 0.032 /V2    # calibration: signal-dependent hold step

# --- capacitive DAC ------------------------------------------------------------
dac_mismatch = 0
dac_topology = binary
dac_ron      = auto         # constant r_on*C = t_clk_low/dac_settle_n
dac_settle_n = 10
dac_ron_literal = false
split_lsb_bits = 4          # split variant: 16x smaller sampled capacitance
split_c_bridge_p = 1 fF

# --- energy --------------------------------------------------------------------
e_logic      = 350 fJ       # calibration: SAR logic and clock buffers per bit cycle
e_track      = 1.9 pJ       # calibration: bootstrap driver per sample
temperature  = 300 K
)";

inline AdcConfig default_config() {
  static const AdcConfig cfg = load_config(kDefaultConfigText);
  return cfg;
}

}  // namespace sarsim
