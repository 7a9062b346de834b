#pragma once

// Command implementations behind the sarsim executable. Each command writes its artifacts
// plus a manifest into the output directory and a short summary to `out`.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sarsim/analysis.hpp"
#include "sarsim/capdac.hpp"
#include "sarsim/config.hpp"
#include "sarsim/engine.hpp"
#include "sarsim/errors.hpp"
#include "sarsim/report.hpp"
#include "sarsim/sar_timing.hpp"

namespace sarsim {

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitRuntime = 2, kExitCheck = 3 };

struct CliOptions {
  std::string config_path;  // empty: built-in defaults
  std::uint64_t seed = 1;
  int n = 0;                // 0: command default
  int bin = 3;
  double amplitude = 0.75;  // V, differential peak
  std::string out;          // empty: $SARSIM_OUT_DIR, then ./sarsim_out
  bool check = false;
  unsigned workers = 1;
  double pmeta = 1e-3;
  std::uint64_t trials = 1000000;
  std::string param;
  std::string range;        // start:stop:count, values may carry units
  bool binary_dump = false;
};

inline constexpr int kSimulateDefaultN = 64;
inline constexpr int kPowerDefaultN = 100000;
inline constexpr std::size_t kCsvCodeLimit = 1 << 16;

inline AdcConfig load_config_file(const std::string& path) {
  if (path.empty()) return default_config();
  std::string text;
  try {
    text = read_file(path);
  } catch (const PreconditionError&) {
    throw ConfigError("", "cannot read configuration file " + path);
  }
  return load_config(text);
}

inline std::filesystem::path resolve_out_dir(const CliOptions& o) {
  if (!o.out.empty()) return o.out;
  if (const char* e = std::getenv("SARSIM_OUT_DIR"); e && *e) return e;
  return "sarsim_out";
}

inline void write_manifest(const std::filesystem::path& dir, const CliOptions& o, std::string command) {
  RunManifest m;
  m.config_path = o.config_path.empty() ? "(built-in)" : o.config_path;
  m.command = std::move(command);
  m.seed = o.seed;
  m.out_dir = dir.string();
  m.timestamp = manifest_timestamp();
  write_json(dir / "manifest.json", m.to_json());
}

// Coprime bin closest to `bin` from below (at least 1).
inline int coprime_bin(int n, int bin) {
  bin = std::clamp(bin, 1, n / 2 - 1);
  while (bin > 1 && std::gcd(bin, n) != 1) --bin;
  return bin;
}

struct ToneRun {
  WaveformResult result;
  SpectrumMetrics metrics;
};

inline ToneRun run_tone(const AdcConfig& cfg, int n, int bin, double amplitude, std::uint64_t seed,
                        unsigned workers, EngineOptions opt = {}) {
  const Converter conv(cfg, seed, opt);
  const auto tone = gen_coherent_tone(n, bin, amplitude, cfg.v_cm);
  ToneRun r;
  r.result = convert_waveform(conv, tone, seed, workers);
  r.metrics = metrics(spectrum(r.result.codes, cfg.bits), bin, r.result.mean_power(), cfg.f_s);
  return r;
}

inline nlohmann::json metrics_json(const SpectrumMetrics& m, double f_s) {
  return {{"n", m.n},
          {"signal_bin", m.signal_bin},
          {"f_in_hz", json_num(f_s * m.signal_bin / m.n)},
          {"sndr_db", json_num(m.sndr_db)},
          {"sfdr_db", json_num(m.sfdr_db)},
          {"thd_db", json_num(m.thd_db)},
          {"enob_bits", json_num(m.enob)},
          {"spur_bin", m.spur_bin},
          {"fom_walden_j_per_step", json_num(m.fom_walden)},
          {"fom_literal", {{"value", json_num(m.fom_literal)}, {"unit", m.fom_literal_unit}}}};
}

inline int cmd_simulate(const CliOptions& o, std::ostream& out) {
  const AdcConfig cfg = load_config_file(o.config_path);
  const int n = o.n > 0 ? o.n : kSimulateDefaultN;
  const auto run = run_tone(cfg, n, o.bin, o.amplitude, o.seed, o.workers);
  const auto& m = run.metrics;
  const auto dir = resolve_out_dir(o);

  CsvTable spec{{"bin", "frequency_hz", "power_dbfs"}, {}};
  const double full_scale = 0.125;  // mean square of a full-scale sine in normalized codes
  for (std::size_t k = 0; k < m.power.size(); ++k)
    spec.add({std::to_string(k), fmt_num(cfg.f_s * static_cast<double>(k) / n),
              fmt_num(10.0 * std::log10(std::max(m.power[k], 1e-300) / full_scale))});
  write_file(dir / "spectrum.csv", spec.str());

  auto j = metrics_json(m, cfg.f_s);
  j["amplitude_v"] = o.amplitude;
  j["seed"] = o.seed;
  j["power_w"] = json_num(run.result.mean_power());
  j["metastable_conversions"] = run.result.metastable_conversions;
  j["timing_violations"] = run.result.violations;
  write_json(dir / "metrics.json", j);

  if (o.binary_dump || run.result.size() > kCsvCodeLimit) {
    write_file(dir / "codes.sarc",
               encode_code_dump({static_cast<std::uint32_t>(cfg.bits), run.result.codes, run.result.flags}));
  } else {
    CsvTable codes{{"index", "code", "flags"}, {}};
    for (std::size_t k = 0; k < run.result.size(); ++k)
      codes.add({std::to_string(k), std::to_string(run.result.codes[k]), std::to_string(run.result.flags[k])});
    write_file(dir / "codes.csv", codes.str());
  }
  write_manifest(dir, o, "simulate");

  out << std::fixed << std::setprecision(2) << "N=" << n << " bin=" << o.bin << " SNDR=" << m.sndr_db
      << " dB SFDR=" << m.sfdr_db << " dB THD=" << m.thd_db << " dB ENOB=" << m.enob
      << " P=" << run.result.mean_power() * 1e6 << " uW\n";
  if (o.check) {
    const bool ok = m.enob == (m.sndr_db - 1.76) / 6.02 && m.sfdr_db >= m.sndr_db && run.result.violations == 0;
    out << (ok ? "check passed\n" : "check FAILED\n");
    if (!ok) return kExitCheck;
  }
  return kExitOk;
}

inline int cmd_timing(const CliOptions& o, std::ostream& out) {
  const AdcConfig cfg = load_config_file(o.config_path);
  const auto b = timing_budget(cfg);
  const auto dir = resolve_out_dir(o);
  CsvTable t{{"component", "value"}, {}};
  const std::vector<std::pair<std::string, double>> rows = {
      {"tau_reg_s", b.tau_reg},   {"t_hard_s", b.t_hard},     {"t_easy_s", b.t_easy},
      {"t_fix_s", b.t_fix},       {"t_delay_s", b.t_delay},   {"t_track_s", b.t_track},
      {"period_s", b.period},     {"f_s_max_async_hz", b.f_s_max}, {"f_s_max_sync_hz", b.f_s_max_sync},
      {"f_s_hz", b.f_s},          {"margin_s", b.margin},     {"async_gain", b.async_gain}};
  nlohmann::json j;
  for (const auto& [k, v] : rows) {
    t.add({k, fmt_num(v)});
    j[k] = json_num(v);
  }
  j["bits"] = b.bits;
  j["violation"] = b.violation;
  write_file(dir / "timing.csv", t.str());
  write_json(dir / "timing.json", j);
  write_manifest(dir, o, "timing");
  for (const auto& [k, v] : rows) out << std::left << std::setw(18) << k << " " << fmt_num(v) << "\n";
  if (o.check && b.violation) return kExitCheck;
  return kExitOk;
}

inline int cmd_power(const CliOptions& o, std::ostream& out) {
  const AdcConfig cfg = load_config_file(o.config_path);
  const int n = o.n > 0 ? o.n : kPowerDefaultN;
  const int bin = coprime_bin(n, static_cast<int>(std::lround(3.0 * n / 64.0)));
  const Converter conv(cfg, o.seed);
  const auto r = convert_waveform(conv, gen_coherent_tone(n, bin, o.amplitude, cfg.v_cm), o.seed, o.workers);
  const auto p = power_report(r);
  const auto dir = resolve_out_dir(o);
  CsvTable t{{"block", "power_w", "fraction"}, {}};
  nlohmann::json blocks = nlohmann::json::array();
  for (const auto& b : p.blocks) {
    t.add({b.block, fmt_num(b.power), fmt_num(b.fraction)});
    blocks.push_back({{"block", b.block}, {"power_w", b.power}, {"fraction", b.fraction}});
    out << std::left << std::setw(16) << b.block << std::right << std::fixed << std::setprecision(1)
        << std::setw(8) << b.power * 1e6 << " uW " << std::setw(6) << b.fraction * 100 << " %\n";
  }
  out << std::left << std::setw(16) << "total" << std::right << std::setw(8) << p.total * 1e6 << " uW\n";
  write_file(dir / "power.csv", t.str());
  write_json(dir / "power.json", {{"blocks", blocks},
                                  {"total_w", p.total},
                                  {"f_s_hz", p.f_s},
                                  {"conversions", p.conversions},
                                  {"metastable_conversions", r.metastable_conversions},
                                  {"timing_violations", r.violations}});
  write_manifest(dir, o, "power");
  return kExitOk;
}

inline int cmd_dac_compare(const CliOptions& o, std::ostream& out) {
  const AdcConfig cfg = load_config_file(o.config_path);
  const auto rep = compare_topologies(cfg, o.seed);
  const auto dir = resolve_out_dir(o);
  CsvTable t{{"topology", "c_total_f", "c_sampled_f", "e_avg_j", "sigma_ktc_v", "inl_max_lsb"}, {}};
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : rep.rows) {
    t.add({r.topology, fmt_num(r.c_total), fmt_num(r.c_sampled), fmt_num(r.e_avg), fmt_num(r.sigma_ktc),
           fmt_num(r.inl_max)});
    rows.push_back({{"topology", r.topology},
                    {"c_total_f", r.c_total},
                    {"c_sampled_f", r.c_sampled},
                    {"e_avg_j", r.e_avg},
                    {"sigma_ktc_v", r.sigma_ktc},
                    {"inl_max_lsb", r.inl_max}});
  }
  CsvTable s{{"metric", "measured", "reference"}, {}};
  s.add({"energy_saving_split_vs_conventional", fmt_num(rep.energy_saving_split), "0.375"});
  s.add({"energy_saving_bridged_vs_binary", fmt_num(rep.energy_saving_bridged), ""});
  s.add({"capacitance_reduction", fmt_num(rep.capacitance_reduction), ""});
  s.add({"noise_ratio", fmt_num(rep.noise_ratio), ""});
  write_file(dir / "dac_compare.csv", t.str());
  write_file(dir / "dac_savings.csv", s.str());
  write_json(dir / "dac_compare.json", {{"rows", rows},
                                        {"energy_saving_split", rep.energy_saving_split},
                                        {"energy_saving_bridged", rep.energy_saving_bridged},
                                        {"capacitance_reduction", rep.capacitance_reduction},
                                        {"noise_ratio", rep.noise_ratio}});
  write_manifest(dir, o, "dac-compare");
  out << t.str() << s.str();
  return kExitOk;
}

inline int cmd_metastability(const CliOptions& o, std::ostream& out) {
  const AdcConfig cfg = load_config_file(o.config_path);
  const auto r = metastability_mc(cfg, o.trials, o.pmeta, o.seed, false, o.workers);
  const bool within = std::fabs(r.rate - r.expected) <= 3.0 * r.sigma;
  const auto dir = resolve_out_dir(o);
  write_json(dir / "metastability.json", {{"trials", r.trials},
                                          {"events", r.events},
                                          {"rate", r.rate},
                                          {"expected", r.expected},
                                          {"sigma", r.sigma},
                                          {"ci_low", r.ci_low},
                                          {"ci_high", r.ci_high},
                                          {"t_hard_s", r.t_hard},
                                          {"within_3sigma", within}});
  write_manifest(dir, o, "metastability");
  out << "trials=" << r.trials << " events=" << r.events << " rate=" << fmt_num(r.rate)
      << " expected=" << fmt_num(r.expected) << " sigma=" << fmt_num(r.sigma)
      << (within ? " (within 3 sigma)\n" : " (OUTSIDE 3 sigma)\n");
  if (o.check && !within) return kExitCheck;
  return kExitOk;
}

struct SweepRange {
  double start = 0;
  double stop = 0;
  int count = 0;
};

inline SweepRange parse_range(std::string_view param, const std::string& text) {
  const detail::KeySpec* key = detail::find_key(param);
  if (!key) throw ConfigError(std::string(param), "unknown key");
  const auto a = text.find(':');
  const auto b = a == std::string::npos ? a : text.find(':', a + 1);
  if (b == std::string::npos) throw PreconditionError("sweep: --range must be start:stop:count");
  SweepRange r;
  r.start = detail::parse_quantity(*key, text.substr(0, a));
  r.stop = detail::parse_quantity(*key, text.substr(a + 1, b - a - 1));
  const std::string c = text.substr(b + 1);
  char* end = nullptr;
  r.count = static_cast<int>(std::strtol(c.c_str(), &end, 10));
  if (end == c.c_str() || *end || r.count < 1) throw PreconditionError("sweep: count must be a positive integer");
  return r;
}

inline int cmd_sweep(const CliOptions& o, std::ostream& out) {
  const AdcConfig base = load_config_file(o.config_path);
  if (o.param.empty()) throw PreconditionError("sweep: --param is required");
  const auto range = parse_range(o.param, o.range);
  const int n = o.n > 0 ? o.n : kSimulateDefaultN;
  CsvTable t{{o.param, "v_fs_net_v", "lsb_v", "f_s_max_hz", "sndr_db", "enob_bits", "power_w"}, {}};
  nlohmann::json rows = nlohmann::json::array();
  for (int k = 0; k < range.count; ++k) {
    const double v = range.count == 1 ? range.start
                                      : range.start + (range.stop - range.start) * k / (range.count - 1);
    const AdcConfig cfg = with_param(base, o.param, detail::format_real(v));
    const auto d = derived_constants(cfg);
    const auto tb = timing_budget(cfg);
    const auto run = run_tone(cfg, n, o.bin, o.amplitude, o.seed, o.workers);
    t.add({fmt_num(v), fmt_num(d.v_fs_net), fmt_num(d.lsb), fmt_num(tb.f_s_max), fmt_num(run.metrics.sndr_db),
           fmt_num(run.metrics.enob), fmt_num(run.result.mean_power())});
    rows.push_back({{o.param, v},
                    {"v_fs_net_v", d.v_fs_net},
                    {"lsb_v", d.lsb},
                    {"f_s_max_hz", tb.f_s_max},
                    {"sndr_db", json_num(run.metrics.sndr_db)},
                    {"enob_bits", json_num(run.metrics.enob)},
                    {"power_w", run.result.mean_power()}});
  }
  const auto dir = resolve_out_dir(o);
  write_file(dir / "sweep.csv", t.str());
  write_json(dir / "sweep.json", {{"param", o.param}, {"rows", rows}});
  write_manifest(dir, o, "sweep");
  out << t.str();
  return kExitOk;
}

inline int cmd_print_defaults(std::ostream& out) {
  out << kDefaultConfigText;
  return kExitOk;
}

// Dispatches a command and maps failures to exit codes: 1 configuration, 2 runtime
// precondition or domain error.
inline int run_command(const std::string& command, const CliOptions& o, std::ostream& out, std::ostream& err) {
  try {
    if (command == "simulate") return cmd_simulate(o, out);
    if (command == "timing") return cmd_timing(o, out);
    if (command == "power") return cmd_power(o, out);
    if (command == "dac-compare") return cmd_dac_compare(o, out);
    if (command == "metastability") return cmd_metastability(o, out);
    if (command == "sweep") return cmd_sweep(o, out);
    if (command == "print-defaults") return cmd_print_defaults(out);
    err << "unknown command: " << command << "\n";
    return kExitRuntime;
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace sarsim
