#pragma once

// Dynamic and static ADC metrology: coherent tones, rectangular-window spectra,
// SNDR/SFDR/THD/ENOB, figures of merit and code-density INL/DNL.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <mutex>
#include <numeric>
#include <string>
#include <vector>

#include <fftw3.h>

#include "sarsim/errors.hpp"

namespace sarsim {

struct DifferentialSample {
  double v_p;
  double v_n;

  double differential() const { return v_p - v_n; }
};

// amplitude is the differential peak; each side swings amplitude/2 around v_cm.
inline std::vector<DifferentialSample> gen_coherent_tone(int n, int bin, double amplitude, double v_cm) {
  if (n < 4) throw PreconditionError("gen_coherent_tone: need at least 4 points");
  if (bin < 1 || 2 * bin >= n) throw PreconditionError("gen_coherent_tone: bin must satisfy 1 <= bin < N/2");
  if (std::gcd(bin, n) != 1) throw PreconditionError("gen_coherent_tone: bin and N must be coprime (leakage)");
  std::vector<DifferentialSample> out(static_cast<std::size_t>(n));
  const double pi = std::acos(-1.0);
  for (int k = 0; k < n; ++k) {
    const double x = 0.5 * amplitude * std::sin(2.0 * pi * bin * k / n);
    out[static_cast<std::size_t>(k)] = {v_cm + x, v_cm - x};
  }
  return out;
}

namespace detail {
inline std::mutex& fftw_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace detail

// One-sided power spectrum, bins 0..N/2, normalized so that the bins sum to the mean square
// of x (Parseval). Rectangular window.
inline std::vector<double> power_spectrum(const std::vector<double>& x) {
  const auto n = x.size();
  if (n < 2) throw PreconditionError("power_spectrum: need at least 2 samples");
  std::vector<double> in(x);
  std::vector<std::complex<double>> out(n / 2 + 1);
  {
    std::lock_guard<std::mutex> lock(detail::fftw_mutex());
    fftw_plan plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.data(),
                                          reinterpret_cast<fftw_complex*>(out.data()), FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
  }
  const double nn = static_cast<double>(n) * static_cast<double>(n);
  std::vector<double> p(out.size());
  for (std::size_t k = 0; k < out.size(); ++k) {
    const bool unpaired = k == 0 || (n % 2 == 0 && k == n / 2);
    p[k] = (unpaired ? 1.0 : 2.0) * std::norm(out[k]) / nn;
  }
  return p;
}

// Spectrum of an output code stream, codes mapped to (code + 0.5)/2^B - 0.5.
inline std::vector<double> spectrum(const std::vector<int>& codes, int bits) {
  const int top = 1 << bits;
  std::vector<double> x;
  x.reserve(codes.size());
  for (int c : codes) {
    if (c < 0 || c >= top) throw PreconditionError("spectrum: code " + std::to_string(c) + " out of range");
    x.push_back((c + 0.5) / top - 0.5);
  }
  return power_spectrum(x);
}

// Largest non-DC bin.
inline int find_signal_bin(const std::vector<double>& spec) {
  if (spec.size() < 2) throw PreconditionError("find_signal_bin: empty spectrum");
  return static_cast<int>(std::max_element(spec.begin() + 1, spec.end()) - spec.begin());
}

struct SpectrumMetrics {
  int n = 0;            // record length
  int signal_bin = 0;
  int spur_bin = 0;     // -1 when no spur exists
  std::vector<double> power;
  double sndr_db = 0;   // +inf when no noise or distortion
  double sfdr_db = 0;
  double thd_db = 0;    // harmonic power over signal, -inf when none
  double enob = 0;
  double fom_walden = 0;          // J per conversion step
  double fom_literal = 0;         // P / f_s^2
  std::string fom_literal_unit = "J*s";
};

inline constexpr int kThdHarmonics = 9;

// Harmonic h of the signal folded into the first Nyquist zone.
inline int alias_bin(long long bin, int n) {
  long long b = bin % n;
  if (b > n / 2) b = n - b;
  return static_cast<int>(b);
}

// Metrics from a one-sided spectrum. DC is excluded; every other non-signal bin counts as
// noise plus distortion.
inline SpectrumMetrics metrics(const std::vector<double>& spec, int signal_bin, double power_total, double f_s) {
  const int half = static_cast<int>(spec.size()) - 1;
  if (signal_bin < 1 || signal_bin > half) throw PreconditionError("metrics: signal bin out of range");
  SpectrumMetrics m;
  m.n = 2 * half;
  m.signal_bin = signal_bin;
  m.power = spec;
  const double ps = spec[static_cast<std::size_t>(signal_bin)];
  double other = 0, spur = 0;
  m.spur_bin = -1;
  for (int k = 1; k <= half; ++k) {
    if (k == signal_bin) continue;
    other += spec[static_cast<std::size_t>(k)];
    if (spec[static_cast<std::size_t>(k)] > spur) {
      spur = spec[static_cast<std::size_t>(k)];
      m.spur_bin = k;
    }
  }
  double harm = 0;
  std::vector<int> used;
  for (int h = 2; h <= kThdHarmonics; ++h) {
    const int b = alias_bin(static_cast<long long>(h) * signal_bin, m.n);
    if (b == 0 || b == signal_bin || std::find(used.begin(), used.end(), b) != used.end()) continue;
    used.push_back(b);
    harm += spec[static_cast<std::size_t>(b)];
  }
  const double inf = std::numeric_limits<double>::infinity();
  m.sndr_db = other > 0 ? 10.0 * std::log10(ps / other) : inf;
  m.sfdr_db = spur > 0 ? 10.0 * std::log10(ps / spur) : inf;
  m.thd_db = harm > 0 ? 10.0 * std::log10(harm / ps) : -inf;
  m.enob = (m.sndr_db - 1.76) / 6.02;
  m.fom_walden = power_total / (std::pow(2.0, m.enob) * f_s);
  m.fom_literal = power_total / (f_s * f_s);
  return m;
}

struct CodeDensity {
  std::vector<long long> hits;
  std::vector<double> dnl;  // LSB, codes 1..2^B-2 (index 0 is code 1)
  std::vector<double> inl;  // LSB, same indexing, endpoint fit
  double dnl_max = 0;
  double inl_max = 0;
};

inline constexpr long long kMinHitsPerCode = 30;

// Code-density linearity of a record driven by a uniform ramp spanning the full scale. The
// end codes absorb overrange and are left out. INL accumulates DNL and is then corrected by
// the straight line through its end points.
inline CodeDensity inl_dnl(const std::vector<int>& codes, int bits, long long min_hits = kMinHitsPerCode) {
  const int top = 1 << bits;
  CodeDensity r;
  r.hits.assign(static_cast<std::size_t>(top), 0);
  for (int c : codes) {
    if (c < 0 || c >= top) throw PreconditionError("inl_dnl: code " + std::to_string(c) + " out of range");
    ++r.hits[static_cast<std::size_t>(c)];
  }
  std::string missing;
  int n_missing = 0;
  for (int c = 0; c < top; ++c) {
    if (r.hits[static_cast<std::size_t>(c)] >= min_hits) continue;
    if (n_missing++ < 20) missing += (missing.empty() ? "" : ", ") + std::to_string(c);
  }
  if (n_missing)
    throw PreconditionError("inl_dnl: " + std::to_string(n_missing) + " codes visited fewer than " +
                            std::to_string(min_hits) + " times: " + missing + (n_missing > 20 ? ", ..." : ""));
  double inner = 0;
  for (int c = 1; c < top - 1; ++c) inner += static_cast<double>(r.hits[static_cast<std::size_t>(c)]);
  const double avg = inner / (top - 2);
  double acc = 0;
  for (int c = 1; c < top - 1; ++c) {
    r.dnl.push_back(r.hits[static_cast<std::size_t>(c)] / avg - 1.0);
    acc += r.dnl.back();
    r.inl.push_back(acc);
  }
  const double first = r.inl.front(), last = r.inl.back();
  const auto m = static_cast<double>(r.inl.size() - 1);
  for (std::size_t k = 0; k < r.inl.size(); ++k) {
    r.inl[k] -= first + (last - first) * (m > 0 ? static_cast<double>(k) / m : 0.0);
    r.inl_max = std::max(r.inl_max, std::fabs(r.inl[k]));
    r.dnl_max = std::max(r.dnl_max, std::fabs(r.dnl[k]));
  }
  return r;
}

}  // namespace sarsim
