#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "sarsim/engine.hpp"

using namespace sarsim;

namespace {

int midrise_oracle(double v, double lsb, int bits) {
  const int top = (1 << bits) - 1;
  return std::clamp(static_cast<int>(std::floor(v / lsb)) + (1 << (bits - 1)), 0, top);
}

const Converter& ideal_converter() {
  static const Converter c(ideal_config(default_config()), 0, EngineOptions::ideal());
  return c;
}

ConversionRecord convert_diff(const Converter& c, double v, std::uint64_t idx = 0) {
  auto rng = make_rng(1, Stream::comparator, idx);
  const double cm = c.config().v_cm;
  return c.convert(cm + v / 2, cm - v / 2, rng);
}

}  // namespace

TEST(Engine, IdealCodeCentresExhaustive) {
  const auto& c = ideal_converter();
  const double lsb = c.derived().lsb, fs = c.derived().v_fs_net;
  for (int k = 0; k < 1024; ++k) {
    const double v = lsb * (k + 0.5) - fs / 2;
    ASSERT_EQ(convert_diff(c, v).code, k) << "k=" << k;
  }
}

TEST(Engine, IdealRampMatchesMidriseQuantizer) {
  const auto& c = ideal_converter();
  const double lsb = c.derived().lsb, fs = c.derived().v_fs_net;
  std::vector<int> hits(1024, 0);
  int prev = -1, errors = 0;
  for (int m = 0; m < 4096; ++m) {
    const double v = -fs / 2 + (m + 0.5) * fs / 4096;
    const int code = convert_diff(c, v).code;
    errors += code != midrise_oracle(v, lsb, 10);
    EXPECT_GE(code, prev);
    prev = code;
    ++hits[static_cast<std::size_t>(code)];
  }
  EXPECT_EQ(errors, 0);
  EXPECT_EQ(std::count(hits.begin(), hits.end(), 0), 0);
}

TEST(Engine, SaturationCodes) {
  const auto& c = ideal_converter();
  const double fs = c.derived().v_fs_net;
  EXPECT_EQ(convert_diff(c, fs / 2).code, 1023);
  EXPECT_EQ(convert_diff(c, -fs / 2).code, 0);
}

TEST(Engine, ZeroInputTakesMetastablePath) {
  const auto& c = ideal_converter();
  const auto r = convert_diff(c, 0.0);
  EXPECT_GE(r.metastable_bits, 1);
  EXPECT_TRUE(r.bits[0].decision.metastable);
  EXPECT_TRUE(r.code == 511 || r.code == 512);
}

TEST(Engine, DcMidScale) {
  const auto& c = ideal_converter();
  const double v = c.derived().lsb / 2;
  std::vector<DifferentialSample> dc(256, {c.config().v_cm + v / 2, c.config().v_cm - v / 2});
  const auto r = convert_waveform(c, dc, 3);
  EXPECT_TRUE(std::all_of(r.codes.begin(), r.codes.end(), [](int x) { return x == 512; }));
}

TEST(Engine, CodeReproducesDecisions) {
  const Converter c(default_config(), 2);
  const auto tone = gen_coherent_tone(256, 7, 0.75, 0.7);
  for (std::size_t k = 0; k < tone.size(); ++k) {
    auto rng = make_rng(2, Stream::comparator, k);
    const auto r = c.convert(tone[k].v_p, tone[k].v_n, rng);
    if (r.metastable_bits || r.timing_violation) continue;
    int code = 0;
    for (const auto& b : r.bits) code = 2 * code + (b.decision.bit > 0);
    EXPECT_EQ(code, r.code);
  }
}

TEST(Engine, WindowAccounting) {
  const Converter c(default_config(), 2);
  const auto tone = gen_coherent_tone(1024, 31, 0.75, 0.7);
  const auto r = convert_waveform(c, tone, 4, 1, true);
  for (const auto& rec : r.records) {
    ASSERT_FALSE(rec.timing_violation);
    double t = c.config().t_track;
    for (const auto& b : rec.bits) t += b.allocated;
    EXPECT_NEAR(t, rec.total_time, 1e-21);
    EXPECT_LE(rec.total_time, 1.0 / c.config().f_s);
  }
}

TEST(Engine, WindowExhaustionCompletesMidScale) {
  auto cfg = default_config();
  cfg.f_s = 400e6;  // window shorter than the reserved easy-comparison time
  const Converter c(cfg, 0);
  const auto r = convert_diff(c, 0.3);
  EXPECT_TRUE(r.timing_violation);
  int first_unresolved = -1;
  for (int j = 0; j < 10; ++j)
    if (!r.bits[static_cast<std::size_t>(j)].resolved) {
      first_unresolved = j;
      break;
    }
  ASSERT_GE(first_unresolved, 0);
  int resolved = 0;
  for (int j = 0; j < first_unresolved; ++j)
    resolved = 2 * resolved + (r.bits[static_cast<std::size_t>(j)].decision.bit > 0);
  const int rest = 10 - first_unresolved;
  EXPECT_EQ(r.code, (resolved << rest) | (1 << (rest - 1)));
}

TEST(Engine, MetastableBitConsumesItsWindow) {
  auto cfg = default_config();
  cfg.comp_noise = 0;
  EngineOptions opt;
  opt.sampling_noise = false;
  opt.ideal_tracking = true;
  const Converter c(cfg, 0, opt);
  const auto r = convert_diff(c, 1e-300);
  ASSERT_TRUE(r.bits[0].decision.metastable);
  EXPECT_GE(r.metastable_bits, 1);
  EXPECT_FALSE(r.timing_violation);
  EXPECT_LE(r.total_time, 1.0 / cfg.f_s * (1 + 1e-12));
  // the rest of the conversion ran on the easy-comparison reserve
  EXPECT_GT(r.bits[0].allocated, 2e-9);
}

TEST(Engine, EnergyIdentity) {
  const Converter c(default_config(), 1);
  const auto tone = gen_coherent_tone(512, 13, 0.75, 0.7);
  const auto r = convert_waveform(c, tone, 9, 1, true);
  BlockEnergy sum;
  for (const auto& rec : r.records) {
    for (const auto& b : rec.bits) {
      sum.comparator += b.e_comparator;
      sum.dac += b.e_dac;
      sum.logic += b.e_logic;
    }
    sum.track += rec.e_track;
  }
  EXPECT_NEAR(sum.comparator, r.energy.comparator, 1e-12 * r.energy.comparator);
  EXPECT_NEAR(sum.dac, r.energy.dac, 1e-12 * r.energy.dac);
  EXPECT_NEAR(sum.logic, r.energy.logic, 1e-12 * r.energy.logic);
  EXPECT_NEAR(sum.track, r.energy.track, 1e-12 * r.energy.track);
  const auto& rec = r.records[5];
  EXPECT_EQ(rec.energy(), rec.bit_energy() + rec.e_track);
}

TEST(Engine, DeterministicAcrossWorkers) {
  const Converter c(default_config(), 1);
  const auto tone = gen_coherent_tone(4096, 101, 0.75, 0.7);
  const auto a = convert_waveform(c, tone, 21, 1);
  const auto b = convert_waveform(c, tone, 21, 4);
  EXPECT_EQ(a.codes, b.codes);
  EXPECT_EQ(a.flags, b.flags);
  EXPECT_EQ(a.energy.total(), b.energy.total());
  const auto d = convert_waveform(c, tone, 22, 1);
  EXPECT_NE(a.codes, d.codes);
}

TEST(Engine, PowerReportBookkeeping) {
  const Converter c(default_config(), 1);
  const auto r = convert_waveform(c, gen_coherent_tone(2048, 97, 0.75, 0.7), 1);
  const auto p = power_report(r);
  double sum = 0, frac = 0;
  for (const auto& b : p.blocks) {
    sum += b.power;
    frac += b.fraction;
  }
  EXPECT_EQ(sum, p.total);
  EXPECT_NEAR(frac, 1.0, 1e-9);
  EXPECT_NEAR(p.total, r.mean_power(), 1e-12 * p.total);
  // comparator: B firings of (2 C_PQ + C_XY) V_DD^2 per conversion
  EXPECT_NEAR(p.blocks[0].power, 10 * 66e-15 * 1.44 * 130e6, 1e-12);
}

TEST(Engine, DynamicPowerScalesWithRate) {
  auto cfg = default_config();
  EngineOptions opt;
  opt.unlimited_time = true;
  const auto tone = gen_coherent_tone(1024, 31, 0.75, 0.7);
  const auto p1 = power_report(convert_waveform(Converter(cfg, 1, opt), tone, 5));
  cfg.f_s *= 2;
  const auto p2 = power_report(convert_waveform(Converter(cfg, 1, opt), tone, 5));
  for (std::size_t k = 0; k < p1.blocks.size(); ++k)
    EXPECT_NEAR(p2.blocks[k].power, 2 * p1.blocks[k].power, 1e-9 * p1.blocks[k].power);
}

TEST(Engine, NoiseBudgetTerms) {
  const auto cfg = default_config();
  const double psig = 0.75 * 0.75 / 2;
  const auto nb = noise_budget(cfg, 55.2, psig);
  const double lsb = 1.6 * 1.3e-12 / 1.32e-12 / 1024;
  EXPECT_NEAR(std::sqrt(nb.term("quantization")), lsb / std::sqrt(12.0), 1e-12);
  EXPECT_NEAR(std::sqrt(nb.term("quantization")), 444e-6, 1e-6);
  EXPECT_NEAR(std::sqrt(nb.term("comparator")), 312e-6, 1e-12);
  EXPECT_NEAR(std::sqrt(nb.term("sampling")), 79.8e-6, 0.1e-6);
  EXPECT_NEAR(nb.rss, 548e-6, 1e-6);
  EXPECT_GT(nb.slack, 0);
  EXPECT_NEAR(nb.allowed, psig / std::pow(10, 5.52), 1e-15);
}

TEST(Engine, NoiseBudgetQuantizationLimit) {
  const auto cfg = default_config();
  const double a = derived_constants(cfg).v_fs_net / 2;
  const auto nb = noise_budget(cfg, 60, a * a / 2, 1e-6, EngineOptions::ideal());
  EXPECT_EQ(nb.total, nb.term("quantization"));
  EXPECT_NEAR(nb.predicted_sndr_db, 6.02 * 10 + 1.76, 0.01);
  EXPECT_THROW(noise_budget(cfg, 0, 1), PreconditionError);
}

TEST(Engine, ThDistortionIsZeroWithoutNonlinearity) {
  auto cfg = ideal_config(default_config());
  // only the settling residual of the wrapped first sample remains
  EXPECT_LT(th_distortion_power(cfg, 64, 3, 0.75), 1e-12 * 0.75 * 0.75 / 2);
  EXPECT_GT(th_distortion_power(default_config(), 64, 31, 0.75), th_distortion_power(default_config(), 64, 3, 0.75));
}

TEST(Engine, InputRangeIsAPrecondition) {
  const auto& c = ideal_converter();
  auto rng = make_rng(1, Stream::comparator);
  EXPECT_THROW(c.convert(1.5, 0.5, rng), PreconditionError);
  EXPECT_THROW(convert_waveform(c, {}, 1), PreconditionError);
}
