#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "sarsim/capdac.hpp"

using namespace sarsim;

namespace {

CapArray ideal_array(const AdcConfig& cfg, Topology t = Topology::binary) {
  auto rng = make_rng(0, Stream::mismatch);
  return build_cap_array(cfg, rng, t, 0.0);
}

std::vector<int> decisions(int code, int bits) {
  std::vector<int> d;
  for (int i = 1; i <= bits; ++i) d.push_back(((code >> (bits - i)) & 1) ? 1 : -1);
  return d;
}

// Per-event C*dV bookkeeping of a single-node side: the top plate moves by the capacitive
// divider of the bottom-plate step, and V_REF supplies the charge change of every plate tied
// to it after the event.
double oracle_side_energy(const std::vector<double>& caps, double c_fixed, double v_ref, const std::vector<int>& rise) {
  const double ct = std::accumulate(caps.begin(), caps.end(), c_fixed);
  std::vector<bool> on_ref(caps.size(), false);
  double e = 0;
  for (std::size_t i = 0; i < rise.size(); ++i) {
    const double dvb = rise[i] ? v_ref / 2 : -v_ref / 2;
    const double dtop = caps[i] * dvb / ct;
    if (rise[i]) on_ref[i] = true;
    double q = 0;
    for (std::size_t k = 0; k < caps.size(); ++k)
      if (on_ref[k]) q += caps[k] * ((k == i ? dvb : 0.0) - dtop);
    e += v_ref * q;
  }
  return e;
}

double engine_energy(const CapArray& arr, int code) {
  auto st = reset_dac(arr, 0.7, 0.7);
  const auto d = decisions(code, arr.bits);
  for (int i = 1; i < arr.bits; ++i) switch_bit(st, i, d[static_cast<std::size_t>(i - 1)], 1e-10, arr, 0.0);
  return st.energy;
}

}  // namespace

TEST(CapDac, UnitAndWeights) {
  const auto cfg = default_config();
  const auto arr = ideal_array(cfg);
  EXPECT_DOUBLE_EQ(arr.unit, 1.3e-12 / 512);
  EXPECT_GE(arr.unit, cfg.c_unit);
  const auto& s = arr.side[0];
  ASSERT_EQ(s.caps.size(), 9u);
  EXPECT_EQ(s.units.front(), 256);
  EXPECT_EQ(s.units.back(), 1);
  EXPECT_NEAR(arr.c_total(kSideP), cfg.c_dac, 1e-24);
  EXPECT_NEAR(s.c_sampled, cfg.c_dac + cfg.c_p, 1e-24);
}

TEST(CapDac, StepsAreBinaryFractionsOfNetFullScale) {
  const auto cfg = default_config();
  const auto arr = ideal_array(cfg);
  const double fs = 1.6 * 1.3e-12 / 1.32e-12;
  for (int i = 1; i <= 9; ++i) EXPECT_NEAR(step_voltage(i, arr), fs / std::ldexp(1.0, i + 1), 1e-15);
  EXPECT_NEAR(array_full_scale(arr), fs, 1e-14);
  EXPECT_NEAR(array_lsb(arr), fs / 1024, 1e-17);
  EXPECT_THROW(step_voltage(10, arr), PreconditionError);
}

TEST(CapDac, IdealArraysAreLinear) {
  auto cfg = default_config();
  EXPECT_LT(static_linearity(ideal_array(cfg)).inl_max, 1e-9);
  cfg.split_c_bridge_p = 0;
  const auto split = ideal_array(cfg, Topology::split);
  EXPECT_LT(static_linearity(split).inl_max, 1e-9);
  EXPECT_LT(static_linearity(split).dnl_max, 1e-9);
}

TEST(CapDac, SplitNeedsSixteenTimesLessSampledCapacitance) {
  auto cfg = default_config();
  cfg.c_p = 0;
  cfg.split_c_bridge_p = 0;
  const auto b = ideal_array(cfg), s = ideal_array(cfg, Topology::split);
  EXPECT_NEAR(b.side[0].c_sampled / s.side[0].c_sampled, 16.0, 1e-9);
  // full scale is preserved without parasitics
  EXPECT_NEAR(array_full_scale(s), 1.6, 1e-12);
}

TEST(CapDac, BridgeParasiticBreaksSplitLinearity) {
  const auto cfg = default_config();
  EXPECT_GT(static_linearity(ideal_array(cfg, Topology::split)).inl_max, 0.1);
}

TEST(CapDac, ClosedFormEnergyMatchesCvOracleAllCodes) {
  const auto cfg = default_config();
  const auto arr = ideal_array(cfg);
  const auto& s = arr.side[0];
  for (int code = 0; code < 1024; ++code) {
    const auto d = decisions(code, 10);
    std::vector<int> rise_p, rise_n;
    for (int i = 0; i < 9; ++i) {
      rise_p.push_back(d[static_cast<std::size_t>(i)] < 0);
      rise_n.push_back(d[static_cast<std::size_t>(i)] > 0);
    }
    const double c_fixed = s.terminator + cfg.c_p;
    const double oracle = oracle_side_energy(s.caps, c_fixed, cfg.v_ref, rise_p) +
                          oracle_side_energy(s.caps, c_fixed, cfg.v_ref, rise_n);
    const double e = engine_energy(arr, code);
    ASSERT_NEAR(e, oracle, 1e-12 * std::fabs(oracle) + 1e-30) << "code " << code;
    ASSERT_NEAR(cm_switching_energy(arr, code), oracle, 1e-12 * std::fabs(oracle) + 1e-30) << "code " << code;
  }
}

TEST(CapDac, SplitClosedFormMatchesNetworkSolver) {
  auto cfg = default_config();
  cfg.dac_mismatch = 0.01;
  auto rng = make_rng(5, Stream::mismatch);
  const auto arr = build_cap_array(cfg, rng, Topology::split, cfg.dac_mismatch);
  for (int code = 0; code < 1024; code += 7)
    EXPECT_NEAR(engine_energy(arr, code), cm_switching_energy(arr, code), 1e-12 * cm_switching_energy(arr, code));
}

TEST(CapDac, EachPlateSwitchesOnceAndCommonModeHolds) {
  const auto cfg = default_config();
  const auto arr = ideal_array(cfg);
  for (int code : {0, 1, 341, 512, 682, 1023}) {
    auto st = reset_dac(arr, 0.75, 0.65);
    const auto d = decisions(code, 10);
    for (int i = 1; i <= 9; ++i) {
      const auto before = st.bottom;
      switch_bit(st, i, d[static_cast<std::size_t>(i - 1)], 1e-10, arr, 0.0);
      for (int s = 0; s < 2; ++s)
        for (int k = 0; k < 9; ++k) {
          const auto b0 = before[s][static_cast<std::size_t>(k)], b1 = st.bottom[s][static_cast<std::size_t>(k)];
          if (k == i - 1) {
            EXPECT_EQ(b0, Bottom::mid);
            EXPECT_NE(b1, Bottom::mid);
          } else {
            EXPECT_EQ(b0, b1);
          }
        }
      EXPECT_NEAR(st.common_mode(), 0.70, 1e-12);
    }
    EXPECT_THROW(switch_bit(st, 1, 1, 1e-10, arr, 0.0), PreconditionError);
  }
}

TEST(CapDac, PlatesMoveTowardEachOther) {
  const auto arr = ideal_array(default_config());
  auto st = reset_dac(arr, 0.9, 0.5);
  const auto ev = switch_bit(st, 1, +1, 1e-10, arr, 0.0);
  EXPECT_LT(ev.delta_p, 0);
  EXPECT_GT(ev.delta_n, 0);
  EXPECT_NEAR(st.differential(), 0.4 - step_voltage(1, arr), 1e-12);
}

TEST(CapDac, IncompleteSettlingResidual) {
  const auto cfg = default_config();
  const auto arr = ideal_array(cfg);
  const auto r = ron_schedule(arr, cfg);
  auto st = reset_dac(arr, 0.7, 0.7);
  const auto ev = switch_bit(st, 1, -1, cfg.t_fix, arr, r[0]);
  // tau = t_clk_low / N: exp(-10) of the step remains
  EXPECT_NEAR(ev.residual, -step_voltage(1, arr) * std::exp(-10.0), 1e-12);
  EXPECT_NEAR(st.differential() - (st.target[0] - st.target[1]), ev.residual, 1e-15);
  EXPECT_THROW(switch_bit(st, 2, 1, 0.0, arr, r[1]), PreconditionError);
}

TEST(CapDac, SwitchSizingConstantTau) {
  const auto cfg = default_config();
  const auto arr = ideal_array(cfg);
  const auto r = ron_schedule(arr, cfg);
  for (std::size_t j = 0; j < r.size(); ++j)
    EXPECT_NEAR(r[j] * arr.side[0].units[j] * arr.unit, cfg.t_clk_low / cfg.dac_settle_n, 1e-24);
  auto lit = cfg;
  lit.dac_ron_literal = true;
  const auto rl = ron_schedule(arr, lit);
  const double c0 = 256 * arr.unit;
  EXPECT_NEAR(rl[0], 1.0 / (10 * c0 * 150e-12), 1e-6 * rl[0]);
}

TEST(CapDac, MismatchFollowsSqrtUnitCount) {
  auto cfg = default_config();
  const double sigma_u = 0.01;
  const int trials = 400;
  double s_msb = 0, s_lsb = 0;
  for (int t = 0; t < trials; ++t) {
    auto rng = make_rng(static_cast<std::uint64_t>(t), Stream::mismatch);
    const auto arr = build_cap_array(cfg, rng, Topology::binary, sigma_u);
    const auto dev = realized_deviation(arr, kSideP);
    s_msb += dev.front() * dev.front();
    s_lsb += dev.back() * dev.back();
  }
  EXPECT_NEAR(std::sqrt(s_msb / trials) / (sigma_u / 16.0), 1.0, 0.15);  // 256 units
  EXPECT_NEAR(std::sqrt(s_lsb / trials) / sigma_u, 1.0, 0.15);
}

TEST(CapDac, MismatchIsReproducible) {
  auto cfg = default_config();
  auto a = make_rng(9, Stream::mismatch), b = make_rng(9, Stream::mismatch);
  EXPECT_EQ(build_cap_array(cfg, a, Topology::binary, 0.02).side[1].caps,
            build_cap_array(cfg, b, Topology::binary, 0.02).side[1].caps);
}

TEST(CapDac, ImpossibleMismatchIsAConfigError) {
  auto cfg = default_config();
  auto rng = make_rng(1, Stream::mismatch);
  EXPECT_THROW(build_cap_array(cfg, rng, Topology::binary, -0.1), ConfigError);
  try {
    build_cap_array(cfg, rng, Topology::binary, 50.0);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "dac_mismatch");
  }
}

TEST(CapDac, CommonModeSwitchingBeatsConventionalEveryCode) {
  const auto cfg = default_config();
  const auto arr = ideal_array(cfg);
  for (int code = 0; code < 1024; ++code)
    ASSERT_LT(cm_switching_energy(arr, code), conventional_switching_energy(10, cfg.c_dac, cfg.c_p, cfg.v_ref, code))
        << "code " << code;
}

TEST(CapDac, ConventionalSingleStepOracle) {
  // 1-bit conventional array: MSB trial charges half of C_T to V_REF from 0, one side each
  const double c = 1e-12, v = 1.0;
  const double per_side = (c / 2) * v * v * (1 - 0.5);  // V_REF * C/2 * (V_REF - V_top)
  EXPECT_NEAR(conventional_switching_energy(1, c, 0, v, 0), 2 * per_side, 1e-24);
}

TEST(CapDac, SplitCapacitorSaving) {
  auto cfg = default_config();
  const auto rep = compare_topologies(cfg, 1);
  EXPECT_NEAR(rep.energy_saving_split, 0.375, 0.05);
  EXPECT_NEAR(rep.capacitance_reduction, 16.0, 0.01);
  EXPECT_GT(rep.energy_saving_bridged, 0.5);
  EXPECT_NEAR(rep.noise_ratio, std::sqrt(rep.row("binary_cm").c_sampled / rep.row("split_bridged_cm").c_sampled), 1e-12);
  EXPECT_GT(rep.row("split_bridged_cm").inl_max, rep.row("binary_cm").inl_max);
}
