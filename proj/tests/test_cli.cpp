#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <map>
#include <sstream>
#include <string>

#include "sarsim/cli.hpp"

using namespace sarsim;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("sarsim_test_" + name);
  fs::remove_all(p);
  return p;
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::directory_iterator(dir)) files[e.path().filename().string()] = read_file(e.path());
  return files;
}

int run(const std::string& cmd, const CliOptions& o, std::string* out = nullptr) {
  std::ostringstream os, es;
  const int rc = run_command(cmd, o, os, es);
  if (out) *out = os.str() + es.str();
  return rc;
}

}  // namespace

TEST(Cli, PrintDefaults) {
  std::string out;
  EXPECT_EQ(run("print-defaults", {}, &out), kExitOk);
  EXPECT_EQ(out, std::string(kDefaultConfigText));
  EXPECT_EQ(load_config(out), default_config());
}

TEST(Cli, SimulateWritesArtifacts) {
  CliOptions o;
  o.out = scratch("simulate").string();
  o.bin = 31;
  EXPECT_EQ(run("simulate", o), kExitOk);
  for (const char* f : {"spectrum.csv", "metrics.json", "codes.csv", "manifest.json"})
    EXPECT_TRUE(fs::exists(fs::path(o.out) / f)) << f;
  const auto m = nlohmann::json::parse(read_file(fs::path(o.out) / "metrics.json"));
  EXPECT_EQ(m["signal_bin"], 31);
  EXPECT_EQ(m["n"], 64);
  const auto man = nlohmann::json::parse(read_file(fs::path(o.out) / "manifest.json"));
  EXPECT_EQ(man["command"], "simulate");
  EXPECT_EQ(man["seed"], 1);
  EXPECT_EQ(man["tool_version"], std::string(kToolVersion));
  const auto spec = read_file(fs::path(o.out) / "spectrum.csv");
  EXPECT_EQ(spec.substr(0, spec.find('\n')), "bin,frequency_hz,power_dbfs");
}

TEST(Cli, DeterministicAcrossRunsAndWorkers) {
  setenv("SOURCE_DATE_EPOCH", "1700000000", 1);
  CliOptions o;
  o.out = scratch("determinism").string();
  o.n = 4096;
  o.bin = 101;
  ASSERT_EQ(run("simulate", o), kExitOk);
  const auto a = snapshot(o.out);
  o.workers = 4;
  ASSERT_EQ(run("simulate", o), kExitOk);
  EXPECT_EQ(snapshot(o.out), a);
  unsetenv("SOURCE_DATE_EPOCH");
}

TEST(Cli, BinaryDumpRoundTrip) {
  CliOptions o;
  o.out = scratch("dump").string();
  o.binary_dump = true;
  ASSERT_EQ(run("simulate", o), kExitOk);
  const auto d = decode_code_dump(read_file(fs::path(o.out) / "codes.sarc"));
  EXPECT_EQ(d.bits, 10u);
  EXPECT_EQ(d.codes.size(), 64u);
  CodeDump x{10, {0, 1023, 512}, {0, 1, 3}};
  const auto y = decode_code_dump(encode_code_dump(x));
  EXPECT_EQ(y.codes, x.codes);
  EXPECT_EQ(y.flags, x.flags);
  EXPECT_THROW(decode_code_dump("SARX"), PreconditionError);
}

TEST(Cli, OutputDirectoryFromEnvironment) {
  const auto dir = scratch("env");
  setenv("SARSIM_OUT_DIR", dir.c_str(), 1);
  EXPECT_EQ(run("timing", {}), kExitOk);
  unsetenv("SARSIM_OUT_DIR");
  EXPECT_TRUE(fs::exists(dir / "timing.json"));
  const auto j = nlohmann::json::parse(read_file(dir / "timing.json"));
  EXPECT_GT(j["f_s_max_async_hz"].get<double>(), 130e6);
}

TEST(Cli, ExitCodes) {
  const auto dir = scratch("exit");
  CliOptions o;
  o.out = dir.string();
  o.config_path = (dir / "missing.conf").string();
  EXPECT_EQ(run("timing", o), kExitConfig);

  fs::create_directories(dir);
  const auto bad = dir / "bad.conf";
  write_file(bad, std::string(kDefaultConfigText) + "c_p = 20 fF\n");
  o.config_path = bad.string();
  std::string msg;
  EXPECT_EQ(run("timing", o, &msg), kExitConfig);
  EXPECT_NE(msg.find("c_p"), std::string::npos);

  o.config_path.clear();
  o.bin = 4;  // not coprime with 64
  EXPECT_EQ(run("simulate", o), kExitRuntime);

  const auto fast = dir / "fast.conf";
  write_file(fast, serialize(with_param(default_config(), "f_s", "250 MHz")));
  o.config_path = fast.string();
  o.check = true;
  EXPECT_EQ(run("timing", o), kExitCheck);
}

TEST(Cli, SweepFullScaleVersusParasitic) {
  CliOptions o;
  o.out = scratch("sweep").string();
  o.param = "c_p";
  o.range = "0fF:100fF:6";
  ASSERT_EQ(run("sweep", o), kExitOk);
  const auto j = nlohmann::json::parse(read_file(fs::path(o.out) / "sweep.json"));
  ASSERT_EQ(j["rows"].size(), 6u);
  double prev = 1e9;
  for (const auto& r : j["rows"]) {
    EXPECT_LT(r["v_fs_net_v"].get<double>(), prev);
    prev = r["v_fs_net_v"].get<double>();
  }
  o.range = "0fF:100fF";
  EXPECT_EQ(run("sweep", o), kExitRuntime);
  o.param = "nonsense";
  o.range = "0:1:2";
  EXPECT_EQ(run("sweep", o), kExitConfig);
}

TEST(Cli, DacCompareReportsSplitSaving) {
  CliOptions o;
  o.out = scratch("dac").string();
  ASSERT_EQ(run("dac-compare", o), kExitOk);
  const auto s = read_file(fs::path(o.out) / "dac_savings.csv");
  EXPECT_NE(s.find("energy_saving_split_vs_conventional,0.37"), std::string::npos) << s;
}

TEST(Cli, PowerBreakdown) {
  CliOptions o;
  o.out = scratch("power").string();
  o.n = 8192;
  ASSERT_EQ(run("power", o), kExitOk);
  const auto j = nlohmann::json::parse(read_file(fs::path(o.out) / "power.json"));
  double sum = 0;
  for (const auto& b : j["blocks"]) sum += b["power_w"].get<double>();
  EXPECT_NEAR(sum, j["total_w"].get<double>(), 1e-18);
  EXPECT_EQ(j["blocks"].size(), 4u);
}

TEST(Cli, MetastabilityCommand) {
  CliOptions o;
  o.out = scratch("meta").string();
  o.check = true;
  EXPECT_EQ(run("metastability", o), kExitOk);
  const auto j = nlohmann::json::parse(read_file(fs::path(o.out) / "metastability.json"));
  EXPECT_TRUE(j["within_3sigma"].get<bool>());
  o.trials = 10;
  EXPECT_EQ(run("metastability", o), kExitRuntime);
}

TEST(Cli, Executable) {
  const auto dir = scratch("exe");
  const std::string exe = SARSIM_EXE;
  EXPECT_EQ(std::system((exe + " print-defaults > /dev/null").c_str()), 0);
  const int rc = std::system((exe + " timing --out " + dir.string() + " > /dev/null").c_str());
  EXPECT_EQ(WEXITSTATUS(rc), 0);
  EXPECT_TRUE(fs::exists(dir / "manifest.json"));
  const int bad = std::system((exe + " simulate --bin 4 --out " + dir.string() + " > /dev/null 2>&1").c_str());
  EXPECT_EQ(WEXITSTATUS(bad), kExitRuntime);
  const int usage = std::system((exe + " frobnicate > /dev/null 2>&1").c_str());
  EXPECT_NE(WEXITSTATUS(usage), 0);
}
