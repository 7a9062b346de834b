#pragma once

// Artifact writers: CSV tables, JSON documents, the binary code dump and run manifests.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "sarsim/errors.hpp"

namespace sarsim {

inline constexpr std::string_view kToolVersion = "1.0.0";

inline std::string fmt_num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

// JSON has no infinities: non-finite values become the strings "inf", "-inf", "nan".
inline nlohmann::json json_num(double v) {
  if (std::isfinite(v)) return v;
  return fmt_num(v);
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row) {
    if (row.size() != header.size()) throw PreconditionError("CsvTable: row width does not match header");
    rows.push_back(std::move(row));
  }

  std::string str() const {
    std::string s;
    const auto line = [&](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) s += (i ? "," : "") + cells[i];
      s += "\n";
    };
    line(header);
    for (const auto& r : rows) line(r);
    return s;
  }
};

inline void write_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw PreconditionError("cannot write " + path.string());
  f.write(content.data(), static_cast<std::streamsize>(content.size()));
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw PreconditionError("cannot read " + path.string());
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

inline void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  write_file(path, j.dump(2) + "\n");
}

// --- binary code dump ------------------------------------------------------------------
//
// Little-endian layout: "SARC", u32 version, u32 bits, u64 count, count x u16 code,
// count x u8 flags.

struct CodeDump {
  std::uint32_t bits = 0;
  std::vector<int> codes;
  std::vector<std::uint8_t> flags;
};

inline constexpr std::uint32_t kCodeDumpVersion = 1;

namespace detail {
inline void put_le(std::string& s, std::uint64_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
inline std::uint64_t get_le(const std::string& s, std::size_t& pos, int bytes) {
  if (pos + static_cast<std::size_t>(bytes) > s.size()) throw PreconditionError("code dump: truncated file");
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(s[pos++])) << (8 * i);
  return v;
}
}  // namespace detail

inline std::string encode_code_dump(const CodeDump& d) {
  if (d.codes.size() != d.flags.size()) throw PreconditionError("code dump: codes and flags differ in length");
  std::string s = "SARC";
  detail::put_le(s, kCodeDumpVersion, 4);
  detail::put_le(s, d.bits, 4);
  detail::put_le(s, d.codes.size(), 8);
  for (int c : d.codes) detail::put_le(s, static_cast<std::uint64_t>(c), 2);
  for (auto f : d.flags) detail::put_le(s, f, 1);
  return s;
}

inline CodeDump decode_code_dump(const std::string& s) {
  if (s.size() < 4 || s.compare(0, 4, "SARC") != 0) throw PreconditionError("code dump: bad magic");
  std::size_t pos = 4;
  if (detail::get_le(s, pos, 4) != kCodeDumpVersion) throw PreconditionError("code dump: unsupported version");
  CodeDump d;
  d.bits = static_cast<std::uint32_t>(detail::get_le(s, pos, 4));
  const auto n = detail::get_le(s, pos, 8);
  d.codes.reserve(n);
  for (std::uint64_t k = 0; k < n; ++k) d.codes.push_back(static_cast<int>(detail::get_le(s, pos, 2)));
  for (std::uint64_t k = 0; k < n; ++k) d.flags.push_back(static_cast<std::uint8_t>(detail::get_le(s, pos, 1)));
  return d;
}

// --- manifest --------------------------------------------------------------------------

struct RunManifest {
  std::string config_path;  // "(built-in)" for the shipped defaults
  std::string command;
  std::uint64_t seed = 0;
  std::string out_dir;
  std::string tool_version{kToolVersion};
  std::string timestamp;  // UTC, ISO 8601

  nlohmann::json to_json() const {
    return {{"config_path", config_path}, {"command", command},         {"seed", seed},
            {"out_dir", out_dir},         {"tool_version", tool_version}, {"timestamp", timestamp}};
  }
};

// SOURCE_DATE_EPOCH, when set, pins the timestamp so that reruns are byte-identical.
inline std::string manifest_timestamp() {
  std::time_t t = std::time(nullptr);
  if (const char* e = std::getenv("SOURCE_DATE_EPOCH"); e && *e) t = static_cast<std::time_t>(std::strtoll(e, nullptr, 10));
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace sarsim
