#include "risradar/manifest.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "risradar/errors.hpp"

namespace risradar {

std::uint64_t fnv1a64_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("checksum: cannot open " + path.string());
  std::uint64_t h = 0xCBF29CE484222325ULL;
  char buf[1 << 14];
  while (is) {
    is.read(buf, sizeof(buf));
    const auto got = is.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001B3ULL;
    }
  }
  return h;
}

std::string checksum_hex(std::uint64_t checksum) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(checksum));
  return buf;
}

void RunManifest::add_output(const std::filesystem::path& dir, const std::string& name) {
  outputs.push_back({name, checksum_hex(fnv1a64_file(dir / name))});
}

void write_manifest(const RunManifest& m, const std::filesystem::path& path) {
  nlohmann::json j;
  j["command"] = m.command;
  j["toolkit_version"] = m.toolkit_version;
  j["config"] = nlohmann::json::parse(m.config_json);
  j["config_checksum"] = checksum_hex(m.config_checksum);
  j["flags"] = m.flags;
  j["timestamp_utc"] = m.timestamp_utc;
  j["wall_time_s"] = m.wall_time_s;
  nlohmann::json outs = nlohmann::json::array();
  for (const auto& o : m.outputs) outs.push_back({{"file", o.name}, {"checksum", o.checksum}});
  j["outputs"] = outs;

  std::ofstream os(path);
  if (!os) throw DataError("cannot write manifest: " + path.string());
  os << j.dump(2) << '\n';
}

RunManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw DataError("cannot read manifest: " + path.string());
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError("manifest parse error: " + std::string(e.what()));
  }
  RunManifest m;
  try {
    m.command = j.at("command").get<std::string>();
    m.toolkit_version = j.at("toolkit_version").get<std::string>();
    m.config_json = j.at("config").dump(2) + "\n";
    m.flags = j.at("flags").get<std::map<std::string, std::string>>();
    m.timestamp_utc = j.value("timestamp_utc", "");
    m.wall_time_s = j.value("wall_time_s", 0.0);
    for (const auto& o : j.at("outputs"))
      m.outputs.push_back({o.at("file").get<std::string>(), o.at("checksum").get<std::string>()});
  } catch (const nlohmann::json::exception& e) {
    throw DataError("manifest field error: " + std::string(e.what()));
  }
  return m;
}

std::string utc_timestamp_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace risradar
