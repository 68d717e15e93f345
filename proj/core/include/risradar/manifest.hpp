#pragma once

/// Reproducibility manifest written next to every command's outputs: the
/// embedded config, command, flags, seeds and a content checksum per output
/// file. Re-running from a manifest must reproduce identical checksums.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace risradar {

std::uint64_t fnv1a64_file(const std::filesystem::path& path);
std::string checksum_hex(std::uint64_t checksum);

struct RunManifest {
  std::string command;  // simulate | estimate | train | sweep
  std::string toolkit_version;
  std::string config_json;  // embedded full config
  std::map<std::string, std::string> flags;
  std::uint64_t config_checksum = 0;
  std::string timestamp_utc;
  double wall_time_s = 0.0;
  struct Output {
    std::string name;  // path relative to the manifest
    std::string checksum;
  };
  std::vector<Output> outputs;

  void add_output(const std::filesystem::path& dir, const std::string& name);
};

void write_manifest(const RunManifest& manifest, const std::filesystem::path& path);
RunManifest read_manifest(const std::filesystem::path& path);

std::string utc_timestamp_now();

}  // namespace risradar
