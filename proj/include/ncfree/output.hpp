#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ncfree/experiments.hpp"

namespace ncfree {

inline constexpr const char* kToolVersion = "0.1.0";

struct RunManifest {
  std::string tool_version = kToolVersion;
  std::uint64_t config_hash = 0;
  std::uint64_t master_seed = 0;
  std::string start_time;
  std::string end_time;
  std::vector<std::string> outputs;
  std::vector<std::pair<std::string, std::string>> config;
};

std::string utc_timestamp();

/// Header "N,y,median_err,q99_err,stderr,samples,seed", numbers in %.17g.
std::string record_csv(const RunRecord& r);
std::string record_json(const RunRecord& r);
RunRecord record_from_json(const std::string& text);
std::string manifest_json(const RunManifest& m);

/// Writes text to path through a temporary file and a rename.
void write_atomic(const std::string& path, const std::string& text);

/// Writes <stem>.json, <stem>.csv and <stem>.manifest.json; the manifest
/// is written last and lists the other two.
std::vector<std::string> write_outputs(const RunRecord& record, RunManifest manifest, const std::string& stem);

}  // namespace ncfree
