#include "ncfree/output.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace ncfree {

namespace {

using nlohmann::json;

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json pairs_json(const std::vector<std::pair<std::string, std::string>>& kv) {
  json out = json::object();
  for (const auto& [k, v] : kv) out[k] = v;
  return out;
}

std::string hex64(std::uint64_t h) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace

std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string record_csv(const RunRecord& r) {
  std::string s = "N,y,median_err,q99_err,stderr,samples,seed\n";
  for (const auto& c : r.cells) {
    s += std::to_string(c.N) + "," + g17(c.y) + "," + g17(c.median_err) + "," + g17(c.q99_err) + "," +
         g17(c.stderr_) + "," + std::to_string(c.samples) + "," + std::to_string(c.seed) + "\n";
  }
  return s;
}

std::string record_json(const RunRecord& r) {
  json j;
  j["experiment"] = r.experiment;
  j["config"] = pairs_json(r.config);
  j["seed"] = r.seed;
  j["cells"] = json::array();
  for (const auto& c : r.cells) {
    j["cells"].push_back({{"N", c.N},
                          {"y", c.y},
                          {"median_err", c.median_err},
                          {"q99_err", c.q99_err},
                          {"stderr", c.stderr_},
                          {"samples", c.samples},
                          {"seed", c.seed},
                          {"label", c.label}});
  }
  j["slopes"] = json::array();
  for (const auto& s : r.slopes) {
    j["slopes"].push_back({{"label", s.label},
                           {"slope", s.fit.slope},
                           {"intercept", s.fit.intercept},
                           {"ci_low", s.fit.ci_low},
                           {"ci_high", s.fit.ci_high},
                           {"target", s.target},
                           {"tolerance", s.tolerance},
                           {"pass", s.pass}});
  }
  j["verdicts"] = json::array();
  for (const auto& v : r.verdicts) j["verdicts"].push_back({{"name", v.name}, {"pass", v.pass}, {"detail", v.detail}});
  j["wall_seconds"] = r.wall_seconds;
  j["pass"] = r.pass();
  return j.dump(2) + "\n";
}

RunRecord record_from_json(const std::string& text) {
  RunRecord r;
  json j;
  try {
    j = json::parse(text);
    r.experiment = j.at("experiment").get<std::string>();
    for (const auto& [k, v] : j.at("config").items()) r.config.emplace_back(k, v.get<std::string>());
    r.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& c : j.at("cells")) {
      CellStats cs;
      cs.N = c.at("N").get<int>();
      cs.y = c.at("y").get<double>();
      cs.median_err = c.at("median_err").get<double>();
      cs.q99_err = c.at("q99_err").get<double>();
      cs.stderr_ = c.at("stderr").get<double>();
      cs.samples = c.at("samples").get<long>();
      cs.seed = c.at("seed").get<std::uint64_t>();
      cs.label = c.value("label", "");
      r.cells.push_back(cs);
    }
    for (const auto& s : j.at("slopes")) {
      SlopeRecord sr;
      sr.label = s.at("label").get<std::string>();
      sr.fit.slope = s.at("slope").get<double>();
      sr.fit.intercept = s.at("intercept").get<double>();
      sr.fit.ci_low = s.at("ci_low").get<double>();
      sr.fit.ci_high = s.at("ci_high").get<double>();
      sr.target = s.at("target").get<double>();
      sr.tolerance = s.at("tolerance").get<double>();
      sr.pass = s.at("pass").get<bool>();
      r.slopes.push_back(sr);
    }
    for (const auto& v : j.at("verdicts"))
      r.verdicts.push_back({v.at("name").get<std::string>(), v.at("pass").get<bool>(), v.value("detail", "")});
    r.wall_seconds = j.value("wall_seconds", 0.0);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("malformed run record: ") + e.what());
  }
  return r;
}

std::string manifest_json(const RunManifest& m) {
  json j;
  j["tool_version"] = m.tool_version;
  j["config_hash"] = hex64(m.config_hash);
  j["master_seed"] = m.master_seed;
  j["start_time"] = m.start_time;
  j["end_time"] = m.end_time;
  j["outputs"] = m.outputs;
  j["config"] = pairs_json(m.config);
  return j.dump(2) + "\n";
}

void write_atomic(const std::string& path, const std::string& text) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + tmp + " for writing");
    os.write(text.data(), static_cast<std::streamsize>(text.size()));
    os.flush();
    if (!os) throw std::runtime_error("write failed for " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw std::runtime_error("cannot rename " + tmp + " to " + path + ": " + ec.message());
  }
}

std::vector<std::string> write_outputs(const RunRecord& record, RunManifest manifest, const std::string& stem) {
  const std::filesystem::path parent = std::filesystem::path(stem).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  const std::string json_path = stem + ".json";
  const std::string csv_path = stem + ".csv";
  const std::string man_path = stem + ".manifest.json";
  write_atomic(json_path, record_json(record));
  write_atomic(csv_path, record_csv(record));
  manifest.outputs = {json_path, csv_path};
  if (manifest.end_time.empty()) manifest.end_time = utc_timestamp();
  write_atomic(man_path, manifest_json(manifest));
  return {json_path, csv_path, man_path};
}

}  // namespace ncfree
